//! Linear solvers for `(I − P) g = b` with `P` substochastic.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::Rational;

/// Windows at or above this size are solved iteratively.
pub const DENSE_LIMIT: usize = 2000;

/// A substochastic kernel on `0..n` in row-sparse form.
#[derive(Clone, Debug, Default)]
pub struct SparseKernel<T> {
    pub rows: Vec<Vec<(usize, T)>>,
}

impl<T> SparseKernel<T> {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Solves `(I − P) g = e_c` for every column `c` in `columns`.
pub fn solve_f64(kernel: &SparseKernel<f64>, columns: &[usize]) -> Result<Vec<Vec<f64>>> {
    if kernel.len() < DENSE_LIMIT {
        solve_dense(kernel, columns)
    } else {
        columns.iter().map(|&c| gauss_seidel(kernel, c, 1e-15, 200_000)).collect()
    }
}

pub fn solve_dense(kernel: &SparseKernel<f64>, columns: &[usize]) -> Result<Vec<Vec<f64>>> {
    let n = kernel.len();
    let mut a = DMatrix::<f64>::identity(n, n);
    for (i, row) in kernel.rows.iter().enumerate() {
        for &(j, p) in row {
            a[(i, j)] -= p;
        }
    }
    let mut b = DMatrix::<f64>::zeros(n, columns.len());
    for (k, &c) in columns.iter().enumerate() {
        b[(c, k)] = 1.0;
    }
    let x = a.lu().solve(&b).ok_or(Error::Singular)?;
    Ok((0..columns.len()).map(|k| x.column(k).iter().copied().collect()).collect())
}

/// Symmetric Gauss–Seidel sweeps until the largest update falls below
/// `tol` times the largest entry.
pub fn gauss_seidel(kernel: &SparseKernel<f64>, column: usize, tol: f64, max_sweeps: usize) -> Result<Vec<f64>> {
    let n = kernel.len();
    let mut diag = vec![1.0; n];
    let mut off: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n);
    for (i, row) in kernel.rows.iter().enumerate() {
        let mut o = Vec::with_capacity(row.len());
        for &(j, p) in row {
            if i == j {
                diag[i] -= p;
            } else {
                o.push((j, p));
            }
        }
        if diag[i] <= 0.0 {
            return Err(Error::Singular);
        }
        off.push(o);
    }
    let mut g = vec![0.0; n];
    let update = |g: &mut Vec<f64>, i: usize| -> f64 {
        let mut s = if i == column { 1.0 } else { 0.0 };
        for &(j, p) in &off[i] {
            s += p * g[j];
        }
        let v = s / diag[i];
        let d = (v - g[i]).abs();
        g[i] = v;
        d
    };
    let mut last = f64::INFINITY;
    for sweep in 0..max_sweeps {
        let mut change: f64 = 0.0;
        for i in 0..n {
            change = change.max(update(&mut g, i));
        }
        for i in (0..n).rev() {
            change = change.max(update(&mut g, i));
        }
        let scale = g.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        last = change / scale;
        if last < tol && sweep > 0 {
            return Ok(g);
        }
    }
    Err(Error::NoConvergence { iterations: max_sweeps, residual: last })
}

/// Exact sparse elimination of `(I − P) g = e_c`, eliminating variables in
/// `order`. With leaves-first orders on path- and tree-shaped windows no
/// fill-in occurs.
pub fn solve_exact(kernel: &SparseKernel<Rational>, columns: &[usize], order: &[usize]) -> Result<Vec<Vec<Rational>>> {
    let n = kernel.len();
    let mut rows: Vec<BTreeMap<usize, Rational>> = vec![BTreeMap::new(); n];
    let mut col_rows: Vec<BTreeMap<usize, ()>> = vec![BTreeMap::new(); n];
    for (i, row) in kernel.rows.iter().enumerate() {
        *rows[i].entry(i).or_insert_with(Rational::zero) += Rational::one();
        for (j, p) in row {
            *rows[i].entry(*j).or_insert_with(Rational::zero) -= p;
        }
        rows[i].retain(|_, v| !v.is_zero());
        for j in rows[i].keys() {
            col_rows[*j].insert(i, ());
        }
    }
    let m = columns.len();
    let mut rhs: Vec<Vec<Rational>> = vec![vec![Rational::zero(); m]; n];
    for (k, &c) in columns.iter().enumerate() {
        rhs[c][k] = Rational::one();
    }
    let mut done = vec![false; n];
    for &v in order {
        let pivot = rows[v].get(&v).cloned().ok_or(Error::Singular)?;
        if pivot.is_zero() {
            return Err(Error::Singular);
        }
        done[v] = true;
        let targets: Vec<usize> = col_rows[v].keys().copied().filter(|r| !done[*r]).collect();
        let pivot_row: Vec<(usize, Rational)> = rows[v].iter().map(|(j, a)| (*j, a.clone())).collect();
        let pivot_rhs = rhs[v].clone();
        for r in targets {
            let factor = match rows[r].get(&v) {
                Some(a) => a / &pivot,
                None => continue,
            };
            for (j, a) in &pivot_row {
                let e = rows[r].entry(*j).or_insert_with(Rational::zero);
                *e -= &factor * a;
                if e.is_zero() {
                    rows[r].remove(j);
                    col_rows[*j].remove(&r);
                } else {
                    col_rows[*j].insert(r, ());
                }
            }
            for k in 0..m {
                if !pivot_rhs[k].is_zero() {
                    let d = &factor * &pivot_rhs[k];
                    rhs[r][k] -= d;
                }
            }
        }
    }
    // Back substitution in reverse elimination order: row v only involves
    // v and variables eliminated after it.
    let mut sol: Vec<Vec<Rational>> = vec![vec![Rational::zero(); m]; n];
    for &v in order.iter().rev() {
        let pivot = rows[v][&v].clone();
        for k in 0..m {
            let mut s = rhs[v][k].clone();
            for (j, a) in &rows[v] {
                if *j != v {
                    s -= a * &sol[*j][k];
                }
            }
            sol[v][k] = s / &pivot;
        }
    }
    Ok((0..m).map(|k| sol.iter().map(|row| row[k].clone()).collect()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat;

    fn path_kernel(n: usize) -> (SparseKernel<f64>, SparseKernel<Rational>) {
        // Symmetric walk on 0..n killed at both ends.
        let mut f = SparseKernel { rows: vec![Vec::new(); n] };
        let mut r = SparseKernel { rows: vec![Vec::new(); n] };
        for i in 0..n {
            for j in [i.wrapping_sub(1), i + 1] {
                if j < n {
                    f.rows[i].push((j, 0.5));
                    r.rows[i].push((j, rat(1, 2)));
                }
            }
        }
        (f, r)
    }

    #[test]
    fn solvers_agree_on_a_path() {
        let (f, r) = path_kernel(9);
        let dense = solve_dense(&f, &[3]).unwrap();
        let gs = gauss_seidel(&f, 3, 1e-15, 100_000).unwrap();
        let order: Vec<usize> = (0..9).collect();
        let exact = solve_exact(&r, &[3], &order).unwrap();
        for i in 0..9 {
            // Walk killed outside 0..=8: G(i, y) = 2 (i+1)(9−y) / 10 for i <= y.
            let (a, b) = if i <= 3 { (i + 1, 10 - 4) } else { (4, 10 - (i + 1)) };
            let want = 2.0 * (a * b) as f64 / 10.0;
            assert!((dense[0][i] - want).abs() < 1e-12);
            assert!((gs[i] - want).abs() < 1e-12);
            assert_eq!(exact[0][i], rat(2 * (a * b) as i64, 10));
        }
    }
}
