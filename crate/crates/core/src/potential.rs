//! Potential kernel of the simple walk on Z².
//!
//! `a` vanishes at the origin, equals 1 next to it, is harmonic elsewhere
//! and has the symmetries of the lattice. Its values lie in `Q + Q/π`: the
//! diagonal is known in closed form and the rest of the octant
//! `0 <= j <= i` follows column by column from harmonicity.

use num_traits::{One, Zero};
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::chain::{Accumulator, McEstimate};
use crate::error::{Error, Result};
use crate::models::{Site, Z2Walk};
use crate::pirational::PiRational;
use crate::rng::SeedStream;
use crate::{parse_rational, rat, rint, Rational};

const EULER_GAMMA_50: &str = "0.57721566490153286060651209008240243104215933593992";
const LN_8_50: &str = "2.0794415416798359282516963643745297042265004030808";

/// `(2γ + log 8)/π`.
pub const ASYMPTOTIC_CONSTANT: f64 = 1.029_373_705_654_570_7;

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialTable {
    radius: usize,
    /// `rows[i][j] = a(i, j)` for `0 <= j <= i <= radius`.
    rows: Vec<Vec<PiRational>>,
}

impl PotentialTable {
    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn rows(&self) -> &[Vec<PiRational>] {
        &self.rows
    }

    /// `a(i, j)` through the dihedral symmetries.
    pub fn get(&self, i: i64, j: i64) -> Option<&PiRational> {
        let (i, j) = (i.unsigned_abs() as usize, j.unsigned_abs() as usize);
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        self.rows.get(hi).and_then(|row| row.get(lo))
    }

    pub fn at(&self, x: &Site) -> Result<&PiRational> {
        self.get(x.0, x.1).ok_or_else(|| Error::OutOfRange(format!("({},{})", x.0, x.1)))
    }
}

/// `(4/π) Σ_{j=1}^n 1/(2j−1)`.
pub fn diagonal(n: usize) -> PiRational {
    let mut h = Rational::zero();
    for j in 1..=n {
        h += rat(1, 2 * j as i64 - 1);
    }
    PiRational::inv_pi(rint(4) * h)
}

/// Builds the octant table up to radius `n` (at least 1).
///
/// Order: for each column `m = 1..n−1`, first `a(m+1, m)` from
/// harmonicity at the diagonal point `(m, m)`, then `a(m+1, j)` for
/// `j = m−1` down to 0 from harmonicity at `(m, j)`, using `a(m, −1) = a(m, 1)`.
/// Diagonal entries come from the closed form.
pub fn potential_table(n: usize) -> PotentialTable {
    let n = n.max(1);
    let mut rows: Vec<Vec<PiRational>> = vec![vec![PiRational::zero()], vec![PiRational::from_int(1), diagonal(1)]];
    for m in 1..n {
        let mut next = vec![PiRational::zero(); m + 2];
        next[m + 1] = diagonal(m + 1);
        next[m] = &(&rows[m][m] * 2) - &rows[m][m - 1];
        for j in (0..m).rev() {
            let below = if j == 0 { &rows[m][1] } else { &rows[m][j - 1] };
            let mut v = &rows[m][j] * 4;
            v -= &rows[m - 1][j];
            v -= &rows[m][j + 1];
            v -= below;
            next[j] = v;
        }
        rows.push(next);
    }
    PotentialTable { radius: n, rows }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicityReport {
    pub checked: usize,
    /// Interior non-origin sites where `4a(x) ≠ Σ a(x ± e)`.
    pub violations: Vec<Site>,
    /// `(1/4) Σ_{|e|=1} a(e) − a(0)`; harmonic functions would give 0.
    pub origin_defect: PiRational,
    pub symmetry_violations: Vec<Site>,
    /// Every rational part is an integer.
    pub integral_rational_parts: bool,
    /// Every `1/π` coefficient has an odd denominator.
    pub odd_pi_denominators: bool,
}

impl HarmonicityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.symmetry_violations.is_empty() && self.origin_defect == PiRational::from_int(1)
    }
}

/// Exact check over the whole square `|i|, |j| < radius`.
pub fn verify_harmonicity(table: &PotentialTable) -> HarmonicityReport {
    let r = table.radius() as i64;
    let a = |i: i64, j: i64| table.get(i, j).expect("inside table");
    let mut violations = Vec::new();
    let mut checked = 0;
    for i in -(r - 1)..r {
        for j in -(r - 1)..r {
            if (i, j) == (0, 0) {
                continue;
            }
            checked += 1;
            let mut s = a(i + 1, j) + a(i - 1, j);
            s += a(i, j + 1);
            s += a(i, j - 1);
            if s != a(i, j) * 4 {
                violations.push((i, j));
            }
        }
    }
    let mut around = a(1, 0) + a(-1, 0);
    around += a(0, 1);
    around += a(0, -1);
    let origin_defect = &around.scale(&rat(1, 4)) - a(0, 0);

    // Symmetry: the mirrored stored values must be the same objects the
    // table hands out, and a(n, n) must match the closed form.
    let mut symmetry_violations = Vec::new();
    for n in 0..=table.radius() {
        if table.rows[n][n] != diagonal(n) {
            symmetry_violations.push((n as i64, n as i64));
        }
    }
    if *a(1, 0) != PiRational::from_int(1) || !a(0, 0).is_zero() {
        symmetry_violations.push((1, 0));
    }
    let mut integral = true;
    let mut odd = true;
    for row in &table.rows {
        for v in row {
            integral &= v.p.denom().is_one();
            odd &= v.q.denom() % 2u32 == 1u32.into();
        }
    }
    HarmonicityReport {
        checked,
        violations,
        origin_defect,
        symmetry_violations,
        integral_rational_parts: integral,
        odd_pi_denominators: odd,
    }
}

/// `a(x) − (2/π) log|x| − (2γ + log 8)/π`.
///
/// The constant part is subtracted exactly in `Q + Q/π` with γ and log 8 to
/// 50 digits before rounding, so the large cancelling parts of `a(x)` do not
/// lose precision.
pub fn asymptotic_residual(table: &PotentialTable, x: &Site) -> Result<f64> {
    if *x == (0, 0) {
        return Err(Error::OutOfRange("the origin".into()));
    }
    let a = table.at(x)?;
    let gamma = parse_rational(EULER_GAMMA_50).expect("constant parses");
    let ln8 = parse_rational(LN_8_50).expect("constant parses");
    let shifted = PiRational::new(a.p.clone(), &a.q - rint(2) * gamma - ln8);
    let norm2 = (x.0 * x.0 + x.1 * x.1) as f64;
    Ok(shifted.to_f64() - norm2.ln() / std::f64::consts::PI)
}

/// `max |residual(x)| ‖x‖²` over the ring `max(|i|, |j|) = n` of the table.
/// The next term of the expansion is of order `‖x‖^{-2}`, so this stays
/// bounded as `n` grows.
pub fn residual_scale(table: &PotentialTable, n: usize) -> Result<f64> {
    if n == 0 || n > table.radius() {
        return Err(Error::OutOfRange(format!("ring {n} of a radius-{} table", table.radius())));
    }
    let mut worst: f64 = 0.0;
    for j in 0..=n as i64 {
        let x = (n as i64, j);
        let norm2 = (x.0 * x.0 + x.1 * x.1) as f64;
        worst = worst.max(asymptotic_residual(table, &x)?.abs() * norm2);
    }
    Ok(worst)
}

/// Two-term expansion `(2/π) log|x| + (2γ + log 8)/π`; error `O(|x|^{-2})`.
pub fn asymptotic_potential(x: &Site) -> f64 {
    if *x == (0, 0) {
        return 0.0;
    }
    let norm2 = (x.0 * x.0 + x.1 * x.1) as f64;
    norm2.ln() / std::f64::consts::PI + ASYMPTOTIC_CONSTANT
}

/// `G_0(x, y) = E_x[L^y_{T_0}] = a(x) + a(y) − a(y − x)` for `x ≠ 0`.
pub fn green_from_potential(table: &PotentialTable, x: &Site, y: &Site) -> Result<PiRational> {
    let ax = table.at(x)?;
    let ay = table.at(y)?;
    let d = table.at(&(y.0 - x.0, y.1 - x.1))?;
    Ok(&(ax + ay) - d)
}

/// Position after `m` steps of the walk. In the rotated coordinates
/// `u = i + j`, `v = i − j` the walk is a pair of independent ±1 walks.
pub fn block_step<R: Rng + ?Sized>(x: &Site, m: u64, rng: &mut R) -> Site {
    let du = 2 * binomial_half(m, rng) as i64 - m as i64;
    let dv = 2 * binomial_half(m, rng) as i64 - m as i64;
    (x.0 + (du + dv) / 2, x.1 + (du - dv) / 2)
}

fn binomial_half<R: Rng + ?Sized>(m: u64, rng: &mut R) -> u64 {
    if m <= 64 {
        let bits: u64 = rng.gen();
        let mask = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
        return (bits & mask).count_ones() as u64;
    }
    Binomial::new(m, 0.5).expect("valid binomial").sample(rng)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialMcConfig {
    /// Runs are closed off once the walk is this far from the origin.
    pub escape_radius: Option<f64>,
    pub step_cap: u64,
}

impl Default for PotentialMcConfig {
    fn default() -> Self {
        Self { escape_radius: None, step_cap: 10_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PotentialMcEstimate {
    pub y: Site,
    pub estimate: McEstimate,
    /// `G_0(x, y)` from the exact table, the finite-`y` value the estimator
    /// targets; it tends to `a(x)` as `|y| → ∞`.
    pub reference: f64,
}

/// Monte Carlo estimates of `E_x[L^y_{T_0}]` for each `y`.
///
/// Each run is simulated exactly until it leaves the disc of radius `R`
/// (default `2 max(|x|, |y|) + 32`). From a site `z` outside, the walk
/// meets `y` before the origin with probability
/// `h(z) = 1/2 + (a(z) − a(z − y))/(2 a(y))`, the bounded harmonic function
/// with `h(0) = 0`, `h(y) = 1`; the run jumps to `y` or stops accordingly.
/// Far from the origin `a` is evaluated by its two-term expansion, which is
/// the only approximation.
pub fn potential_mc(
    walk: &Z2Walk,
    x: &Site,
    ys: &[Site],
    trajectories: u64,
    stream: &SeedStream,
    config: &PotentialMcConfig,
) -> Result<Vec<PotentialMcEstimate>> {
    if *x == (0, 0) {
        return Err(Error::Precondition("potential_mc needs x different from the origin".into()));
    }
    let norm = |z: &Site| ((z.0 * z.0 + z.1 * z.1) as f64).sqrt();
    let mut out = Vec::with_capacity(ys.len());
    for (k, y) in ys.iter().enumerate() {
        let radius = config.escape_radius.unwrap_or(2.0 * norm(x).max(norm(y)) + 32.0);
        let targets = [(0, 0), *y];
        let a_y = walk.potential_f64(y);
        let sub = stream.fork(k as u64 + 1);
        let mut acc = Accumulator::default();
        for t in 0..trajectories {
            let mut rng = sub.rng(t);
            let mut z = *x;
            let mut visits = 0u64;
            let mut moves = 0u64;
            loop {
                if z == *y {
                    visits += 1;
                }
                if z == (0, 0) {
                    break;
                }
                moves += 1;
                if moves > config.step_cap {
                    return Err(Error::Runaway { cap: config.step_cap });
                }
                if *y != (0, 0) && norm(&z) >= radius {
                    let h = 0.5 + (walk.potential_f64(&z) - walk.potential_f64(&(z.0 - y.0, z.1 - y.1))) / (2.0 * a_y);
                    if rng.gen::<f64>() < h {
                        z = *y;
                        continue;
                    }
                    break;
                }
                let c = targets.iter().map(|t| t.0.abs_diff(z.0) + t.1.abs_diff(z.1)).min().unwrap_or(1);
                z = if c >= 3 { block_step(&z, c - 1, &mut rng) } else { step_once(&z, &mut rng) };
            }
            acc.push(visits as f64);
        }
        let table = walk.table(
            [x.0.abs(), x.1.abs(), y.0.abs(), y.1.abs(), (y.0 - x.0).abs(), (y.1 - x.1).abs()]
                .into_iter()
                .max()
                .unwrap_or(1) as usize,
        );
        let reference = green_from_potential(&table, x, y)?.to_f64();
        out.push(PotentialMcEstimate { y: *y, estimate: acc.estimate(), reference });
    }
    Ok(out)
}

fn step_once<R: Rng + ?Sized>(z: &Site, rng: &mut R) -> Site {
    match rng.gen_range(0..4u8) {
        0 => (z.0 - 1, z.1),
        1 => (z.0 + 1, z.1),
        2 => (z.0, z.1 - 1),
        _ => (z.0, z.1 + 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        let t = potential_table(3);
        assert_eq!(*t.get(1, 1).unwrap(), PiRational::inv_pi(rint(4)));
        assert_eq!(*t.get(2, 0).unwrap(), PiRational::new(rint(4), rint(-8)));
        assert_eq!(*t.get(1, 2).unwrap(), PiRational::new(rint(-1), rint(8)));
        assert_eq!(*t.get(-2, 1).unwrap(), PiRational::new(rint(-1), rint(8)));
    }

    #[test]
    fn block_step_keeps_parity() {
        let mut rng = SeedStream::new(1).rng(0);
        for m in [1u64, 5, 64, 65, 300] {
            let z = block_step(&(0, 0), m, &mut rng);
            assert_eq!((z.0 + z.1).rem_euclid(2) as u64, m % 2);
            assert!(z.0.unsigned_abs() + z.1.unsigned_abs() <= m);
        }
    }
}
