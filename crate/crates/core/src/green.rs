//! Killed Green functions `G_{x0}(x, y) = E_x[L^y_{T'_{x0} − 1}]` and Martin
//! kernels `L_{x0}(x, y) = G_{x0}(x, y) / G_{x0}(x0, y)`.
//!
//! Convention: the visit at time 0 counts, and the walk is killed when it
//! returns to `x0` at a time `>= 1`. Hence `G_{x0}(x0, x0) = 1`, and
//! `G_{x0}(·, y)` is column `y` of `(I − P̂)^{-1}`, where `P̂` is `P` with
//! every transition into `x0` removed.

use std::collections::HashMap;

use crate::chain::{ball, Accumulator, Chain};
use crate::error::{Error, Result};
use crate::linalg::{self, SparseKernel};
use crate::rng::SeedStream;
use crate::{to_f64, Rational};

pub const DEFAULT_STEP_CAP: u64 = 10_000_000;
/// Denominator tolerance of [`martin_kernel`].
pub const KERNEL_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    ExactSolve,
    MonteCarlo,
    ClosedForm,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ExactSolve => "exact-solve",
            Method::MonteCarlo => "monte-carlo",
            Method::ClosedForm => "closed-form",
        }
    }
}

/// What happens to transitions that leave the window.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Policy {
    /// Exits are absorbed; solutions are lower bounds, nondecreasing in the
    /// window.
    Kill,
    /// Exits become self-loops at the state they leave from. Exact on
    /// chains whose excursions out of a ball come back through their exit
    /// point (see [`Chain::exits_return_to_gateway`]).
    Reflect,
}

impl Policy {
    pub fn as_str(&self) -> &'static str {
        match self {
            Policy::Kill => "kill",
            Policy::Reflect => "reflect",
        }
    }
}

/// A finite ball of states on which the linear system is solved.
#[derive(Clone, Debug, PartialEq)]
pub struct Truncation<S> {
    pub center: S,
    pub radius: u64,
    pub policy: Policy,
    /// The solve is repeated on the ball of radius `radius + margin` and
    /// the largest change reported; 0 disables the diagnostic.
    pub margin: u64,
}

impl<S> Truncation<S> {
    pub fn new(center: S, radius: u64, policy: Policy) -> Self {
        Self { center, radius, policy, margin: 0 }
    }

    pub fn with_margin(mut self, margin: u64) -> Self {
        self.margin = margin;
        self
    }

    /// Reflect where it is exact, kill elsewhere.
    pub fn preferred<C: Chain<State = S>>(chain: &C, center: S, radius: u64) -> Self {
        let policy = if chain.exits_return_to_gateway() { Policy::Reflect } else { Policy::Kill };
        Self::new(center, radius, policy)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WindowInfo {
    pub radius: u64,
    pub states: usize,
    pub policy: Policy,
    /// Largest change of the reported values when the window grows by
    /// the configured margin.
    pub enlargement_delta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GreenResult {
    pub value: f64,
    pub method: Method,
    /// Zero for solves and closed forms.
    pub stderr: f64,
    pub samples: Option<u64>,
    pub window: Option<WindowInfo>,
    /// Exact value when it was computed in rational arithmetic.
    pub exact: Option<Rational>,
}

impl GreenResult {
    pub fn closed_form(v: Rational) -> Self {
        Self { value: to_f64(&v), method: Method::ClosedForm, stderr: 0.0, samples: None, window: None, exact: Some(v) }
    }
}

struct Window<S> {
    states: Vec<S>,
    index: HashMap<S, usize>,
}

impl<S: Clone + Eq + std::hash::Hash> Window<S> {
    fn new(states: Vec<S>) -> Self {
        let index = states.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Self { states, index }
    }

    fn idx(&self, s: &S) -> Option<usize> {
        self.index.get(s).copied()
    }
}

fn build_window<C: Chain>(chain: &C, trunc: &Truncation<C::State>, radius: u64) -> Result<Window<C::State>> {
    if trunc.policy == Policy::Reflect && !chain.exits_return_to_gateway() {
        return Err(Error::InvalidParameter(format!(
            "reflecting truncation is not exact for chain {}",
            chain.label()
        )));
    }
    Ok(Window::new(ball(chain, &trunc.center, radius)?))
}

/// `P̂` on the window: transitions into `kill` removed, exits handled by
/// the truncation policy.
fn kernel_f64<C: Chain>(chain: &C, w: &Window<C::State>, kill: Option<&C::State>, policy: Policy) -> SparseKernel<f64> {
    let mut rows = Vec::with_capacity(w.states.len());
    for (i, s) in w.states.iter().enumerate() {
        let mut row = Vec::new();
        let mut exit = 0.0;
        for (z, p) in chain.successors_f64(s) {
            if Some(&z) == kill {
                continue;
            }
            match w.idx(&z) {
                Some(j) => row.push((j, p)),
                None => exit += p,
            }
        }
        if policy == Policy::Reflect && exit > 0.0 {
            row.push((i, exit));
        }
        rows.push(row);
    }
    SparseKernel { rows }
}

fn kernel_exact<C: Chain>(
    chain: &C,
    w: &Window<C::State>,
    kill: Option<&C::State>,
    policy: Policy,
) -> Result<SparseKernel<Rational>> {
    let mut rows = Vec::with_capacity(w.states.len());
    for (i, s) in w.states.iter().enumerate() {
        let mut row = Vec::new();
        let mut exit = Rational::from_integer(0.into());
        for (z, p) in chain.successors(s)? {
            if Some(&z) == kill {
                continue;
            }
            match w.idx(&z) {
                Some(j) => row.push((j, p)),
                None => exit += p,
            }
        }
        if policy == Policy::Reflect && exit != Rational::from_integer(0.into()) {
            row.push((i, exit));
        }
        rows.push(row);
    }
    Ok(SparseKernel { rows })
}

fn locate<S: Clone + Eq + std::hash::Hash>(w: &Window<S>, s: &S, fmt: impl Fn(&S) -> String) -> Result<usize> {
    w.idx(s).ok_or_else(|| Error::OutsideWindow(fmt(s)))
}

fn solve_queries<C: Chain>(
    chain: &C,
    kill: Option<&C::State>,
    queries: &[(C::State, C::State)],
    trunc: &Truncation<C::State>,
    radius: u64,
) -> Result<(Vec<f64>, usize)> {
    let w = build_window(chain, trunc, radius)?;
    if let Some(k) = kill {
        locate(&w, k, |s| chain.format_state(s))?;
    }
    let mut columns: Vec<usize> = Vec::new();
    let mut pairs = Vec::with_capacity(queries.len());
    for (x, y) in queries {
        let xi = locate(&w, x, |s| chain.format_state(s))?;
        let yi = locate(&w, y, |s| chain.format_state(s))?;
        let k = match columns.iter().position(|c| *c == yi) {
            Some(k) => k,
            None => {
                columns.push(yi);
                columns.len() - 1
            }
        };
        pairs.push((xi, k));
    }
    let kernel = kernel_f64(chain, &w, kill, trunc.policy);
    let sol = linalg::solve_f64(&kernel, &columns)?;
    Ok((pairs.iter().map(|(xi, k)| sol[*k][*xi]).collect(), w.states.len()))
}

fn solve_with_diagnostic<C: Chain>(
    chain: &C,
    kill: Option<&C::State>,
    queries: &[(C::State, C::State)],
    trunc: &Truncation<C::State>,
) -> Result<Vec<GreenResult>> {
    let (values, states) = solve_queries(chain, kill, queries, trunc, trunc.radius)?;
    let delta = if trunc.margin > 0 {
        let (bigger, _) = solve_queries(chain, kill, queries, trunc, trunc.radius + trunc.margin)?;
        Some(values.iter().zip(&bigger).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    } else {
        None
    };
    let info = WindowInfo { radius: trunc.radius, states, policy: trunc.policy, enlargement_delta: delta };
    Ok(values
        .into_iter()
        .map(|v| GreenResult {
            value: v.max(0.0),
            method: Method::ExactSolve,
            stderr: 0.0,
            samples: None,
            window: Some(info.clone()),
            exact: None,
        })
        .collect())
}

/// Solves `(I − P̂) g_y = e_y` on the truncation window for every query
/// `(x, y)` and returns `g_y(x)`.
pub fn green_solve<C: Chain>(
    chain: &C,
    x0: &C::State,
    queries: &[(C::State, C::State)],
    trunc: &Truncation<C::State>,
) -> Result<Vec<GreenResult>> {
    solve_with_diagnostic(chain, Some(x0), queries, trunc)
}

/// Rational version of [`green_solve`] by sparse elimination, leaves of
/// the window first.
pub fn green_solve_exact<C: Chain>(
    chain: &C,
    x0: &C::State,
    queries: &[(C::State, C::State)],
    trunc: &Truncation<C::State>,
) -> Result<Vec<Rational>> {
    let w = build_window(chain, trunc, trunc.radius)?;
    locate(&w, x0, |s| chain.format_state(s))?;
    let mut columns: Vec<usize> = Vec::new();
    let mut pairs = Vec::with_capacity(queries.len());
    for (x, y) in queries {
        let xi = locate(&w, x, |s| chain.format_state(s))?;
        let yi = locate(&w, y, |s| chain.format_state(s))?;
        let k = columns.iter().position(|c| *c == yi).unwrap_or_else(|| {
            columns.push(yi);
            columns.len() - 1
        });
        pairs.push((xi, k));
    }
    let kernel = kernel_exact(chain, &w, Some(x0), trunc.policy)?;
    let mut order: Vec<usize> = (0..w.states.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(chain.distance(&trunc.center, &w.states[i])));
    let sol = linalg::solve_exact(&kernel, &columns, &order)?;
    Ok(pairs.iter().map(|(xi, k)| sol[*k][*xi].clone()).collect())
}

/// Green function `Σ_n Q^n(x, y)` of a transient chain on a killed window
/// (no base point is removed).
pub fn transient_green_solve<C: Chain>(
    chain: &C,
    queries: &[(C::State, C::State)],
    trunc: &Truncation<C::State>,
) -> Result<Vec<GreenResult>> {
    solve_with_diagnostic(chain, None, queries, trunc)
}

#[derive(Clone, Debug, PartialEq)]
pub struct McConfig<S> {
    pub trajectories: u64,
    pub step_cap: u64,
    /// Kill runs leaving the ball `(center, radius)`.
    pub window: Option<(S, u64)>,
}

impl<S> McConfig<S> {
    pub fn new(trajectories: u64) -> Self {
        Self { trajectories, step_cap: DEFAULT_STEP_CAP, window: None }
    }

    pub fn killed_outside(mut self, center: S, radius: u64) -> Self {
        self.window = Some((center, radius));
        self
    }
}

/// One draw of `L^y_{T'_{x0} − 1}` started from `x`.
pub fn green_sample<C: Chain, R: rand::Rng + ?Sized>(
    chain: &C,
    x0: &C::State,
    x: &C::State,
    y: &C::State,
    config: &McConfig<C::State>,
    rng: &mut R,
) -> Result<u64> {
    let targets = [x0.clone(), y.clone()];
    let ball = config.window.as_ref().map(|(c, r)| (c, *r));
    let mut z = x.clone();
    let mut visits = 0u64;
    let mut moves = 0u64;
    loop {
        if moves >= 1 && z == *x0 {
            break;
        }
        if let Some((c, r)) = ball {
            if chain.distance(c, &z) > r {
                break;
            }
        }
        if z == *y {
            visits += 1;
        }
        moves += 1;
        if moves > config.step_cap {
            return Err(Error::Runaway { cap: config.step_cap });
        }
        z = match chain.fast_forward(&z, &targets, ball, rng) {
            Some(next) => next,
            None => chain.sample_next(&z, rng),
        };
    }
    Ok(visits)
}

/// Sample mean of `L^y_{T'_{x0} − 1}` over independent runs from `x`.
pub fn green_mc<C: Chain>(
    chain: &C,
    x0: &C::State,
    x: &C::State,
    y: &C::State,
    config: &McConfig<C::State>,
    stream: &SeedStream,
) -> Result<GreenResult> {
    if config.trajectories == 0 {
        return Err(Error::InvalidParameter("at least one trajectory is needed".into()));
    }
    chain.check_state(x0)?;
    chain.check_state(x)?;
    chain.check_state(y)?;
    let mut acc = Accumulator::default();
    for t in 0..config.trajectories {
        let mut rng = stream.rng(t);
        acc.push(green_sample(chain, x0, x, y, config, &mut rng)? as f64);
    }
    let window = config.window.as_ref().map(|(_, r)| WindowInfo {
        radius: *r,
        states: 0,
        policy: Policy::Kill,
        enlargement_delta: None,
    });
    Ok(GreenResult {
        value: acc.mean(),
        method: Method::MonteCarlo,
        stderr: acc.stderr(),
        samples: Some(acc.count()),
        window,
        exact: None,
    })
}

pub enum KernelMethod<'a, S> {
    Solve(&'a Truncation<S>),
    MonteCarlo(&'a McConfig<S>, &'a SeedStream),
}

/// `L_{x0}(x, y)`; Monte Carlo errors are propagated to first order, the
/// numerator and denominator using independent streams.
pub fn martin_kernel<C: Chain>(
    chain: &C,
    x0: &C::State,
    x: &C::State,
    y: &C::State,
    method: KernelMethod<'_, C::State>,
) -> Result<GreenResult> {
    match method {
        KernelMethod::Solve(trunc) => {
            let r = green_solve(chain, x0, &[(x.clone(), y.clone()), (x0.clone(), y.clone())], trunc)?;
            let (num, den) = (&r[0], &r[1]);
            if den.value.abs() < KERNEL_TOLERANCE {
                return Err(Error::ZeroDenominator { value: den.value, tol: KERNEL_TOLERANCE });
            }
            Ok(GreenResult { value: num.value / den.value, ..num.clone() })
        }
        KernelMethod::MonteCarlo(config, stream) => {
            let num = green_mc(chain, x0, x, y, config, &stream.fork(1))?;
            let den = green_mc(chain, x0, x0, y, config, &stream.fork(2))?;
            if den.value.abs() < KERNEL_TOLERANCE {
                return Err(Error::ZeroDenominator { value: den.value, tol: KERNEL_TOLERANCE });
            }
            let ratio = num.value / den.value;
            let rel = (num.stderr / den.value).powi(2) + (ratio * den.stderr / den.value).powi(2);
            Ok(GreenResult { value: ratio, stderr: rel.sqrt(), ..num })
        }
    }
}
