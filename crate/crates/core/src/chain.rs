//! Countable-state chains with finite-support transitions.

use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Error, Result};
use crate::{to_f64, Rational};

/// Default cap on the number of enumerated paths.
pub const DEFAULT_PATH_CAP: u64 = 10_000_000;

pub trait Chain: Send + Sync {
    /// Ordered so that iteration over windows is deterministic.
    type State: Clone + Eq + Hash + Ord + Debug + Send + Sync;

    fn label(&self) -> String;

    fn check_state(&self, _x: &Self::State) -> Result<()> {
        Ok(())
    }

    /// Exact transition probabilities out of `x`, sorted by state.
    fn successors(&self, x: &Self::State) -> Result<Vec<(Self::State, Rational)>>;

    /// Floating-point transition probabilities; `x` must be a valid state.
    fn successors_f64(&self, x: &Self::State) -> Vec<(Self::State, f64)> {
        self.successors(x)
            .expect("successors of a validated state")
            .into_iter()
            .map(|(y, p)| (y, to_f64(&p)))
            .collect()
    }

    fn predecessors(&self, _x: &Self::State) -> Option<Vec<(Self::State, Rational)>> {
        None
    }

    fn stationary(&self, _x: &Self::State) -> Option<Rational> {
        None
    }

    fn parse_state(&self, s: &str) -> Result<Self::State>;

    fn format_state(&self, x: &Self::State) -> String;

    /// Graph distance; windows are balls for this distance.
    fn distance(&self, a: &Self::State, b: &Self::State) -> u64;

    fn sample_next<R: Rng + ?Sized>(&self, x: &Self::State, rng: &mut R) -> Self::State {
        let succ = self.successors_f64(x);
        let mut u: f64 = rng.gen();
        for (y, p) in &succ {
            if u < *p {
                return y.clone();
            }
            u -= p;
        }
        succ.last().expect("nonempty successor list").0.clone()
    }

    /// True when a walk that leaves any ball must re-enter it through the
    /// state it left from (path-like and tree-like chains). Under this
    /// property exits can be folded into self-loops without changing
    /// occupation counts inside the ball.
    fn exits_return_to_gateway(&self) -> bool {
        false
    }

    /// Jumps forward to the next position of the walk at which it can be
    /// on a target or outside `ball`, skipping a stretch that provably
    /// visits neither, with the exact law of the skipped excursion's
    /// endpoint. `None` when no shortcut applies; the caller then takes
    /// one ordinary step.
    fn fast_forward<R: Rng + ?Sized>(
        &self,
        _x: &Self::State,
        _targets: &[Self::State],
        _ball: Option<(&Self::State, u64)>,
        _rng: &mut R,
    ) -> Option<Self::State> {
        None
    }

    /// Whether every path from `x` to `x0` passes through `y`.
    fn separates(&self, _x: &Self::State, _x0: &Self::State, _y: &Self::State) -> Option<bool> {
        None
    }
}

/// `X_0 .. X_n` of one realisation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trajectory<S> {
    pub states: Vec<S>,
}

impl<S: Clone + PartialEq> Trajectory<S> {
    pub fn start(&self) -> &S {
        &self.states[0]
    }

    /// Number of transitions.
    pub fn len(&self) -> usize {
        self.states.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.states.len() == 1
    }

    pub fn last(&self) -> &S {
        self.states.last().expect("trajectory has a start")
    }

    /// `L^y_n`: visits to `y` at times `0..=n`.
    pub fn occupation(&self, y: &S, n: usize) -> usize {
        self.states.iter().take(n + 1).filter(|s| *s == y).count()
    }

    /// `T_y`, zero when the walk starts at `y`.
    pub fn first_hit(&self, y: &S) -> Option<usize> {
        self.states.iter().position(|s| s == y)
    }

    /// `T'_y`, the first visit at a time `>= 1`.
    pub fn first_return(&self, y: &S) -> Option<usize> {
        self.states.iter().skip(1).position(|s| s == y).map(|k| k + 1)
    }

    /// Time of the `p`-th visit to `y` (`p >= 1`, time 0 included).
    pub fn hitting_time(&self, y: &S, p: usize) -> Option<usize> {
        if p == 0 {
            return None;
        }
        self.states.iter().enumerate().filter(|(_, s)| *s == y).nth(p - 1).map(|(k, _)| k)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathWeight<S> {
    pub path: Trajectory<S>,
    pub probability: Rational,
}

pub fn step_distribution<C: Chain>(chain: &C, x: &C::State) -> Result<Vec<(C::State, Rational)>> {
    chain.check_state(x)?;
    chain.successors(x)
}

/// Checks that the row out of `x` is a probability vector, exactly.
pub fn check_row<C: Chain>(chain: &C, x: &C::State) -> Result<()> {
    let succ = chain.successors(x)?;
    let mut sum = Rational::zero();
    for (_, p) in &succ {
        if *p <= Rational::zero() {
            return Err(Error::RowSum { state: chain.format_state(x), sum: format!("nonpositive entry {p}") });
        }
        sum += p;
    }
    if !sum.is_one() {
        return Err(Error::RowSum { state: chain.format_state(x), sum: sum.to_string() });
    }
    Ok(())
}

/// Calls `f` on every length-`n` path from `x` with its probability.
pub fn for_each_path<C, F>(chain: &C, x: &C::State, n: usize, cap: u64, mut f: F) -> Result<u64>
where
    C: Chain,
    F: FnMut(&[C::State], &Rational),
{
    chain.check_state(x)?;
    let mut path = vec![x.clone()];
    let mut count = 0u64;
    walk_paths(chain, &mut path, &Rational::one(), n, cap, &mut count, &mut f)?;
    Ok(count)
}

fn walk_paths<C, F>(
    chain: &C,
    path: &mut Vec<C::State>,
    prob: &Rational,
    remaining: usize,
    cap: u64,
    count: &mut u64,
    f: &mut F,
) -> Result<()>
where
    C: Chain,
    F: FnMut(&[C::State], &Rational),
{
    if remaining == 0 {
        *count += 1;
        if *count > cap {
            return Err(Error::BudgetExceeded { cap });
        }
        f(path, prob);
        return Ok(());
    }
    let here = path.last().expect("nonempty path").clone();
    for (y, p) in chain.successors(&here)? {
        path.push(y);
        walk_paths(chain, path, &(prob * &p), remaining - 1, cap, count, f)?;
        path.pop();
    }
    Ok(())
}

pub fn enumerate_paths<C: Chain>(
    chain: &C,
    x: &C::State,
    n: usize,
    cap: u64,
) -> Result<Vec<PathWeight<C::State>>> {
    let mut out = Vec::new();
    for_each_path(chain, x, n, cap, |path, p| {
        out.push(PathWeight { path: Trajectory { states: path.to_vec() }, probability: p.clone() });
    })?;
    Ok(out)
}

/// Law of `X_n` under `P_x`, exactly.
pub fn distribution_after<C: Chain>(chain: &C, x: &C::State, n: usize) -> Result<BTreeMap<C::State, Rational>> {
    chain.check_state(x)?;
    let mut dist = BTreeMap::from([(x.clone(), Rational::one())]);
    for _ in 0..n {
        let mut next = BTreeMap::new();
        for (z, mass) in &dist {
            for (y, p) in chain.successors(z)? {
                *next.entry(y).or_insert_with(Rational::zero) += mass * p;
            }
        }
        dist = next;
    }
    Ok(dist)
}

pub fn simulate<C: Chain, R: Rng + ?Sized>(chain: &C, x: &C::State, steps: usize, rng: &mut R) -> Trajectory<C::State> {
    let mut states = Vec::with_capacity(steps + 1);
    states.push(x.clone());
    let mut z = x.clone();
    for _ in 0..steps {
        z = chain.sample_next(&z, rng);
        states.push(z.clone());
    }
    Trajectory { states }
}

/// All states within graph distance `radius` of `center`, sorted.
pub fn ball<C: Chain>(chain: &C, center: &C::State, radius: u64) -> Result<Vec<C::State>> {
    chain.check_state(center)?;
    let mut seen = HashSet::from([center.clone()]);
    let mut queue = VecDeque::from([center.clone()]);
    while let Some(z) = queue.pop_front() {
        for (y, _) in chain.successors(&z)? {
            if !seen.contains(&y) && chain.distance(center, &y) <= radius {
                seen.insert(y.clone());
                queue.push_back(y);
            }
        }
    }
    let mut out: Vec<_> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct StationaryReport<S> {
    pub checked: usize,
    /// `(y, β(y), Σ_x p_{x,y} β(x))` for every failing state.
    pub violations: Vec<(S, Rational, Rational)>,
}

impl<S> StationaryReport<S> {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exact check of `β(y) = Σ_x p_{x,y} β(x)` on a window.
pub fn verify_stationary<C: Chain>(chain: &C, window: &[C::State]) -> Result<StationaryReport<C::State>> {
    let mut violations = Vec::new();
    for y in window {
        let preds = chain.predecessors(y).ok_or_else(|| Error::MissingPredecessors(chain.format_state(y)))?;
        let beta_y = chain.stationary(y).ok_or_else(|| Error::MissingPredecessors(chain.format_state(y)))?;
        let mut inflow = Rational::zero();
        for (x, p) in preds {
            let beta_x = chain.stationary(&x).ok_or_else(|| Error::MissingPredecessors(chain.format_state(&x)))?;
            inflow += p * beta_x;
        }
        if inflow != beta_y {
            violations.push((y.clone(), beta_y, inflow));
        }
    }
    Ok(StationaryReport { checked: window.len(), violations })
}

/// Checks that the predecessor lists agree with the successor lists on a
/// window.
pub fn predecessors_consistent<C: Chain>(chain: &C, window: &[C::State]) -> Result<bool> {
    for y in window {
        let Some(preds) = chain.predecessors(y) else {
            return Err(Error::MissingPredecessors(chain.format_state(y)));
        };
        for (x, p) in preds {
            let forward = chain.successors(&x)?.into_iter().find(|(z, _)| z == y).map(|(_, q)| q);
            if forward != Some(p) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Running mean and variance (Welford).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Accumulator {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn push(&mut self, v: f64) {
        self.n += 1;
        let d = v - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (v - self.mean);
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Standard error of the mean.
    pub fn stderr(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
    }

    pub fn estimate(&self) -> McEstimate {
        McEstimate { mean: self.mean, stderr: self.stderr(), samples: self.n }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

impl McEstimate {
    /// Whether `value` lies within `k` standard errors. A zero standard
    /// error demands exact agreement up to rounding.
    pub fn agrees(&self, value: f64, k: f64) -> bool {
        (self.mean - value).abs() <= k * self.stderr + 1e-12 * value.abs().max(1.0)
    }
}
