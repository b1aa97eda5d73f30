//! Doob transforms of the measures `Q^{x0,φ}`: the transient chains
//! `q_{x,y} = ψ(y)/ψ(x) p_{x,y}` off `x0` and `q_{x0,y} = r ψ(y)/ψ(x0) p_{x0,y}`
//! with `ψ = r m/(1−r) + φ`, `m = E_{x0}[φ(X_1)]`.
//!
//! For a boundary profile `m = 1/β(x0)` and `ψ` is
//! `(1/β(x0)) (r/(1−r) + L_{x0}(·, α) 1{· ≠ x0})`.

use std::sync::Arc;

use num_traits::{One, Zero};
use crate::chain::{for_each_path, Accumulator, Chain};
use crate::error::{Error, Result};
use crate::martin::{mean_next, profile_from_boundary, total_mass, HarmonicProfile};
use crate::models::ClosedForms;
use crate::pirational::PiRational;
use crate::rng::SeedStream;
use crate::{to_f64, Rational};

pub type RationalFn<S> = Arc<dyn Fn(&S) -> Rational + Send + Sync>;

#[derive(Clone, Debug, PartialEq)]
pub struct TransformParams<S, B> {
    pub x0: S,
    pub alpha: B,
    pub r: Rational,
}

impl<S, B> TransformParams<S, B> {
    pub fn new(x0: S, alpha: B, r: Rational) -> Result<Self> {
        check_r(&r)?;
        Ok(Self { x0, alpha, r })
    }
}

fn check_r(r: &Rational) -> Result<()> {
    if *r <= Rational::zero() || *r >= Rational::one() {
        return Err(Error::InvalidParameter(format!("r must lie in (0, 1), got {r}")));
    }
    Ok(())
}

/// The transformed kernel, usable wherever a [`Chain`] is accepted.
#[derive(Clone, Debug)]
pub struct TransformedChain<C: Chain> {
    base: C,
    profile: HarmonicProfile<C::State>,
    r: Rational,
    r_f64: f64,
    /// `ψ(x0) = r m / (1 − r)`.
    psi0: PiRational,
    psi0_f64: f64,
    mass: PiRational,
}

impl<C> TransformedChain<C>
where
    C: Chain + Clone,
    C::State: 'static,
{
    pub fn from_profile(base: C, profile: HarmonicProfile<C::State>, r: Rational) -> Result<Self> {
        check_r(&r)?;
        if !profile.evaluate(&profile.base).is_zero() {
            return Err(Error::Precondition("φ must vanish at its base point".into()));
        }
        let mass = total_mass(&base, &profile)?;
        if mass.is_zero() {
            return Err(Error::Precondition("φ has zero total mass".into()));
        }
        let psi0 = mass.scale(&(&r / (Rational::one() - &r)));
        let psi0_f64 = psi0.to_f64();
        Ok(Self { r_f64: to_f64(&r), base, profile, r, psi0, psi0_f64, mass })
    }

    pub fn base_chain(&self) -> &C {
        &self.base
    }

    pub fn x0(&self) -> &C::State {
        &self.profile.base
    }

    pub fn r(&self) -> &Rational {
        &self.r
    }

    pub fn profile(&self) -> &HarmonicProfile<C::State> {
        &self.profile
    }

    /// `E_{x0}[φ(X_1)]`.
    pub fn mass(&self) -> &PiRational {
        &self.mass
    }

    pub fn psi(&self, x: &C::State) -> PiRational {
        &self.psi0 + &self.profile.evaluate(x)
    }

    pub fn psi_f64(&self, x: &C::State) -> f64 {
        self.psi0_f64 + self.profile.evaluate_f64(x)
    }

    fn exact_ratios(&self, x: &C::State) -> Vec<(C::State, f64)> {
        let px = self.psi_rational(x).expect("ψ grows past f64 only on chains with rational ψ");
        let r = if x == self.x0() { self.r_f64 } else { 1.0 };
        self.base
            .successors_f64(x)
            .into_iter()
            .map(|(y, p)| {
                let q = to_f64(&(self.psi_rational(&y).expect("rational ψ") / &px));
                (y, p * q * r)
            })
            .collect()
    }

    pub fn psi_rational(&self, x: &C::State) -> Result<Rational> {
        let v = self.psi(x);
        v.as_rational().cloned().ok_or_else(|| Error::NotRational(format!("ψ({}) = {v}", self.base.format_state(x))))
    }

    /// Exact row check on a window: `Σ_y p_{x,y} ψ(y) = ψ(x)` off `x0` and
    /// `r Σ_y p_{x0,y} ψ(y) = ψ(x0)`. Done in `Q + Q/π`, so it also covers
    /// chains whose transition probabilities are irrational.
    pub fn check_rows(&self, window: &[C::State]) -> Result<()> {
        for x in window {
            let mut s = PiRational::zero();
            for (y, p) in self.base.successors(x)? {
                s += &self.psi(&y).scale(&p);
            }
            if x == self.x0() {
                s = s.scale(&self.r);
            }
            let psi = self.psi(x);
            if s != psi {
                return Err(Error::RowSum {
                    state: self.base.format_state(x),
                    sum: format!("({}) / ({psi})", s),
                });
            }
        }
        Ok(())
    }
}

impl<C> TransformedChain<C>
where
    C: ClosedForms + Clone + 'static,
    C::State: 'static,
{
    pub fn from_boundary(base: C, params: &TransformParams<C::State, C::Boundary>) -> Result<Self> {
        let profile = profile_from_boundary(&base, &params.x0, &params.alpha)?;
        Self::from_profile(base, profile, params.r.clone())
    }
}

impl<C> Chain for TransformedChain<C>
where
    C: Chain + Clone,
    C::State: 'static,
{
    type State = C::State;

    fn label(&self) -> String {
        format!("{} transformed (r={})", self.base.label(), self.r)
    }

    fn check_state(&self, x: &C::State) -> Result<()> {
        self.base.check_state(x)
    }

    fn successors(&self, x: &C::State) -> Result<Vec<(C::State, Rational)>> {
        let px = self.psi_rational(x)?;
        let factor = if x == self.x0() { &self.r / &px } else { Rational::one() / &px };
        self.base
            .successors(x)?
            .into_iter()
            .map(|(y, p)| Ok((y.clone(), p * self.psi_rational(&y)? * &factor)))
            .collect()
    }

    fn successors_f64(&self, x: &C::State) -> Vec<(C::State, f64)> {
        let px = self.psi_f64(x);
        let factor = if x == self.x0() { self.r_f64 / px } else { 1.0 / px };
        let mut out: Vec<(C::State, f64)> =
            self.base.successors_f64(x).into_iter().map(|(y, p)| { let w = p * self.psi_f64(&y) * factor; (y, w) }).collect();
        if !out.iter().all(|(_, w)| w.is_finite()) {
            // ψ has outgrown f64 (2^j on the tree, 2^x on bang-bang); the
            // ratios ψ(y)/ψ(x) are still moderate, so take them exactly.
            out = self.exact_ratios(x);
        }
        // Guard against rounding so that sampling sees a probability vector.
        let total: f64 = out.iter().map(|(_, p)| p).sum();
        for (_, p) in &mut out {
            *p /= total;
        }
        out
    }

    fn parse_state(&self, s: &str) -> Result<C::State> {
        self.base.parse_state(s)
    }

    fn format_state(&self, x: &C::State) -> String {
        self.base.format_state(x)
    }

    fn distance(&self, a: &C::State, b: &C::State) -> u64 {
        self.base.distance(a, b)
    }
}

/// `ψ_{x0,α,r}(x)`.
pub fn psi_weight<C>(chain: &C, params: &TransformParams<C::State, C::Boundary>, x: &C::State) -> Result<PiRational>
where
    C: ClosedForms + Clone + 'static,
    C::State: 'static,
{
    Ok(TransformedChain::from_boundary(chain.clone(), params)?.psi(x))
}

#[derive(Clone, Debug, PartialEq)]
pub struct RnReport {
    pub paths: usize,
    pub mismatches: usize,
    pub max_discrepancy: Rational,
}

impl RnReport {
    pub fn passed(&self) -> bool {
        self.mismatches == 0
    }
}

/// Compares, path by path up to horizon `n`, the transformed path
/// probability with `P_x(path) ψ(X_n)/ψ(x) r^{L^{x0}_{n−1}}`.
pub fn rn_identity_check<C>(tc: &TransformedChain<C>, x: &C::State, n: usize, cap: u64) -> Result<RnReport>
where
    C: Chain + Clone,
    C::State: 'static,
{
    let psi_x = tc.psi_rational(x)?;
    let mut paths = 0;
    let mut mismatches = 0;
    let mut max = Rational::zero();
    let mut failure: Option<Error> = None;
    for_each_path(tc.base_chain(), x, n, cap, |path, p| {
        if failure.is_some() {
            return;
        }
        paths += 1;
        let eval = || -> Result<(Rational, Rational)> {
            let visits = path[..n].iter().filter(|s| *s == tc.x0()).count();
            let weight = p * tc.psi_rational(&path[n])? / &psi_x * num_traits::pow(tc.r().clone(), visits);
            let mut q = Rational::one();
            for w in path.windows(2) {
                let step = tc.successors(&w[0])?.into_iter().find(|(y, _)| *y == w[1]).map(|(_, v)| v);
                q *= step.unwrap_or_else(Rational::zero);
            }
            Ok((q, weight))
        };
        match eval() {
            Ok((q, weight)) => {
                if q != weight {
                    mismatches += 1;
                    let d = num_traits::Signed::abs(&(q - weight));
                    if d > max {
                        max = d;
                    }
                }
            }
            Err(e) => failure = Some(e),
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(RnReport { paths, mismatches, max_discrepancy: max })
}

/// Second argument of [`k_kernel`].
#[derive(Clone, Debug, PartialEq)]
pub enum KTarget<S> {
    State(S),
    Boundary,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KValue {
    pub value: f64,
    pub exact: Option<Rational>,
}

/// `K(x, y) = (ψ(x0)/ψ(x)) (1 + ((1−r)/r) L_{x0}(x, y) 1{x ≠ x0})`, the
/// Martin kernel of the transformed chain. At the boundary point of the
/// profile, `L_{x0}(x, α) = φ(x)/m` and the kernel is identically 1.
pub fn k_kernel<C>(tc: &TransformedChain<C>, x: &C::State, target: &KTarget<C::State>) -> Result<KValue>
where
    C: ClosedForms + Clone,
    C::State: 'static,
{
    let x0 = tc.x0().clone();
    let one = Rational::one();
    let ratio = (&one - tc.r()) / tc.r();
    if *x == x0 {
        return Ok(KValue { value: 1.0, exact: Some(one) });
    }
    match target {
        KTarget::State(y) => {
            let base = tc.base_chain();
            let l = base.exact_green(&x0, x, y)? / base.exact_green(&x0, &x0, y)?;
            let psi0 = tc.psi_rational(&x0)?;
            let k = psi0 / tc.psi_rational(x)? * (one + ratio * l);
            Ok(KValue { value: to_f64(&k), exact: Some(k) })
        }
        KTarget::Boundary => {
            let phi = tc.profile().evaluate(x);
            match (phi.as_rational(), tc.mass().as_rational()) {
                (Some(phi), Some(m)) => {
                    let k = tc.psi_rational(&x0)? / tc.psi_rational(x)? * (one + ratio * phi / m);
                    Ok(KValue { value: to_f64(&k), exact: Some(k) })
                }
                _ => {
                    let v = tc.psi0_f64 / tc.psi_f64(x) * (1.0 + to_f64(&ratio) * tc.profile().evaluate_f64(x) / tc.mass.to_f64());
                    Ok(KValue { value: v, exact: None })
                }
            }
        }
    }
}

/// `R(φ)(x) = (φ(x) + (r/(1−r)) E_{x0}[φ(X_1)]) / ψ(x)`, after checking on
/// `window` that `φ` vanishes at `x0` and is harmonic elsewhere.
pub fn r_map<C>(tc: &TransformedChain<C>, phi: RationalFn<C::State>, window: &[C::State]) -> Result<RationalFn<C::State>>
where
    C: Chain + Clone + 'static,
    C::State: 'static,
{
    let base = tc.base_chain();
    let x0 = tc.x0().clone();
    if !phi(&x0).is_zero() {
        return Err(Error::Precondition("φ does not vanish at the base point".into()));
    }
    for x in window.iter().filter(|x| **x != x0) {
        let mut s = Rational::zero();
        for (y, p) in base.successors(x)? {
            s += p * phi(&y);
        }
        if s != phi(x) {
            return Err(Error::Precondition(format!("φ is not harmonic at {}", base.format_state(x))));
        }
    }
    let mut m = Rational::zero();
    for (y, p) in base.successors(&x0)? {
        m += p * phi(&y);
    }
    let shift = tc.r() / (Rational::one() - tc.r()) * m;
    let tc = tc.clone();
    Ok(Arc::new(move |x: &C::State| {
        (phi(x) + &shift) / tc.psi_rational(x).expect("rational ψ checked by caller")
    }))
}

/// `R⁻¹(h)(x) = ψ(x) h(x) − r E_{x0}[ψ(X_1) h(X_1)]`, after checking on
/// `window` that `h` is harmonic for the transformed chain.
pub fn r_map_inverse<C>(tc: &TransformedChain<C>, h: RationalFn<C::State>, window: &[C::State]) -> Result<RationalFn<C::State>>
where
    C: Chain + Clone + 'static,
    C::State: 'static,
{
    for x in window {
        let mut s = Rational::zero();
        for (y, q) in tc.successors(x)? {
            s += q * h(&y);
        }
        if s != h(x) {
            return Err(Error::Precondition(format!(
                "h is not harmonic for the transformed chain at {}",
                tc.format_state(x)
            )));
        }
    }
    let x0 = tc.x0().clone();
    let mut e = Rational::zero();
    for (y, p) in tc.base_chain().successors(&x0)? {
        e += p * tc.psi_rational(&y)? * h(&y);
    }
    let shift = tc.r() * e;
    let tc = tc.clone();
    Ok(Arc::new(move |x: &C::State| tc.psi_rational(x).expect("rational ψ") * h(x) - &shift))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckpointStats {
    pub steps: usize,
    pub fraction_above: f64,
    pub mean: f64,
    /// 10%, 50% and 90% quantiles of the witness.
    pub quantiles: [f64; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub trajectories: u64,
    pub threshold: f64,
    pub checkpoints: Vec<CheckpointStats>,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let i = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[i]
}

/// Statistics of a convergence witness (a function tending to infinity
/// along paths that converge to the boundary point) at each checkpoint.
pub fn convergence_stats<C, W>(
    tc: &TransformedChain<C>,
    start: &C::State,
    witness: W,
    trajectories: u64,
    checkpoints: &[usize],
    threshold: f64,
    stream: &SeedStream,
) -> Result<ConvergenceReport>
where
    C: Chain + Clone,
    C::State: 'static,
    W: Fn(&C::State) -> f64,
{
    if checkpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter("checkpoints must be strictly increasing".into()));
    }
    tc.check_state(start)?;
    let mut values: Vec<Vec<f64>> = vec![Vec::with_capacity(trajectories as usize); checkpoints.len()];
    for t in 0..trajectories {
        let mut rng = stream.rng(t);
        let mut z = start.clone();
        let mut step = 0usize;
        for (k, &c) in checkpoints.iter().enumerate() {
            while step < c {
                z = tc.sample_next(&z, &mut rng);
                step += 1;
            }
            values[k].push(witness(&z));
        }
    }
    let checkpoints = checkpoints
        .iter()
        .zip(values)
        .map(|(&steps, mut v)| {
            let above = v.iter().filter(|w| **w > threshold).count() as f64 / v.len().max(1) as f64;
            let mean = v.iter().sum::<f64>() / v.len().max(1) as f64;
            v.sort_by(|a, b| a.total_cmp(b));
            CheckpointStats { steps, fraction_above: above, mean, quantiles: [quantile(&v, 0.1), quantile(&v, 0.5), quantile(&v, 0.9)] }
        })
        .collect();
    Ok(ConvergenceReport { trajectories, threshold, checkpoints })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransienceReport {
    pub trajectories: u64,
    pub steps: usize,
    pub mean_returns: f64,
    pub returns_stderr: f64,
    pub max_last_return: usize,
    /// Fraction of runs whose last visit to `x0` happens before a tenth of
    /// the horizon.
    pub early_last_return_fraction: f64,
}

/// Visits to `x0` at times `1..=steps` under the transformed chain.
pub fn transience_stats<C>(tc: &TransformedChain<C>, trajectories: u64, steps: usize, stream: &SeedStream) -> TransienceReport
where
    C: Chain + Clone,
    C::State: 'static,
{
    let x0 = tc.x0().clone();
    let mut acc = Accumulator::default();
    let mut max_last = 0;
    let mut early = 0u64;
    for t in 0..trajectories {
        let mut rng = stream.rng(t);
        let mut z = x0.clone();
        let mut returns = 0u64;
        let mut last = 0usize;
        for s in 1..=steps {
            z = tc.sample_next(&z, &mut rng);
            if z == x0 {
                returns += 1;
                last = s;
            }
        }
        acc.push(returns as f64);
        max_last = max_last.max(last);
        if last * 10 <= steps {
            early += 1;
        }
    }
    TransienceReport {
        trajectories,
        steps,
        mean_returns: acc.mean(),
        returns_stderr: acc.stderr(),
        max_last_return: max_last,
        early_last_return_fraction: early as f64 / trajectories.max(1) as f64,
    }
}

/// `E_x[ψ(X_1)]` under the original chain, exposed for checks.
pub fn psi_mean_next<C>(tc: &TransformedChain<C>, x: &C::State) -> Result<PiRational>
where
    C: Chain + Clone,
    C::State: 'static,
{
    let psi0 = tc.psi0.clone();
    let shifted = mean_next(tc.base_chain(), tc.profile(), x)?;
    Ok(&shifted + &psi0)
}
