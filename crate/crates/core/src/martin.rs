//! Harmonic profiles `φ` (nonnegative, zero at a base point, harmonic
//! elsewhere) and their representation by finite boundary mixtures.

use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::chain::Chain;
use crate::error::{Error, Result};
use crate::models::{ClosedForms, ZEnd};
use crate::pirational::PiRational;
use crate::{rint, Rational};

type ExactFn<S> = Arc<dyn Fn(&S) -> PiRational + Send + Sync>;
type FastFn<S> = Arc<dyn Fn(&S) -> f64 + Send + Sync>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    ClosedForm,
    BoundaryPoint(String),
    Mixture(String),
    User(String),
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::ClosedForm => write!(f, "closed-form"),
            Provenance::BoundaryPoint(a) => write!(f, "boundary-point {a}"),
            Provenance::Mixture(m) => write!(f, "mixture {m}"),
            Provenance::User(d) => write!(f, "user {d}"),
        }
    }
}

/// The `φ` slot of the measures `Q^{x0,φ}`.
#[derive(Clone)]
pub struct HarmonicProfile<S> {
    pub base: S,
    pub provenance: Provenance,
    exact: ExactFn<S>,
    fast: Option<FastFn<S>>,
}

impl<S: fmt::Debug> fmt::Debug for HarmonicProfile<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HarmonicProfile").field("base", &self.base).field("provenance", &self.provenance).finish()
    }
}

impl<S: Clone + PartialEq + Send + Sync + 'static> HarmonicProfile<S> {
    pub fn new(base: S, provenance: Provenance, exact: impl Fn(&S) -> PiRational + Send + Sync + 'static) -> Self {
        Self { base, provenance, exact: Arc::new(exact), fast: None }
    }

    /// A profile with rational values.
    pub fn rational(base: S, provenance: Provenance, f: impl Fn(&S) -> Rational + Send + Sync + 'static) -> Self {
        Self::new(base, provenance, move |x| PiRational::rational(f(x)))
    }

    pub fn with_fast(mut self, fast: impl Fn(&S) -> f64 + Send + Sync + 'static) -> Self {
        self.fast = Some(Arc::new(fast));
        self
    }

    pub fn evaluate(&self, x: &S) -> PiRational {
        (self.exact)(x)
    }

    pub fn evaluate_f64(&self, x: &S) -> f64 {
        match &self.fast {
            Some(f) => f(x),
            None => self.evaluate(x).to_f64(),
        }
    }

    pub fn evaluate_rational(&self, x: &S) -> Result<Rational> {
        let v = self.evaluate(x);
        v.as_rational().cloned().ok_or_else(|| Error::NotRational(v.to_string()))
    }

    /// `c φ`.
    pub fn scaled(&self, c: Rational) -> Self {
        let inner = self.exact.clone();
        let fast = self.fast.clone();
        let cf = crate::to_f64(&c);
        let mut out = Self::new(self.base.clone(), self.provenance.clone(), move |x| inner(x).scale(&c));
        if let Some(f) = fast {
            out.fast = Some(Arc::new(move |x| cf * f(x)));
        }
        out
    }
}

/// `E_x[φ(X_1)]`, exactly.
pub fn mean_next<C: Chain>(chain: &C, phi: &HarmonicProfile<C::State>, x: &C::State) -> Result<PiRational>
where
    C::State: 'static,
{
    let mut s = PiRational::zero();
    for (y, p) in chain.successors(x)? {
        s += &phi.evaluate(&y).scale(&p);
    }
    Ok(s)
}

/// `E_{x0}[φ(X_1)]`, the total mass of the boundary measure behind `φ`.
pub fn total_mass<C: Chain>(chain: &C, phi: &HarmonicProfile<C::State>) -> Result<PiRational>
where
    C::State: 'static,
{
    mean_next(chain, phi, &phi.base)
}

/// A finite atomic measure on the boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryMixture<B> {
    pub atoms: Vec<(B, Rational)>,
}

impl<B> Default for BoundaryMixture<B> {
    fn default() -> Self {
        Self { atoms: Vec::new() }
    }
}

impl<B> BoundaryMixture<B> {
    pub fn total_mass(&self) -> Rational {
        self.atoms.iter().fold(Rational::zero(), |s, (_, w)| s + w)
    }
}

/// Parses `w1*a1+w2*a2`; a bare atom has weight 1. Boundary names may
/// themselves start with a sign (`+inf`), so a piece is glued back onto
/// the previous one while that one is still waiting for its atom.
pub fn parse_mixture<B>(s: &str, parse_atom: impl Fn(&str) -> Result<B>) -> Result<BoundaryMixture<B>> {
    let mut pieces: Vec<String> = Vec::new();
    for part in s.split('+') {
        match pieces.last_mut() {
            Some(last) if last.is_empty() || (last.ends_with('*') && !last.ends_with(")*")) => {
                last.push('+');
                last.push_str(part);
            }
            _ => pieces.push(part.to_string()),
        }
    }
    let mut atoms = Vec::new();
    for piece in pieces.iter().map(|p| p.trim()).filter(|p| !p.is_empty()) {
        let weighted = piece.split_once('*').and_then(|(w, a)| crate::parse_rational(w).ok().map(|w| (w, a.trim())));
        let (w, a) = weighted.unwrap_or((rint(1), piece));
        if w.is_negative() {
            return Err(Error::InvalidParameter(format!("negative mixture weight in `{piece}`")));
        }
        atoms.push((parse_atom(a)?, w));
    }
    Ok(BoundaryMixture { atoms })
}

/// `φ_{x0,α}(x) = L_{x0}(x, α) / β(x0)` off `x0`. Base points other than the
/// chain's own use the rebased closed form.
pub fn profile_from_boundary<C>(chain: &C, x0: &C::State, alpha: &C::Boundary) -> Result<HarmonicProfile<C::State>>
where
    C: ClosedForms + Clone + 'static,
    C::State: 'static,
    C::Boundary: 'static,
{
    // Surface unsupported base points now rather than on first evaluation.
    chain.phi_rebased(x0, alpha, x0)?;
    let (c1, c2) = (chain.clone(), chain.clone());
    let (a1, a2) = (alpha.clone(), alpha.clone());
    let (b1, b2) = (x0.clone(), x0.clone());
    let rebased = *x0 != chain.base_point();
    let exact = move |x: &C::State| {
        if *x == b1 {
            return PiRational::zero();
        }
        let v = if rebased { c1.phi_rebased(&b1, &a1, x) } else { c1.exact_phi(&b1, &a1, x) };
        v.expect("closed form defined on the whole chain")
    };
    Ok(HarmonicProfile::new(x0.clone(), Provenance::BoundaryPoint(chain.format_boundary(alpha)), exact)
        .with_fast(move |x| c2.phi_f64(&b2, &a2, x)))
}

/// `φ(x) = Σ_i w_i L_{x0}(x, α_i)` off `x0`, zero at `x0`; its total mass is
/// `Σ_i w_i`.
pub fn mixture_profile<C>(chain: &C, x0: &C::State, mu: &BoundaryMixture<C::Boundary>) -> Result<HarmonicProfile<C::State>>
where
    C: ClosedForms + Clone + 'static,
    C::State: 'static,
    C::Boundary: 'static,
{
    chain.check_base(x0)?;
    let c = chain.clone();
    let atoms = mu.atoms.clone();
    let b = x0.clone();
    let label = mu
        .atoms
        .iter()
        .map(|(a, w)| format!("{w}*{}", chain.format_boundary(a)))
        .collect::<Vec<_>>()
        .join("+");
    let exact = move |x: &C::State| {
        let mut s = PiRational::zero();
        if *x == b {
            return s;
        }
        for (a, w) in &atoms {
            s += &c.exact_martin_boundary(&b, x, a).expect("base point checked").scale(w);
        }
        s
    };
    Ok(HarmonicProfile::new(x0.clone(), Provenance::Mixture(label), exact))
}

/// Writes a profile on Z with base 0 as `a δ_{+∞} + b δ_{−∞}`, with
/// `(a, b) = (φ(1)/2, φ(−1)/2)`, after checking `φ(x) = 2a x_+ + 2b x_−` on
/// `|x| <= radius`.
pub fn decompose_profile_z(phi: &HarmonicProfile<i64>, radius: i64) -> Result<BoundaryMixture<ZEnd>> {
    if phi.base != 0 {
        return Err(Error::UnsupportedBasePoint { expected: "0".into(), got: phi.base.to_string() });
    }
    let half = crate::rat(1, 2);
    let a = phi.evaluate_rational(&1)? * &half;
    let b = phi.evaluate_rational(&-1)? * &half;
    if a.is_negative() || b.is_negative() {
        return Err(Error::NotInCone(format!("negative weights ({a}, {b})")));
    }
    for x in -radius..=radius {
        let want = if x >= 0 { rint(2 * x) * &a } else { rint(-2 * x) * &b };
        let got = phi.evaluate(&x);
        if got != PiRational::rational(want.clone()) {
            return Err(Error::NotInCone(format!("φ({x}) = {got}, cone element gives {want}")));
        }
    }
    Ok(BoundaryMixture { atoms: vec![(ZEnd::Plus, a), (ZEnd::Minus, b)] })
}

#[derive(Clone, Debug, PartialEq)]
pub struct HarmonicReport<S> {
    /// `(x, E_x[φ(X_1)] − φ(x))` for every window state other than `x0`.
    pub residuals: Vec<(S, PiRational)>,
    /// `E_{x0}[φ(X_1)]` when `x0` is in the window; reported, not
    /// constrained.
    pub balance_at_base: Option<PiRational>,
    pub value_at_base: PiRational,
}

impl<S> HarmonicReport<S> {
    pub fn passed(&self) -> bool {
        self.value_at_base.is_zero() && self.residuals.iter().all(|(_, r)| r.is_zero())
    }

    pub fn max_abs_residual(&self) -> f64 {
        self.residuals.iter().map(|(_, r)| r.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn failures(&self) -> impl Iterator<Item = &(S, PiRational)> {
        self.residuals.iter().filter(|(_, r)| !r.is_zero())
    }
}

pub fn check_harmonic_except<C: Chain>(
    chain: &C,
    phi: &HarmonicProfile<C::State>,
    x0: &C::State,
    window: &[C::State],
) -> Result<HarmonicReport<C::State>>
where
    C::State: 'static,
{
    let mut residuals = Vec::new();
    let mut balance = None;
    for x in window {
        let m = mean_next(chain, phi, x)?;
        if x == x0 {
            balance = Some(m);
        } else {
            residuals.push((x.clone(), &m - &phi.evaluate(x)));
        }
    }
    Ok(HarmonicReport { residuals, balance_at_base: balance, value_at_base: phi.evaluate(x0) })
}
