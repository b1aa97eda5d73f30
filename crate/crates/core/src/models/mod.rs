//! The four example chains and their closed forms.

mod bangbang;
mod tree;
mod z;
mod z2;

use std::fmt::Debug;

use crate::chain::Chain;
use crate::error::{Error, Result};
use crate::pirational::PiRational;
use crate::Rational;

pub use bangbang::{BangBang, Infinity};
pub use tree::{Ray, Tree, Word};
pub use z::{ZEnd, ZWalk};
pub use z2::{Site, Z2Infinity, Z2Walk};

/// Closed-form Green functions, Martin kernels and boundary profiles.
///
/// Everything is stated for the chain's own base point; `exact_*`
/// operations reject any other `x0`.
pub trait ClosedForms: Chain {
    type Boundary: Clone + Debug + PartialEq + Send + Sync;

    fn base_point(&self) -> Self::State;

    fn beta(&self, x: &Self::State) -> Rational {
        self.stationary(x).expect("example chains carry their stationary measure")
    }

    fn parse_boundary(&self, s: &str) -> Result<Self::Boundary>;

    fn format_boundary(&self, alpha: &Self::Boundary) -> String;

    /// The default boundary point used when none is given.
    fn default_boundary(&self) -> Self::Boundary;

    /// `G_{x0}(x, y)`.
    fn exact_green(&self, x0: &Self::State, x: &Self::State, y: &Self::State) -> Result<Rational>;

    /// `L_{x0}(x, α)`.
    fn exact_martin_boundary(&self, x0: &Self::State, x: &Self::State, alpha: &Self::Boundary) -> Result<PiRational>;

    /// `φ_{x0,α}(x) = L_{x0}(x, α) / β(x0)` off `x0`, zero at `x0`.
    fn exact_phi(&self, x0: &Self::State, alpha: &Self::Boundary, x: &Self::State) -> Result<PiRational> {
        self.check_base(x0)?;
        if x == x0 {
            return Ok(PiRational::zero());
        }
        let l = self.exact_martin_boundary(x0, x, alpha)?;
        Ok(l.scale(&(Rational::from_integer(1.into()) / self.beta(x0))))
    }

    /// `φ_{x1,α}` for base points other than the chain's own, where a
    /// closed form is known.
    fn phi_rebased(&self, x1: &Self::State, alpha: &Self::Boundary, x: &Self::State) -> Result<PiRational> {
        self.exact_phi(x1, alpha, x)
    }

    /// Fast floating-point evaluation of [`ClosedForms::phi_rebased`].
    fn phi_f64(&self, x1: &Self::State, alpha: &Self::Boundary, x: &Self::State) -> f64 {
        self.phi_rebased(x1, alpha, x).map(|v| v.to_f64()).unwrap_or(f64::NAN)
    }

    /// A real number that tends to infinity along paths converging to `α`.
    fn convergence_witness(&self, alpha: &Self::Boundary, x: &Self::State) -> f64;

    fn check_base(&self, x0: &Self::State) -> Result<()> {
        let base = self.base_point();
        if *x0 != base {
            return Err(Error::UnsupportedBasePoint {
                expected: self.format_state(&base),
                got: self.format_state(x0),
            });
        }
        Ok(())
    }
}

/// Runtime choice among the example chains.
#[derive(Debug)]
pub enum AnyChain {
    Z(ZWalk),
    Z2(Z2Walk),
    BangBang(BangBang),
    Tree(Tree),
}

impl AnyChain {
    /// Parses `z`, `z2`, `bangbang:q=<p>/<q>` or `tree:k=<k>`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidChain(s.to_string());
        match s {
            "z" => return Ok(AnyChain::Z(ZWalk)),
            "z2" => return Ok(AnyChain::Z2(Z2Walk::new())),
            "bangbang" => return Ok(AnyChain::BangBang(BangBang::default())),
            "tree" => return Ok(AnyChain::Tree(Tree::new(2)?)),
            _ => {}
        }
        if let Some(rest) = s.strip_prefix("bangbang:") {
            let q = rest.strip_prefix("q=").ok_or_else(bad)?;
            let q = crate::parse_rational(q).map_err(|_| bad())?;
            return Ok(AnyChain::BangBang(BangBang::new(q)?));
        }
        if let Some(rest) = s.strip_prefix("tree:") {
            let k = rest.strip_prefix("k=").ok_or_else(bad)?;
            let k: u32 = k.parse().map_err(|_| bad())?;
            return Ok(AnyChain::Tree(Tree::new(k)?));
        }
        Err(bad())
    }

    pub fn label(&self) -> String {
        match self {
            AnyChain::Z(c) => c.label(),
            AnyChain::Z2(c) => c.label(),
            AnyChain::BangBang(c) => c.label(),
            AnyChain::Tree(c) => c.label(),
        }
    }
}

/// Runs `$body` with `$c` bound to the concrete chain inside an
/// [`AnyChain`].
#[macro_export]
macro_rules! with_chain {
    ($any:expr, $c:ident => $body:expr) => {
        match $any {
            $crate::models::AnyChain::Z($c) => $body,
            $crate::models::AnyChain::Z2($c) => $body,
            $crate::models::AnyChain::BangBang($c) => $body,
            $crate::models::AnyChain::Tree($c) => $body,
        }
    };
}
