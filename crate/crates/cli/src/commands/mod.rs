pub mod green;
pub mod martin;
pub mod measure;
pub mod potential;
pub mod simulate;
pub mod verify;

use anyhow::Result;
use recmart_core::chain::ball;
use recmart_core::models::{AnyChain, ClosedForms};
use recmart_core::{Chain, SeedStream};

use crate::error::{flag, usage};

pub fn chain(s: &str) -> Result<AnyChain> {
    flag("chain", AnyChain::parse(s))
}

pub fn state<C: Chain>(c: &C, name: &str, s: &str) -> Result<C::State> {
    let x = flag(name, c.parse_state(s))?;
    flag(name, c.check_state(&x))?;
    Ok(x)
}

/// `--x0`, defaulting to the chain's base point.
pub fn base<C: ClosedForms>(c: &C, s: &Option<String>) -> Result<C::State> {
    match s {
        Some(s) => state(c, "x0", s),
        None => Ok(c.base_point()),
    }
}

pub fn boundary<C: ClosedForms>(c: &C, s: &Option<String>) -> Result<C::Boundary> {
    match s {
        Some(s) => flag("alpha", c.parse_boundary(s)),
        None => Ok(c.default_boundary()),
    }
}

/// States separated by `;` or whitespace (Z² sites are written `i,j`).
pub fn states<C: Chain>(c: &C, name: &str, s: &str) -> Result<Vec<C::State>> {
    s.split(|ch: char| ch == ';' || ch.is_whitespace()).filter(|t| !t.is_empty()).map(|t| state(c, name, t)).collect()
}

pub fn seed(seed: Option<u64>, what: &str) -> Result<SeedStream> {
    seed.map(SeedStream::new).ok_or_else(|| usage(format!("--seed is required for {what}")))
}

pub fn rational(name: &str, s: &str) -> Result<recmart_core::Rational> {
    flag(name, recmart_core::parse_rational(s))
}

const DEFAULT_RADIUS: u64 = 50;
/// Default windows are cut back until they hold at most this many states
/// (the tree ball grows like k^radius).
const DEFAULT_STATES: usize = 4096;

/// Radius 50, or the largest radius whose ball stays within
/// `DEFAULT_STATES`.
pub fn default_radius<C: ClosedForms>(c: &C, x0: &C::State) -> Result<u64> {
    let mut radius = 1;
    while radius < DEFAULT_RADIUS && ball(c, x0, radius + 1)?.len() <= DEFAULT_STATES {
        radius += 1;
    }
    Ok(radius)
}
