//! Killed Green functions, Martin kernels, σ-finite path measures and Doob
//! transforms for recurrent Markov chains, with exact arithmetic wherever the
//! quantities are rational and seeded Monte Carlo elsewhere.

pub mod chain;
pub mod error;
pub mod green;
pub mod htransform;
pub mod linalg;
pub mod martin;
pub mod models;
pub mod pirational;
pub mod potential;
pub mod rng;
pub mod sigma;

use num_bigint::BigInt;

pub use chain::{Chain, PathWeight, Trajectory};
pub use error::{Error, Result};
pub use models::{AnyChain, BangBang, ClosedForms, Tree, Word, Z2Walk, ZWalk};
pub use pirational::PiRational;
pub use rng::SeedStream;

pub type Rational = num_rational::BigRational;

/// `n/d` as an exact rational.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rint(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `p/q`, an integer, or a decimal such as `0.25`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("not a rational number: `{s}`"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d == BigInt::from(0) {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches('-'), frac);
        let n: BigInt = digits.parse().map_err(|_| bad())?;
        let d = BigInt::from(10).pow(frac.len() as u32);
        let v = Rational::new(n, d);
        return Ok(if neg { -v } else { v });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

pub fn to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
