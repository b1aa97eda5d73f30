//! Walk on the nonnegative integers pushed back towards 0: from 0 it moves
//! to 1, elsewhere it goes up with probability `q < 1/2`.

use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;

use super::ClosedForms;
use crate::chain::Chain;
use crate::error::{Error, Result};
use crate::pirational::PiRational;
use crate::{rat, rint, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct BangBang {
    q: Rational,
    /// `(1 − q)/q > 1`.
    alpha: Rational,
    q_f64: f64,
    alpha_f64: f64,
    scale_f64: f64,
}

/// The single boundary point `∞`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Infinity;

impl Default for BangBang {
    fn default() -> Self {
        Self::new(rat(1, 3)).expect("1/3 is a valid parameter")
    }
}

impl BangBang {
    pub fn new(q: Rational) -> Result<Self> {
        if q <= Rational::zero() || q >= rat(1, 2) {
            return Err(Error::InvalidParameter(format!("bang-bang needs 0 < q < 1/2, got {q}")));
        }
        let alpha = (Rational::one() - &q) / &q;
        let q_f64 = q.to_f64().unwrap_or(f64::NAN);
        let alpha_f64 = alpha.to_f64().unwrap_or(f64::NAN);
        let mut c = Self { q, alpha, q_f64, alpha_f64, scale_f64: 0.0 };
        c.scale_f64 = c.phi_scale().to_f64().unwrap_or(f64::NAN);
        Ok(c)
    }

    pub fn q(&self) -> &Rational {
        &self.q
    }

    pub fn alpha(&self) -> &Rational {
        &self.alpha
    }

    fn alpha_pow(&self, x: u64) -> Rational {
        num_traits::pow(self.alpha.clone(), x as usize)
    }

    /// `2q(1−q)/(1−2q)²`, the scale of `φ_{0,∞}`.
    pub fn phi_scale(&self) -> Rational {
        let one = Rational::one();
        let d = &one - rint(2) * &self.q;
        rint(2) * &self.q * (&one - &self.q) / (&d * &d)
    }
}

impl Chain for BangBang {
    type State = u64;

    fn label(&self) -> String {
        format!("bangbang:q={}", self.q)
    }

    fn successors(&self, x: &u64) -> Result<Vec<(u64, Rational)>> {
        if *x == 0 {
            return Ok(vec![(1, Rational::one())]);
        }
        Ok(vec![(x - 1, Rational::one() - &self.q), (x + 1, self.q.clone())])
    }

    fn successors_f64(&self, x: &u64) -> Vec<(u64, f64)> {
        if *x == 0 {
            return vec![(1, 1.0)];
        }
        vec![(x - 1, 1.0 - self.q_f64), (x + 1, self.q_f64)]
    }

    fn predecessors(&self, x: &u64) -> Option<Vec<(u64, Rational)>> {
        let down = Rational::one() - &self.q;
        Some(match *x {
            0 => vec![(1, down)],
            1 => vec![(0, Rational::one()), (2, down)],
            _ => vec![(x - 1, self.q.clone()), (x + 1, down)],
        })
    }

    fn stationary(&self, x: &u64) -> Option<Rational> {
        let one = Rational::one();
        let num = &one - rint(2) * &self.q;
        Some(if *x == 0 {
            num / (rint(2) * (&one - &self.q))
        } else {
            num / (rint(2) * &self.q * (&one - &self.q) * self.alpha_pow(*x))
        })
    }

    fn parse_state(&self, s: &str) -> Result<u64> {
        s.trim().parse().map_err(|_| Error::UnknownState(s.to_string()))
    }

    fn format_state(&self, x: &u64) -> String {
        x.to_string()
    }

    fn distance(&self, a: &u64, b: &u64) -> u64 {
        a.abs_diff(*b)
    }

    fn sample_next<R: Rng + ?Sized>(&self, x: &u64, rng: &mut R) -> u64 {
        if *x == 0 || rng.gen::<f64>() < self.q_f64 {
            x + 1
        } else {
            x - 1
        }
    }

    fn exits_return_to_gateway(&self) -> bool {
        true
    }

    fn separates(&self, x: &u64, x0: &u64, y: &u64) -> Option<bool> {
        Some((*x.min(x0) <= *y) && (*y <= *x.max(x0)))
    }
}

impl ClosedForms for BangBang {
    type Boundary = Infinity;

    fn base_point(&self) -> u64 {
        0
    }

    fn parse_boundary(&self, s: &str) -> Result<Infinity> {
        match s.trim() {
            "inf" | "+inf" | "infinity" => Ok(Infinity),
            _ => Err(Error::InvalidBoundary(s.to_string())),
        }
    }

    fn format_boundary(&self, _alpha: &Infinity) -> String {
        "inf".into()
    }

    fn default_boundary(&self) -> Infinity {
        Infinity
    }

    fn exact_green(&self, x0: &u64, x: &u64, y: &u64) -> Result<Rational> {
        self.check_base(x0)?;
        let (x, y) = (*x, *y);
        if y == 0 {
            return Ok(if x == 0 { Rational::one() } else { Rational::zero() });
        }
        let one = Rational::one();
        let ay = self.alpha_pow(y);
        if x == 0 {
            return Ok(one / (&self.q * ay));
        }
        let drift = &one - rint(2) * &self.q;
        let top = self.alpha_pow(x.min(y)) - &one;
        Ok(top / (drift * ay))
    }

    fn exact_martin_boundary(&self, x0: &u64, x: &u64, _alpha: &Infinity) -> Result<PiRational> {
        self.check_base(x0)?;
        if *x == 0 {
            return Ok(PiRational::from_int(1));
        }
        let one = Rational::one();
        let v = &self.q * (self.alpha_pow(*x) - &one) / (&one - rint(2) * &self.q);
        Ok(v.into())
    }

    /// `φ_{x1,∞}(x) = c (α^x − α^{x1})_+` with `c` the scale of `φ_{0,∞}`.
    fn phi_rebased(&self, x1: &u64, _alpha: &Infinity, x: &u64) -> Result<PiRational> {
        if x <= x1 {
            return Ok(PiRational::zero());
        }
        Ok((self.phi_scale() * (self.alpha_pow(*x) - self.alpha_pow(*x1))).into())
    }

    fn phi_f64(&self, x1: &u64, _alpha: &Infinity, x: &u64) -> f64 {
        if x <= x1 {
            return 0.0;
        }
        let a = self.alpha_f64;
        self.scale_f64 * (a.powf(*x as f64) - a.powf(*x1 as f64))
    }

    fn convergence_witness(&self, _alpha: &Infinity, x: &u64) -> f64 {
        *x as f64
    }
}
