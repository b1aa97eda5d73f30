//! Simple symmetric walk on the integers.

use num_traits::One;
use rand::Rng;

use super::ClosedForms;
use crate::chain::Chain;
use crate::error::{Error, Result};
use crate::pirational::PiRational;
use crate::{rat, rint, Rational};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ZWalk;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ZEnd {
    Plus,
    Minus,
}

impl Chain for ZWalk {
    type State = i64;

    fn label(&self) -> String {
        "z".into()
    }

    fn successors(&self, x: &i64) -> Result<Vec<(i64, Rational)>> {
        Ok(vec![(x - 1, rat(1, 2)), (x + 1, rat(1, 2))])
    }

    fn successors_f64(&self, x: &i64) -> Vec<(i64, f64)> {
        vec![(x - 1, 0.5), (x + 1, 0.5)]
    }

    fn predecessors(&self, x: &i64) -> Option<Vec<(i64, Rational)>> {
        Some(vec![(x - 1, rat(1, 2)), (x + 1, rat(1, 2))])
    }

    fn stationary(&self, _x: &i64) -> Option<Rational> {
        Some(Rational::one())
    }

    fn parse_state(&self, s: &str) -> Result<i64> {
        s.trim().parse().map_err(|_| Error::UnknownState(s.to_string()))
    }

    fn format_state(&self, x: &i64) -> String {
        x.to_string()
    }

    fn distance(&self, a: &i64, b: &i64) -> u64 {
        a.abs_diff(*b)
    }

    fn sample_next<R: Rng + ?Sized>(&self, x: &i64, rng: &mut R) -> i64 {
        if rng.gen::<bool>() {
            x + 1
        } else {
            x - 1
        }
    }

    fn exits_return_to_gateway(&self) -> bool {
        true
    }

    /// With `d` the distance to the nearest target or ball exit, the walk
    /// leaves `(x - d, x + d)` at either end with probability 1/2.
    fn fast_forward<R: Rng + ?Sized>(
        &self,
        x: &i64,
        targets: &[i64],
        ball: Option<(&i64, u64)>,
        rng: &mut R,
    ) -> Option<i64> {
        let mut d = targets.iter().map(|t| x.abs_diff(*t)).min().unwrap_or(u64::MAX);
        if let Some((c, r)) = ball {
            d = d.min((r + 1).saturating_sub(x.abs_diff(*c)));
        }
        if d < 2 || d == u64::MAX {
            return None;
        }
        let d = d as i64;
        Some(if rng.gen::<bool>() { x + d } else { x - d })
    }

    fn separates(&self, x: &i64, x0: &i64, y: &i64) -> Option<bool> {
        Some((*x.min(x0) <= *y) && (*y <= *x.max(x0)))
    }
}

impl ClosedForms for ZWalk {
    type Boundary = ZEnd;

    fn base_point(&self) -> i64 {
        0
    }

    fn parse_boundary(&self, s: &str) -> Result<ZEnd> {
        match s.trim() {
            "+inf" | "inf" | "+infinity" => Ok(ZEnd::Plus),
            "-inf" | "-infinity" => Ok(ZEnd::Minus),
            _ => Err(Error::InvalidBoundary(s.to_string())),
        }
    }

    fn format_boundary(&self, alpha: &ZEnd) -> String {
        match alpha {
            ZEnd::Plus => "+inf".into(),
            ZEnd::Minus => "-inf".into(),
        }
    }

    fn default_boundary(&self) -> ZEnd {
        ZEnd::Plus
    }

    fn exact_green(&self, x0: &i64, x: &i64, y: &i64) -> Result<Rational> {
        self.check_base(x0)?;
        if *x == 0 {
            return Ok(Rational::one());
        }
        if x.signum() * y.signum() > 0 {
            Ok(rint(2 * x.abs().min(y.abs())))
        } else {
            Ok(rint(0))
        }
    }

    fn exact_martin_boundary(&self, x0: &i64, x: &i64, alpha: &ZEnd) -> Result<PiRational> {
        self.check_base(x0)?;
        let v = if *x == 0 {
            1
        } else {
            match alpha {
                ZEnd::Plus => 2 * (*x).max(0),
                ZEnd::Minus => 2 * (-*x).max(0),
            }
        };
        Ok(PiRational::from_int(v))
    }

    /// `φ_{x1,±∞}(x) = 2(±(x − x1))_+`: translation invariance.
    fn phi_rebased(&self, x1: &i64, alpha: &ZEnd, x: &i64) -> Result<PiRational> {
        Ok(PiRational::from_int(phi_z(*x1, *alpha, *x)))
    }

    fn phi_f64(&self, x1: &i64, alpha: &ZEnd, x: &i64) -> f64 {
        phi_z(*x1, *alpha, *x) as f64
    }

    fn convergence_witness(&self, alpha: &ZEnd, x: &i64) -> f64 {
        match alpha {
            ZEnd::Plus => *x as f64,
            ZEnd::Minus => -*x as f64,
        }
    }
}

fn phi_z(x1: i64, alpha: ZEnd, x: i64) -> i64 {
    match alpha {
        ZEnd::Plus => 2 * (x - x1).max(0),
        ZEnd::Minus => 2 * (x1 - x).max(0),
    }
}
