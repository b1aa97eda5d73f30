//! Simple walk on Z².

use std::sync::{Arc, Mutex};

use num_traits::One;
use rand::Rng;

use super::ClosedForms;
use crate::chain::Chain;
use crate::error::{Error, Result};
use crate::pirational::PiRational;
use crate::potential::{asymptotic_potential, block_step, potential_table, PotentialTable};
use crate::{rat, Rational};

pub type Site = (i64, i64);

/// Tables up to this radius are built exactly on demand; beyond it the
/// floating-point potential falls back to the two-term expansion.
const EXACT_F64_RADIUS: i64 = 64;
const MIN_TABLE_RADIUS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Z2Infinity;

/// Clones share the potential-kernel cache.
#[derive(Debug, Default, Clone)]
pub struct Z2Walk {
    cache: Arc<Mutex<Option<Tables>>>,
}

#[derive(Debug, Clone)]
struct Tables {
    exact: Arc<PotentialTable>,
    float: Arc<Vec<Vec<f64>>>,
}

impl Z2Walk {
    pub fn new() -> Self {
        Self::default()
    }

    fn tables(&self, radius: usize) -> Tables {
        let mut guard = self.cache.lock().expect("potential cache poisoned");
        if let Some(t) = guard.as_ref() {
            if t.exact.radius() >= radius {
                return t.clone();
            }
        }
        let old = guard.as_ref().map_or(0, |t| t.exact.radius());
        let target = radius.max(2 * old).max(MIN_TABLE_RADIUS);
        let exact = potential_table(target);
        let float = exact.rows().iter().map(|row| row.iter().map(|v| v.to_f64()).collect()).collect();
        let t = Tables { exact: Arc::new(exact), float: Arc::new(float) };
        *guard = Some(t.clone());
        t
    }

    /// The exact potential kernel table covering `|i|, |j| <= radius`.
    pub fn table(&self, radius: usize) -> Arc<PotentialTable> {
        self.tables(radius).exact
    }

    /// `a(x)`, exactly.
    pub fn potential(&self, x: &Site) -> PiRational {
        let r = x.0.unsigned_abs().max(x.1.unsigned_abs()) as usize;
        self.tables(r).exact.get(x.0, x.1).expect("table covers the requested site").clone()
    }

    /// `a(x)` in floating point: from the exact table near the origin, from
    /// the logarithmic expansion further out.
    pub fn potential_f64(&self, x: &Site) -> f64 {
        let (i, j) = (x.0.abs(), x.1.abs());
        let r = i.max(j);
        if r > EXACT_F64_RADIUS {
            return asymptotic_potential(x);
        }
        let t = self.tables(r as usize);
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        t.float[hi as usize][lo as usize]
    }
}

impl Chain for Z2Walk {
    type State = Site;

    fn label(&self) -> String {
        "z2".into()
    }

    fn successors(&self, x: &Site) -> Result<Vec<(Site, Rational)>> {
        let (i, j) = *x;
        Ok(vec![
            ((i - 1, j), rat(1, 4)),
            ((i, j - 1), rat(1, 4)),
            ((i, j + 1), rat(1, 4)),
            ((i + 1, j), rat(1, 4)),
        ])
    }

    fn successors_f64(&self, x: &Site) -> Vec<(Site, f64)> {
        let (i, j) = *x;
        vec![((i - 1, j), 0.25), ((i, j - 1), 0.25), ((i, j + 1), 0.25), ((i + 1, j), 0.25)]
    }

    fn predecessors(&self, x: &Site) -> Option<Vec<(Site, Rational)>> {
        self.successors(x).ok()
    }

    fn stationary(&self, _x: &Site) -> Option<Rational> {
        Some(Rational::one())
    }

    fn parse_state(&self, s: &str) -> Result<Site> {
        let bad = || Error::UnknownState(s.to_string());
        let t = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (a, b) = t.split_once(',').ok_or_else(bad)?;
        Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
    }

    fn format_state(&self, x: &Site) -> String {
        format!("{},{}", x.0, x.1)
    }

    fn distance(&self, a: &Site, b: &Site) -> u64 {
        a.0.abs_diff(b.0) + a.1.abs_diff(b.1)
    }

    fn sample_next<R: Rng + ?Sized>(&self, x: &Site, rng: &mut R) -> Site {
        let (i, j) = *x;
        match rng.gen_range(0..4u8) {
            0 => (i - 1, j),
            1 => (i, j - 1),
            2 => (i, j + 1),
            _ => (i + 1, j),
        }
    }

    /// Takes `c − 1` steps at once, `c` being the L¹ distance to the nearest
    /// target or to the outside of the ball: no target can be reached in
    /// fewer than `c` steps.
    fn fast_forward<R: Rng + ?Sized>(
        &self,
        x: &Site,
        targets: &[Site],
        ball: Option<(&Site, u64)>,
        rng: &mut R,
    ) -> Option<Site> {
        let mut c = targets.iter().map(|t| self.distance(x, t)).min().unwrap_or(u64::MAX);
        if let Some((center, r)) = ball {
            c = c.min((r + 1).saturating_sub(self.distance(x, center)));
        }
        if c < 3 || c == u64::MAX {
            return None;
        }
        Some(block_step(x, c - 1, rng))
    }

    fn separates(&self, x: &Site, x0: &Site, y: &Site) -> Option<bool> {
        Some(y == x || y == x0)
    }
}

impl ClosedForms for Z2Walk {
    type Boundary = Z2Infinity;

    fn base_point(&self) -> Site {
        (0, 0)
    }

    fn parse_boundary(&self, s: &str) -> Result<Z2Infinity> {
        match s.trim() {
            "inf" | "+inf" | "infinity" => Ok(Z2Infinity),
            _ => Err(Error::InvalidBoundary(s.to_string())),
        }
    }

    fn format_boundary(&self, _alpha: &Z2Infinity) -> String {
        "inf".into()
    }

    fn default_boundary(&self) -> Z2Infinity {
        Z2Infinity
    }

    fn exact_green(&self, _x0: &Site, _x: &Site, _y: &Site) -> Result<Rational> {
        Err(Error::InvalidParameter(
            "the Z² walk has no rational Green function closed form; use the potential kernel".into(),
        ))
    }

    /// `L_0(x, ∞) = a(x)` off the origin.
    fn exact_martin_boundary(&self, x0: &Site, x: &Site, _alpha: &Z2Infinity) -> Result<PiRational> {
        self.check_base(x0)?;
        if *x == (0, 0) {
            return Ok(PiRational::from_int(1));
        }
        Ok(self.potential(x))
    }

    /// `φ_{x1,∞}(x) = a(x − x1)`.
    fn phi_rebased(&self, x1: &Site, _alpha: &Z2Infinity, x: &Site) -> Result<PiRational> {
        Ok(self.potential(&(x.0 - x1.0, x.1 - x1.1)))
    }

    fn phi_f64(&self, x1: &Site, _alpha: &Z2Infinity, x: &Site) -> f64 {
        self.potential_f64(&(x.0 - x1.0, x.1 - x1.1))
    }

    fn convergence_witness(&self, _alpha: &Z2Infinity, x: &Site) -> f64 {
        ((x.0 * x.0 + x.1 * x.1) as f64).sqrt()
    }
}
