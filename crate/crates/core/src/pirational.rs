//! Numbers of the form `p + q/π` with exact rational `p` and `q`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::Rational;

/// Guard bits kept beyond the size of the operands when rendering.
const GUARD_BITS: u64 = 96;
/// Floor on the working precision of 1/π (about 50 decimal digits).
const MIN_BITS: u64 = 170;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct PiRational {
    pub p: Rational,
    pub q: Rational,
}

impl PiRational {
    pub fn new(p: Rational, q: Rational) -> Self {
        Self { p, q }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn rational(p: Rational) -> Self {
        Self { p, q: Rational::zero() }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(Rational::from_integer(n.into()))
    }

    /// `q/π`.
    pub fn inv_pi(q: Rational) -> Self {
        Self { p: Rational::zero(), q }
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.q.is_zero()
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        self.is_rational().then_some(&self.p)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self { p: &self.p * c, q: &self.q * c }
    }

    /// Nearest double, computed with enough bits of 1/π that the
    /// cancellation between large `p` and `q` parts is harmless.
    pub fn to_f64(&self) -> f64 {
        if self.q.is_zero() {
            return self.p.to_f64().unwrap_or(f64::NAN);
        }
        let size = [self.p.numer(), self.p.denom(), self.q.numer(), self.q.denom()]
            .iter()
            .map(|v| v.bits())
            .max()
            .unwrap_or(0);
        let bits = (2 * size + GUARD_BITS).max(MIN_BITS);
        let inv_pi = Rational::new(inv_pi_fixed(bits), BigInt::one() << bits);
        (&self.p + &self.q * inv_pi).to_f64().unwrap_or(f64::NAN)
    }

    pub fn signum_f64(&self) -> f64 {
        self.to_f64().signum()
    }
}

/// `floor(2^bits / π)`, cached at the largest precision requested so far.
pub fn inv_pi_fixed(bits: u64) -> BigInt {
    static CACHE: OnceLock<Mutex<(u64, BigInt)>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new((0, BigInt::zero())));
    let mut guard = cache.lock().expect("inverse pi cache poisoned");
    if guard.0 < bits {
        let target = bits.max(2 * guard.0);
        *guard = (target, compute_inv_pi(target));
    }
    &guard.1 >> (guard.0 - bits)
}

fn compute_inv_pi(bits: u64) -> BigInt {
    let work = bits + 64;
    let one = BigInt::one() << work;
    // Machin: π = 16 atan(1/5) − 4 atan(1/239).
    let pi = atan_inv(5, &one) * 16 - atan_inv(239, &one) * 4;
    ((BigInt::one() << (2 * work)) / pi) >> 64
}

fn atan_inv(x: u32, one: &BigInt) -> BigInt {
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = one / &x;
    let mut sum = power.clone();
    let mut k: u64 = 1;
    loop {
        power /= &x2;
        if power.is_zero() {
            break;
        }
        let term = &power / BigInt::from(2 * k + 1);
        if k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        k += 1;
    }
    sum
}

impl From<Rational> for PiRational {
    fn from(p: Rational) -> Self {
        Self::rational(p)
    }
}

impl Add for PiRational {
    type Output = PiRational;
    fn add(self, rhs: PiRational) -> PiRational {
        PiRational { p: self.p + rhs.p, q: self.q + rhs.q }
    }
}

impl<'a> Add<&'a PiRational> for &'a PiRational {
    type Output = PiRational;
    fn add(self, rhs: &PiRational) -> PiRational {
        PiRational { p: &self.p + &rhs.p, q: &self.q + &rhs.q }
    }
}

impl Sub for PiRational {
    type Output = PiRational;
    fn sub(self, rhs: PiRational) -> PiRational {
        PiRational { p: self.p - rhs.p, q: self.q - rhs.q }
    }
}

impl<'a> Sub<&'a PiRational> for &'a PiRational {
    type Output = PiRational;
    fn sub(self, rhs: &PiRational) -> PiRational {
        PiRational { p: &self.p - &rhs.p, q: &self.q - &rhs.q }
    }
}

impl AddAssign<&PiRational> for PiRational {
    fn add_assign(&mut self, rhs: &PiRational) {
        self.p += &rhs.p;
        self.q += &rhs.q;
    }
}

impl SubAssign<&PiRational> for PiRational {
    fn sub_assign(&mut self, rhs: &PiRational) {
        self.p -= &rhs.p;
        self.q -= &rhs.q;
    }
}

impl Neg for PiRational {
    type Output = PiRational;
    fn neg(self) -> PiRational {
        PiRational { p: -self.p, q: -self.q }
    }
}

impl Mul<&Rational> for &PiRational {
    type Output = PiRational;
    fn mul(self, rhs: &Rational) -> PiRational {
        self.scale(rhs)
    }
}

impl Mul<i64> for &PiRational {
    type Output = PiRational;
    fn mul(self, rhs: i64) -> PiRational {
        self.scale(&Rational::from_integer(rhs.into()))
    }
}

impl fmt::Display for PiRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.q.is_zero() {
            return write!(f, "{}", self.p);
        }
        let q_abs = self.q.abs();
        let q_term = if q_abs.denom().is_one() {
            format!("{}/π", q_abs.numer())
        } else {
            format!("{}/({}π)", q_abs.numer(), q_abs.denom())
        };
        if self.p.is_zero() {
            if self.q.is_negative() {
                write!(f, "-{q_term}")
            } else {
                write!(f, "{q_term}")
            }
        } else {
            let sign = if self.q.is_negative() { '-' } else { '+' };
            write!(f, "{} {sign} {q_term}", self.p)
        }
    }
}
