//! Walk on the rooted `k`-ary tree: from the root it picks a son
//! uniformly, elsewhere it moves to the father with probability 1/2 and to
//! each son with probability `1/(2k)`.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Zero};
use rand::Rng;

use super::ClosedForms;
use crate::chain::Chain;
use crate::error::{Error, Result};
use crate::pirational::PiRational;
use crate::{rat, rint, Rational};

/// A vertex: the word of son indices from the root. Ordered by depth, then
/// lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word(pub Vec<u8>);

impl Word {
    pub fn root() -> Self {
        Word(Vec::new())
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn father(&self) -> Option<Word> {
        (!self.is_root()).then(|| Word(self.0[..self.0.len() - 1].to_vec()))
    }

    pub fn son(&self, j: u8) -> Word {
        let mut v = self.0.clone();
        v.push(j);
        Word(v)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn common_prefix_len(&self, other: &Word) -> usize {
        self.0.iter().zip(&other.0).take_while(|(a, b)| a == b).count()
    }

    pub fn truncate(&self, len: usize) -> Word {
        Word(self.0[..len.min(self.0.len())].to_vec())
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_root() {
            return write!(f, "@");
        }
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "{}", parts.join("."))
    }
}

/// An end of the tree given by a finite prefix followed by a repeated
/// block. Written `0.1(0)*`; a ray with an empty block is not allowed.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ray {
    pub prefix: Vec<u8>,
    pub period: Vec<u8>,
}

impl Ray {
    pub fn new(prefix: Vec<u8>, period: Vec<u8>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::InvalidBoundary("ray needs a nonempty repeated block".into()));
        }
        Ok(Self { prefix, period })
    }

    /// The constant ray `j.j.j…`.
    pub fn constant(j: u8) -> Self {
        Self { prefix: Vec::new(), period: vec![j] }
    }

    pub fn digit(&self, i: usize) -> u8 {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    /// The vertex at depth `m` on the ray.
    pub fn prefix_word(&self, m: usize) -> Word {
        Word((0..m).map(|i| self.digit(i)).collect())
    }

    /// Length of the longest common prefix of `x` with the ray.
    pub fn agreement(&self, x: &Word) -> usize {
        x.0.iter().enumerate().take_while(|(i, d)| **d == self.digit(*i)).count()
    }
}

impl fmt::Display for Ray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u8]| v.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(".");
        write!(f, "{}({})*", join(&self.prefix), join(&self.period))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    k: u32,
}

impl Tree {
    pub fn new(k: u32) -> Result<Self> {
        if !(2..=255).contains(&k) {
            return Err(Error::InvalidParameter(format!("tree arity must lie in 2..=255, got {k}")));
        }
        Ok(Self { k })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    fn kpow(&self, e: usize) -> Rational {
        num_traits::pow(rint(self.k as i64), e)
    }

    fn parse_digits(&self, s: &str, original: &str) -> Result<Vec<u8>> {
        if s.is_empty() {
            return Ok(Vec::new());
        }
        s.split('.')
            .map(|d| {
                d.trim()
                    .parse::<u8>()
                    .ok()
                    .filter(|v| (*v as u32) < self.k)
                    .ok_or_else(|| Error::UnknownState(original.to_string()))
            })
            .collect()
    }

    pub fn lca_depth(&self, a: &Word, b: &Word) -> usize {
        a.common_prefix_len(b)
    }
}

impl Chain for Tree {
    type State = Word;

    fn label(&self) -> String {
        format!("tree:k={}", self.k)
    }

    fn check_state(&self, x: &Word) -> Result<()> {
        if x.0.iter().any(|d| *d as u32 >= self.k) {
            return Err(Error::UnknownState(x.to_string()));
        }
        Ok(())
    }

    fn successors(&self, x: &Word) -> Result<Vec<(Word, Rational)>> {
        self.check_state(x)?;
        let k = self.k as i64;
        let mut out = Vec::with_capacity(self.k as usize + 1);
        match x.father() {
            None => {
                for j in 0..self.k {
                    out.push((x.son(j as u8), rat(1, k)));
                }
            }
            Some(f) => {
                out.push((f, rat(1, 2)));
                for j in 0..self.k {
                    out.push((x.son(j as u8), rat(1, 2 * k)));
                }
            }
        }
        Ok(out)
    }

    fn predecessors(&self, x: &Word) -> Option<Vec<(Word, Rational)>> {
        let k = self.k as i64;
        let mut out = Vec::new();
        if let Some(f) = x.father() {
            let p = if f.is_root() { rat(1, k) } else { rat(1, 2 * k) };
            out.push((f, p));
        }
        for j in 0..self.k {
            out.push((x.son(j as u8), rat(1, 2)));
        }
        Some(out)
    }

    /// `β(root) = k/(k−1)`; the other values follow from detailed balance
    /// along each edge: `β(depth d) = 2 k^{1−d}/(k−1)`.
    fn stationary(&self, x: &Word) -> Option<Rational> {
        let k = self.k as i64;
        Some(if x.is_root() {
            rat(k, k - 1)
        } else {
            rat(2, k - 1) / self.kpow(x.depth() - 1)
        })
    }

    fn parse_state(&self, s: &str) -> Result<Word> {
        let t = s.trim();
        if t == "@" || t.is_empty() {
            return Ok(Word::root());
        }
        Ok(Word(self.parse_digits(t, s)?))
    }

    fn format_state(&self, x: &Word) -> String {
        x.to_string()
    }

    fn distance(&self, a: &Word, b: &Word) -> u64 {
        (a.depth() + b.depth() - 2 * a.common_prefix_len(b)) as u64
    }

    fn sample_next<R: Rng + ?Sized>(&self, x: &Word, rng: &mut R) -> Word {
        if x.is_root() || rng.gen::<bool>() {
            return x.son(rng.gen_range(0..self.k) as u8);
        }
        x.father().expect("non-root vertex")
    }

    fn exits_return_to_gateway(&self) -> bool {
        true
    }

    /// When no target lies below `x`, the walk reaches the deepest strict
    /// ancestor whose subtree holds a target before touching any target,
    /// and it reaches it almost surely (the depth is a reflected symmetric
    /// walk). Only used without a truncation ball.
    fn fast_forward<R: Rng + ?Sized>(
        &self,
        x: &Word,
        targets: &[Word],
        ball: Option<(&Word, u64)>,
        _rng: &mut R,
    ) -> Option<Word> {
        if ball.is_some() || targets.is_empty() || x.is_root() {
            return None;
        }
        if targets.iter().any(|t| x.is_prefix_of(t)) {
            return None;
        }
        let g = targets.iter().map(|t| x.common_prefix_len(t)).max().unwrap_or(0);
        let g = g.min(x.depth() - 1);
        Some(x.truncate(g))
    }

    fn separates(&self, x: &Word, x0: &Word, y: &Word) -> Option<bool> {
        let lca = x.common_prefix_len(x0);
        let on_path = y.depth() >= lca && (y.is_prefix_of(x) || y.is_prefix_of(x0));
        Some(on_path)
    }
}

impl ClosedForms for Tree {
    type Boundary = Ray;

    fn base_point(&self) -> Word {
        Word::root()
    }

    /// Accepts `0.1(0)*`, `0.1.(0)*` and `(0)*`.
    fn parse_boundary(&self, s: &str) -> Result<Ray> {
        let bad = || Error::InvalidBoundary(s.to_string());
        let t = s.trim();
        let body = t.strip_suffix(")*").ok_or_else(bad)?;
        let (prefix, period) = body.split_once('(').ok_or_else(bad)?;
        let prefix = prefix.trim_end_matches('.');
        let prefix = self.parse_digits(prefix, s).map_err(|_| bad())?;
        let period = self.parse_digits(period, s).map_err(|_| bad())?;
        Ray::new(prefix, period).map_err(|_| bad())
    }

    fn format_boundary(&self, alpha: &Ray) -> String {
        alpha.to_string()
    }

    fn default_boundary(&self) -> Ray {
        Ray::constant(0)
    }

    fn exact_green(&self, x0: &Word, x: &Word, y: &Word) -> Result<Rational> {
        self.check_base(x0)?;
        self.check_state(x)?;
        self.check_state(y)?;
        if y.is_root() {
            return Ok(if x.is_root() { Rational::one() } else { Rational::zero() });
        }
        let p = y.depth();
        if x.is_root() {
            return Ok(rint(2) / self.kpow(p));
        }
        let j = x.common_prefix_len(y);
        if j == 0 {
            return Ok(Rational::zero());
        }
        let k = rint(self.k as i64);
        let one = Rational::one();
        Ok(rint(2) * (self.kpow(j) - &one) / (self.kpow(p - 1) * (k - one)))
    }

    fn exact_martin_boundary(&self, x0: &Word, x: &Word, alpha: &Ray) -> Result<PiRational> {
        self.check_base(x0)?;
        self.check_state(x)?;
        if x.is_root() {
            return Ok(PiRational::from_int(1));
        }
        let j = alpha.agreement(x);
        let k = rint(self.k as i64);
        let one = Rational::one();
        Ok((&k * (self.kpow(j) - &one) / (k - one)).into())
    }

    fn phi_f64(&self, x1: &Word, alpha: &Ray, x: &Word) -> f64 {
        if !x1.is_root() {
            return f64::NAN;
        }
        if x.is_root() {
            return 0.0;
        }
        (self.k as f64).powi(alpha.agreement(x) as i32) - 1.0
    }

    fn convergence_witness(&self, alpha: &Ray, x: &Word) -> f64 {
        alpha.agreement(x) as f64
    }
}
