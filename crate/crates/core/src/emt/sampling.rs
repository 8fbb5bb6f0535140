//! Deterministic low-discrepancy sample points in a chart box.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Radical inverse of `index` in `base`, exactly.
pub fn radical_inverse(mut index: u64, base: u64) -> Rational {
    let b = Rational::from_integer(base.into());
    let mut scale = b.recip();
    let mut out = Rational::zero();
    while index > 0 {
        out += &scale * Rational::from_integer((index % base).into());
        index /= base;
        scale /= &b;
    }
    out
}

/// Axis-aligned chart box `[lo_k, hi_k]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartBox {
    pub bounds: Vec<(Rational, Rational)>,
}

impl ChartBox {
    pub fn new(bounds: Vec<(Rational, Rational)>) -> Result<Self> {
        if bounds.iter().any(|(lo, hi)| lo >= hi) {
            return Err(Error::input("chart box needs lo < hi on every axis"));
        }
        Ok(ChartBox { bounds })
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    /// The box with `margin` removed from every face.
    pub fn shrink(&self, margin: &Rational) -> Result<Self> {
        let two = Rational::from_integer(2.into());
        let bounds: Vec<_> = self.bounds.iter().map(|(lo, hi)| (lo + margin, hi - margin)).collect();
        if margin < &Rational::zero() || bounds.iter().any(|(lo, hi)| lo >= hi) {
            return Err(Error::input(format!(
                "margin {margin} must be non-negative and smaller than half of every side ({})",
                self.bounds.iter().map(|(lo, hi)| (hi - lo) / &two).min().unwrap_or_else(Rational::one)
            )));
        }
        Ok(ChartBox { bounds })
    }

    pub fn center(&self) -> Vec<Rational> {
        let two = Rational::from_integer(2.into());
        self.bounds.iter().map(|(lo, hi)| (lo + hi) / &two).collect()
    }

    /// The first `count` Halton points (indices `1..=count`) mapped into the box.
    pub fn halton(&self, count: usize) -> Result<Vec<Vec<Rational>>> {
        if self.dim() > PRIMES.len() {
            return Err(Error::unsupported(format!("Halton sampling supports up to {} dimensions", PRIMES.len())));
        }
        Ok((1..=count as u64)
            .map(|k| {
                self.bounds
                    .iter()
                    .zip(PRIMES)
                    .map(|((lo, hi), p)| lo + (hi - lo) * radical_inverse(k, p))
                    .collect()
            })
            .collect())
    }
}
