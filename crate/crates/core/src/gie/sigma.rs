//! Numbering of the fiber coframe `ϖ^A` of `Σ`.
//!
//! `σ(i,j) = (j−i) + n(n−1)/2 − (n−i)(n−i+1)/2` for `1 ≤ i < j ≤ n` and
//! `σ(a,i) = n(n−1)/2 + (a−n−1)n + i` for `a ∈ n+1..n+κ`; both 1-based, as
//! in the usual presentation. The `*_coordinate` helpers translate to 0-based
//! ambient coordinates where the first `m` slots hold the base coframe.

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SigmaIndexMap {
    n: usize,
    kappa: usize,
}

impl SigmaIndexMap {
    pub fn new(n: usize, kappa: usize) -> Self {
        SigmaIndexMap { n, kappa }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn pair_count(&self) -> usize {
        self.n * (self.n - 1) / 2
    }

    /// Number of fiber coordinates, `n(n−1)/2 + nκ`.
    pub fn fiber_dim(&self) -> usize {
        self.pair_count() + self.n * self.kappa
    }

    /// `σ(i, j)`, 1-based, `i < j`.
    pub fn pair(&self, i: usize, j: usize) -> Result<usize> {
        let n = self.n;
        if !(1 <= i && i < j && j <= n) {
            return Err(Error::input(format!("σ({i},{j}) needs 1 ≤ i < j ≤ {n}")));
        }
        Ok((j - i) + n * (n - 1) / 2 - (n - i) * (n - i + 1) / 2)
    }

    /// `σ(a, i)`, 1-based, `a ∈ n+1..=n+κ`.
    pub fn normal(&self, a: usize, i: usize) -> Result<usize> {
        let n = self.n;
        if !(n < a && a <= n + self.kappa && 1 <= i && i <= n) {
            return Err(Error::input(format!("σ({a},{i}) out of range for n = {n}, κ = {}", self.kappa)));
        }
        Ok(self.pair_count() + (a - n - 1) * n + i)
    }

    /// Ambient coordinate of `ϖ^{σ(i,j)}`, 0-based `i < j`.
    pub fn pair_coordinate(&self, m: usize, i: usize, j: usize) -> usize {
        m + self.pair(i + 1, j + 1).expect("0-based pair in range") - 1
    }

    /// Ambient coordinate of `ϖ^{σ(a,i)}` for the 0-based normal direction
    /// `a < κ` and fiber index `i < n`.
    pub fn normal_coordinate(&self, m: usize, a: usize, i: usize) -> usize {
        m + self.normal(self.n + 1 + a, i + 1).expect("0-based normal in range") - 1
    }

    /// Whether the combined map hits `1..=fiber_dim` exactly once.
    pub fn is_bijection(&self) -> bool {
        let mut hit = vec![false; self.fiber_dim() + 1];
        let pairs = (1..=self.n).flat_map(|i| (i + 1..=self.n).map(move |j| (i, j)));
        for (i, j) in pairs {
            let s = self.pair(i, j).expect("in range");
            if s == 0 || s >= hit.len() || std::mem::replace(&mut hit[s], true) {
                return false;
            }
        }
        for a in self.n + 1..=self.n + self.kappa {
            for i in 1..=self.n {
                let s = self.normal(a, i).expect("in range");
                if s == 0 || s >= hit.len() || std::mem::replace(&mut hit[s], true) {
                    return false;
                }
            }
        }
        hit[1..].iter().all(|&h| h)
    }
}
