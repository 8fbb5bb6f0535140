//! Dimension bookkeeping for the construction.

use serde::Serialize;

use crate::error::{Error, Result};

use super::gauss::dim_k;
use super::preimage::minimal_kappa;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DimensionLedger {
    pub n: usize,
    pub m: usize,
    pub kappa: usize,
    pub dim_sigma: usize,
    pub dim_hset: usize,
    pub dim_z: usize,
    pub dim_k: usize,
    pub codim_v: usize,
    pub characters: Vec<usize>,
    pub character_sum: usize,
    pub minimal_kappa: usize,
}

impl DimensionLedger {
    pub fn cartan_equality(&self) -> bool {
        self.character_sum == self.codim_v
    }
}

/// Predicted characters: `C_λ = n(n−1)(λ+1)/2` for `λ ≤ m−2` and
/// `C_{m−1} = n(n−1)m/2 + κ`.
pub fn predicted_characters(n: usize, m: usize, kappa: usize) -> Vec<usize> {
    let pairs = n * (n - 1) / 2;
    (0..m).map(|l| if l + 1 < m { pairs * (l + 1) } else { pairs * m + kappa }).collect()
}

pub fn dimension_ledger(n: usize, m: usize, kappa: usize) -> Result<DimensionLedger> {
    if n < 2 || m < 2 {
        return Err(Error::input(format!("need n ≥ 2 and m ≥ 2, got n = {n}, m = {m}")));
    }
    let min = minimal_kappa(n, m);
    if kappa < min {
        return Err(Error::input(format!("κ = {kappa} is below the minimum (n−1)(m−1) = {min}")));
    }
    let pairs = n * (n - 1) / 2;
    let dim_k = dim_k(n, m);
    let dim_sigma = m + pairs + n * kappa;
    let dim_hset = (n * m - 1) * kappa - dim_k;
    let codim_v = m * pairs + dim_k + kappa;
    let characters = predicted_characters(n, m, kappa);
    let character_sum = characters.iter().sum();
    Ok(DimensionLedger {
        n,
        m,
        kappa,
        dim_sigma,
        dim_hset,
        dim_z: dim_sigma + dim_hset,
        dim_k,
        codim_v,
        characters,
        character_sum,
        minimal_kappa: min,
    })
}
