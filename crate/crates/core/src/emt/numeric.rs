//! Floating-point backend in pointwise orthonormal frames.
//!
//! At each point `g = L Lᵀ` (Cholesky), the coframe `η = Lᵀ dx` is
//! orthonormal and `vol = η^1 ∧ … ∧ η^m = det L dx^Λ`. The form
//! `τ^a = T^{ab} ξ_b ⌟ vol` has coordinate expansion
//! `Σ_μ F^{aμ} (∂_μ ⌟ dx^Λ)` with `F = det L · T_frame · L^{-1}`, so
//! `d_∇τ^a = (∂_μ F^{aμ} + ω^a_{b,μ} F^{bμ}) dx^Λ`. All derivatives are
//! central differences.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Central-difference step.
pub const STEP: f64 = 1e-5;
/// Residual tolerance of the numeric audit.
pub const TOLERANCE: f64 = 1e-6;

pub type Field = Box<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// Metric and tensor as matrix-valued functions of the chart point.
pub struct NumericChart {
    pub m: usize,
    pub metric: Field,
    pub tensor: Field,
}

fn shifted(x: &[f64], k: usize, h: f64) -> Vec<f64> {
    let mut y = x.to_vec();
    y[k] += h;
    y
}

fn central<F: Fn(&[f64]) -> Result<DMatrix<f64>>>(f: &F, x: &[f64], k: usize) -> Result<DMatrix<f64>> {
    Ok((f(&shifted(x, k, STEP))? - f(&shifted(x, k, -STEP))?) / (2.0 * STEP))
}

fn cholesky(g: DMatrix<f64>, x: &[f64]) -> Result<DMatrix<f64>> {
    g.cholesky().map(|c| c.l()).ok_or_else(|| Error::input(format!("metric is not positive definite at {x:?}")))
}

fn invert(a: &DMatrix<f64>, x: &[f64]) -> Result<DMatrix<f64>> {
    a.clone().try_inverse().ok_or_else(|| Error::input(format!("metric is singular at {x:?}")))
}

/// `Γ^λ_{μν}` at `x`, indexed `[λ][μ][ν]`, from differenced metric components.
pub fn christoffel(chart: &NumericChart, x: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
    let m = chart.m;
    let inv = invert(&(chart.metric)(x), x)?;
    let metric = |y: &[f64]| Ok((chart.metric)(y));
    let dg: Vec<DMatrix<f64>> = (0..m).map(|s| central(&metric, x, s)).collect::<Result<_>>()?;
    let mut gamma = vec![vec![vec![0.0; m]; m]; m];
    for (lambda, plane) in gamma.iter_mut().enumerate() {
        for (mu, row) in plane.iter_mut().enumerate() {
            for (nu, value) in row.iter_mut().enumerate() {
                *value = 0.5
                    * (0..m)
                        .map(|kappa| inv[(lambda, kappa)] * (dg[mu][(kappa, nu)] + dg[nu][(kappa, mu)] - dg[kappa][(mu, nu)]))
                        .sum::<f64>();
            }
        }
    }
    Ok(gamma)
}

/// Coordinate covariant divergence `∇_μ T^{λμ}` at `x`.
pub fn covariant_divergence(chart: &NumericChart, x: &[f64]) -> Result<Vec<f64>> {
    let m = chart.m;
    let gamma = christoffel(chart, x)?;
    let t = (chart.tensor)(x);
    let tensor = |y: &[f64]| Ok((chart.tensor)(y));
    let dt: Vec<DMatrix<f64>> = (0..m).map(|s| central(&tensor, x, s)).collect::<Result<_>>()?;
    Ok((0..m)
        .map(|lambda| {
            (0..m)
                .map(|mu| {
                    dt[mu][(lambda, mu)]
                        + (0..m).map(|nu| t[(lambda, mu)] * gamma[nu][nu][mu] + t[(mu, nu)] * gamma[lambda][nu][mu]).sum::<f64>()
                })
                .sum()
        })
        .collect())
}

/// `F^{aμ}` with `τ^a = Σ_μ F^{aμ} (∂_μ ⌟ dx^Λ)`.
fn flux(chart: &NumericChart, y: &[f64]) -> Result<DMatrix<f64>> {
    let l = cholesky((chart.metric)(y), y)?;
    let l_inv = invert(&l, y)?;
    let frame_t = l.transpose() * (chart.tensor)(y) * &l;
    Ok(frame_t * l_inv * l.determinant())
}

/// Orthonormal-frame `d_∇τ^a` in units of `vol`, and the frame components
/// `Lᵀ ∇·T` of the coordinate divergence.
pub fn frame_sides(chart: &NumericChart, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = chart.m;
    let l = cholesky((chart.metric)(x), x)?;
    let lt = l.transpose();
    let frame = invert(&lt, x)?;
    let inverse_transpose = |y: &[f64]| {
        let ly = cholesky((chart.metric)(y), y)?;
        invert(&ly.transpose(), y)
    };
    let gamma = christoffel(chart, x)?;
    let f = flux(chart, x)?;
    let flux_at = |y: &[f64]| flux(chart, y);
    let df: Vec<DMatrix<f64>> = (0..m).map(|s| central(&flux_at, x, s)).collect::<Result<_>>()?;
    // ω_ν = Lᵀ (∂_ν E + Γ_ν E), E = L^{-T}, (Γ_ν)_{μκ} = Γ^μ_{νκ}
    let omega: Vec<DMatrix<f64>> = (0..m)
        .map(|nu| {
            let de = central(&inverse_transpose, x, nu)?;
            let gamma_nu = DMatrix::from_fn(m, m, |mu, kappa| gamma[mu][nu][kappa]);
            Ok(&lt * (de + gamma_nu * &frame))
        })
        .collect::<Result<_>>()?;
    let det = l.determinant();
    let d_nabla: Vec<f64> = (0..m)
        .map(|a| {
            let mut acc = 0.0;
            for mu in 0..m {
                acc += df[mu][(a, mu)];
                for b in 0..m {
                    acc += omega[mu][(a, b)] * f[(b, mu)];
                }
            }
            acc / det
        })
        .collect();
    let div = covariant_divergence(chart, x)?;
    let div_frame: Vec<f64> = (0..m).map(|a| (0..m).map(|lambda| lt[(a, lambda)] * div[lambda]).sum()).collect();
    Ok((d_nabla, div_frame))
}

/// [`frame_sides`] pulled back to coordinate components by `L^{-T}`, so the
/// result is comparable with the exact backend.
pub fn coordinate_sides(chart: &NumericChart, x: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let (d_nabla, div_frame) = frame_sides(chart, x)?;
    let l = cholesky((chart.metric)(x), x)?;
    let back = invert(&l.transpose(), x)?;
    let pull = |v: &[f64]| (back.clone() * nalgebra::DVector::from_column_slice(v)).iter().copied().collect::<Vec<f64>>();
    Ok((pull(&d_nabla), pull(&div_frame)))
}

/// Round 2-sphere in `(θ, φ)`: `g = diag(1, sin²θ)`, `T = g^{-1}`.
pub fn sphere_inverse_metric() -> NumericChart {
    NumericChart {
        m: 2,
        metric: Box::new(|x: &[f64]| DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, x[0].sin().powi(2)])),
        tensor: Box::new(|x: &[f64]| DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0 / x[0].sin().powi(2)])),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_christoffel() {
        let chart = sphere_inverse_metric();
        for &theta in &[0.3, 1.0, 2.5] {
            let gamma = christoffel(&chart, &[theta, 0.7]).unwrap();
            assert!((gamma[0][1][1] + theta.sin() * theta.cos()).abs() < 1e-8);
            assert!((gamma[1][0][1] - theta.cos() / theta.sin()).abs() < 1e-8);
        }
    }

    #[test]
    fn conformal_christoffel() {
        let chart = NumericChart {
            m: 2,
            metric: Box::new(|x: &[f64]| DMatrix::identity(2, 2) * (2.0 * x[0]).exp()),
            tensor: Box::new(|_: &[f64]| DMatrix::zeros(2, 2)),
        };
        let gamma = christoffel(&chart, &[0.2, -0.4]).unwrap();
        assert!((gamma[0][0][0] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn sphere_inverse_metric_is_conserved() {
        let chart = sphere_inverse_metric();
        let (lhs, rhs) = frame_sides(&chart, &[1.1, 0.4]).unwrap();
        for (a, b) in lhs.iter().zip(&rhs) {
            assert!(a.abs() < TOLERANCE && b.abs() < TOLERANCE);
        }
    }
}
