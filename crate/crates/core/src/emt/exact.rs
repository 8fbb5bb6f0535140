//! Exact backend: polynomial charts in coordinate frames.
//!
//! With `vol = √g dx^Λ` and `τ̂^λ = T^{λμ} (∂_μ ⌟ dx^Λ)` one has
//! `τ^λ = √g τ̂^λ` and `d(√g τ̂) = √g (dτ̂ + ½ d log det g ∧ τ̂)`, so every
//! quantity can be expressed in units of `vol` with rational arithmetic only,
//! whether or not `det g` is a square.

use num_traits::Zero;

use crate::bundle::{evaluate_form_at, exterior_derivative, ChartForm};
use crate::error::{Error, Result};
use crate::exterior::{ExteriorForm, MultiIndex, VectorValuedForm};
use crate::linalg::{self, Matrix};
use crate::poly::Poly;
use crate::rational::Rational;

use super::{EnergyMomentum, MetricChart};

/// `Γ^λ_{μν}` at a point, indexed `[λ][μ][ν]`.
pub type Christoffel = Vec<Vec<Vec<Rational>>>;

fn metric_at(g: &MetricChart, point: &[Rational]) -> Result<Matrix> {
    g.components.iter().map(|row| row.iter().map(|p| p.evaluate(point)).collect()).collect()
}

/// `Γ^λ_{μν} = ½ g^{λκ} (∂_μ g_{κν} + ∂_ν g_{κμ} − ∂_κ g_{μν})` at `point`.
pub fn christoffel_at(g: &MetricChart, point: &[Rational]) -> Result<Christoffel> {
    let m = g.m;
    let inv = linalg::inverse(&metric_at(g, point)?)
        .ok_or_else(|| Error::input(format!("metric is singular at {point:?}")))?;
    let mut dg = vec![vec![vec![Rational::zero(); m]; m]; m];
    for k in 0..m {
        for l in 0..m {
            for s in 0..m {
                dg[s][k][l] = g.components[k][l].derivative(s).evaluate(point)?;
            }
        }
    }
    let half = Rational::new(1.into(), 2.into());
    let mut gamma = vec![vec![vec![Rational::zero(); m]; m]; m];
    for lambda in 0..m {
        for mu in 0..m {
            for nu in 0..m {
                let mut acc = Rational::zero();
                for kappa in 0..m {
                    if inv[lambda][kappa].is_zero() {
                        continue;
                    }
                    let bracket = &dg[mu][kappa][nu] + &dg[nu][kappa][mu] - &dg[kappa][mu][nu];
                    acc += &inv[lambda][kappa] * bracket;
                }
                gamma[lambda][mu][nu] = acc * &half;
            }
        }
    }
    Ok(gamma)
}

/// `τ̂^λ = T^{λμ} (∂_μ ⌟ dx^Λ)`, the coordinate-frame form without the
/// `√g` factor.
pub fn tensor_to_mform(t: &EnergyMomentum) -> VectorValuedForm<Poly> {
    let m = t.m;
    let components = (0..m)
        .map(|lambda| {
            let mut form = ChartForm::zero(m, m - 1);
            for mu in 0..m {
                let c = &t.components[lambda][mu];
                if c.is_zero() {
                    continue;
                }
                let idx = MultiIndex::complement_of(mu, m);
                let sign = if mu % 2 == 0 { c.clone() } else { -c.clone() };
                form = form.add(&ChartForm::monomial(m, idx.indices(), sign).expect("valid index")).expect("same shape");
            }
            form
        })
        .collect();
    VectorValuedForm::new(components).expect("uniform shape")
}

/// `∇_μ T^{λμ} = ∂_μ T^{λμ} + T^{λμ} Γ^ν_{νμ} + T^{μν} Γ^λ_{νμ}` at a point.
pub fn covariant_divergence(t: &EnergyMomentum, gamma: &Christoffel, point: &[Rational]) -> Result<Vec<Rational>> {
    let m = t.m;
    let tv: Matrix = t.components.iter().map(|row| row.iter().map(|p| p.evaluate(point)).collect()).collect::<Result<_>>()?;
    (0..m)
        .map(|lambda| {
            let mut acc = Rational::zero();
            for mu in 0..m {
                acc += t.components[lambda][mu].derivative(mu).evaluate(point)?;
                for nu in 0..m {
                    acc += &tv[lambda][mu] * &gamma[nu][nu][mu];
                    acc += &tv[mu][nu] * &gamma[lambda][nu][mu];
                }
            }
            Ok(acc)
        })
        .collect()
}

/// `d_∇τ^λ` divided by `vol`, computed through exterior calculus: the exact
/// `dτ̂`, the `√g` log-derivative and the Levi-Civita connection 1-forms
/// `Γ^λ_{κν} dx^κ` wedged against `τ̂`.
pub fn covariant_exterior_derivative(g: &MetricChart, t: &EnergyMomentum, point: &[Rational]) -> Result<Vec<Rational>> {
    let m = g.m;
    let gamma = christoffel_at(g, point)?;
    let metric = metric_at(g, point)?;
    let det = linalg::determinant(&metric);
    let det_poly = det_polynomial(g);
    let two_det = &det * Rational::from_integer(2.into());
    let log_grad: Vec<Rational> = (0..m)
        .map(|k| Ok(det_poly.derivative(k).evaluate(point)? / &two_det))
        .collect::<Result<_>>()?;
    let log_form = ExteriorForm::one_form(&log_grad);
    let tau = tensor_to_mform(t);
    let tau_at: Vec<ExteriorForm> =
        tau.components().iter().map(|c| evaluate_form_at(c, point)).collect::<Result<_>>()?;
    let top = MultiIndex::full(m);
    (0..m)
        .map(|lambda| {
            let mut total = evaluate_form_at(&exterior_derivative(tau.component(lambda)), point)?;
            total = total.add(&log_form.wedge(&tau_at[lambda])?)?;
            for nu in 0..m {
                let coefficients: Vec<Rational> = (0..m).map(|k| gamma[lambda][k][nu].clone()).collect();
                let omega = ExteriorForm::one_form(&coefficients);
                total = total.add(&omega.wedge(&tau_at[nu])?)?;
            }
            Ok(total.coefficient(&top))
        })
        .collect()
}

/// `det g` as a polynomial.
pub fn det_polynomial(g: &MetricChart) -> Poly {
    crate::exterior::laplace_determinant(&g.components)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn constant(m: usize, rows: &[&[i64]]) -> Vec<Vec<Poly>> {
        assert_eq!(rows.len(), m);
        rows.iter().map(|r| r.iter().map(|&x| Poly::constant(int(x))).collect()).collect()
    }

    #[test]
    fn flat_metric_has_no_christoffels() {
        let g = MetricChart::new(2, constant(2, &[&[1, 0], &[0, 1]]), vec![int(0), int(0)]).unwrap();
        let gamma = christoffel_at(&g, &[int(1), int(2)]).unwrap();
        assert!(gamma.iter().flatten().flatten().all(Zero::is_zero));
    }

    #[test]
    fn identity_tensor_form() {
        let t = EnergyMomentum::new(2, constant(2, &[&[1, 0], &[0, 1]])).unwrap();
        let tau = tensor_to_mform(&t);
        assert_eq!(tau.component(0), &ChartForm::basis(2, 1));
        assert_eq!(tau.component(1), &ChartForm::basis(2, 0).neg());
    }

    #[test]
    fn single_partial_divergence() {
        let g = MetricChart::new(2, constant(2, &[&[1, 0], &[0, 1]]), vec![int(0), int(0)]).unwrap();
        let mut comps = constant(2, &[&[0, 0], &[0, 0]]);
        comps[0][0] = Poly::var(0);
        let t = EnergyMomentum::new(2, comps).unwrap();
        let p = [int(3), int(-1)];
        let gamma = christoffel_at(&g, &p).unwrap();
        assert_eq!(covariant_divergence(&t, &gamma, &p).unwrap(), vec![int(1), int(0)]);
        assert_eq!(covariant_exterior_derivative(&g, &t, &p).unwrap(), vec![int(1), int(0)]);
    }
}
