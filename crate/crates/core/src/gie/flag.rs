//! The exterior ideal on `Σ` at a point, its explicit integral elements and
//! the Grassmannian pullback used to count the codimension of the
//! integral-element variety.
//!
//! Ambient coordinates: `0..m` carry the base coframe `η^λ`, and `m + A − 1`
//! carries `ϖ^A` with `A` numbered by [`SigmaIndexMap`].

use num_traits::{One, Zero};
use serde::Serialize;

use crate::eds::{first_nonvanishing, AlgebraicIdeal, IntegralElement, NonVanishing, SigmaCoframe};
use crate::error::{Error, Result};
use crate::exterior::{subsets, ExteriorForm, Form, MultiIndex};
use crate::linalg::{self, Matrix};
use crate::poly::Poly;
use crate::rational::Rational;

use super::gauss::{CurvatureElement, SecondFundamental};
use super::psi::{identity_sign, PsiData};
use super::sigma::SigmaIndexMap;

pub fn ambient_dim(n: usize, m: usize, kappa: usize) -> usize {
    m + SigmaIndexMap::new(n, kappa).fiber_dim()
}

/// Coframe labels `η1…ηm, ϖ1…ϖD`.
pub fn sigma_coframe(n: usize, m: usize, kappa: usize) -> SigmaCoframe {
    let fiber = SigmaIndexMap::new(n, kappa).fiber_dim();
    let labels = (1..=m).map(|l| format!("η{l}")).chain((1..=fiber).map(|a| format!("ϖ{a}"))).collect();
    SigmaCoframe::new(labels).expect("distinct labels")
}

/// Generators of the ideal at a point, in this order:
/// the 1-forms `ϖ^{σ(i,j)}`; for each `i < j` the Gauss 2-form
/// `Σ_a ϖ^{σ(a,i)} ∧ ϖ^{σ(a,j)} − Σ_{λ<μ} R^i_{j;λμ} η^{λμ}`; and for each
/// normal direction `a` the `m`-form `Σ_i ϖ^{σ(a,i)} ∧ φ^i`.
pub fn gie_ideal(psi: &PsiData, r: &CurvatureElement, kappa: usize) -> Result<AlgebraicIdeal> {
    let (n, m) = (psi.n(), psi.m());
    if r.n() != n || r.m() != m {
        return Err(Error::input("curvature element and ψ have different shapes"));
    }
    let sigma = SigmaIndexMap::new(n, kappa);
    let dim = ambient_dim(n, m, kappa);
    let mut generators = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            generators.push(ExteriorForm::basis(dim, sigma.pair_coordinate(m, i, j)));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let mut g = ExteriorForm::zero(dim, 2);
            for a in 0..kappa {
                let t = ExteriorForm::monomial(
                    dim,
                    &[sigma.normal_coordinate(m, a, i), sigma.normal_coordinate(m, a, j)],
                    Rational::one(),
                )?;
                g = g.add(&t)?;
            }
            for mu in 0..m {
                for lambda in 0..mu {
                    let c = r.get(i, j, lambda, mu);
                    if !c.is_zero() {
                        g = g.sub(&ExteriorForm::monomial(dim, &[lambda, mu], c)?)?;
                    }
                }
            }
            generators.push(g);
        }
    }
    for a in 0..kappa {
        let mut g = ExteriorForm::zero(dim, m);
        for i in 0..n {
            for l in 0..m {
                let c = psi.get(i, l);
                if c.is_zero() {
                    continue;
                }
                let mut indices = vec![sigma.normal_coordinate(m, a, i)];
                indices.extend_from_slice(MultiIndex::complement_of(l, m).indices());
                g = g.add(&ExteriorForm::monomial(dim, &indices, c.clone())?)?;
            }
        }
        generators.push(g);
    }
    AlgebraicIdeal::new(sigma_coframe(n, m, kappa), generators)
}

/// `e_λ = X_λ + Σ_{a,i} H^a_{iλ} Y_{σ(a,i)}`.
pub fn build_integral_flag(h: &SecondFundamental) -> IntegralElement {
    let (n, m, kappa) = (h.n(), h.m(), h.kappa());
    let sigma = SigmaIndexMap::new(n, kappa);
    let dim = ambient_dim(n, m, kappa);
    let basis = (0..m)
        .map(|l| {
            let mut e = vec![Rational::zero(); dim];
            e[l] = Rational::one();
            for i in 0..n {
                for a in 0..kappa {
                    e[sigma.normal_coordinate(m, a, i)] = h.get(a, i, l).clone();
                }
            }
            e
        })
        .collect();
    IntegralElement::new(basis).expect("graph over the base coframe is independent")
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlagCheck {
    pub integral: bool,
    pub first_nonvanishing: Option<NonVanishing>,
    /// `η^Λ(e_1, …, e_m)`.
    #[serde(with = "crate::rational::serde_string")]
    pub volume: Rational,
    /// Every flag vector has zero component along each `Y_{σ(i,j)}`.
    pub pair_components_zero: bool,
}

impl FlagCheck {
    pub fn passes(&self) -> bool {
        self.integral && self.volume.is_one() && self.pair_components_zero
    }
}

pub fn check_flag(ideal: &AlgebraicIdeal, flag: &IntegralElement, n: usize, m: usize, kappa: usize) -> Result<FlagCheck> {
    let first = first_nonvanishing(flag, ideal)?;
    let dim = ideal.dim();
    let volume_form = ExteriorForm::monomial(dim, &(0..m).collect::<Vec<_>>(), Rational::one())?;
    let volume = volume_form.evaluate(flag.basis())?;
    let sigma = SigmaIndexMap::new(n, kappa);
    let pair_components_zero = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .all(|(i, j)| flag.basis().iter().all(|e| e[sigma.pair_coordinate(m, i, j)].is_zero()));
    Ok(FlagCheck { integral: first.is_none(), first_nonvanishing: first, volume, pair_components_zero })
}

/// Variable index of `P^A_λ` in the Grassmannian chart around the base
/// plane: `λ · (N − m) + A` with 0-based fiber coordinate `A`.
pub fn chart_variable(ambient: usize, m: usize, lambda: usize, fiber: usize) -> usize {
    lambda * (ambient - m) + fiber
}

/// The chart basis `X_λ(P) = X_λ + Σ_A P^A_λ Y_A` with polynomial entries.
fn chart_basis(ambient: usize, m: usize) -> Vec<Vec<Poly>> {
    (0..m)
        .map(|l| {
            (0..ambient)
                .map(|k| {
                    if k < m {
                        if k == l {
                            Poly::one()
                        } else {
                            Poly::zero()
                        }
                    } else {
                        Poly::var(chart_variable(ambient, m, l, k - m))
                    }
                })
                .collect()
        })
        .collect()
}

/// Pulls every generator back to the chart: a degree-`d` generator yields
/// one polynomial `φ(X_{λ_1}(P), …, X_{λ_d}(P))` per increasing
/// `λ_1 < … < λ_d`. Their common zero set is the integral-element variety
/// near planes transverse to the fiber.
pub fn grassmann_pullback(ideal: &AlgebraicIdeal, m: usize) -> Result<Vec<Poly>> {
    let ambient = ideal.dim();
    if m > ambient {
        return Err(Error::input("plane dimension exceeds the ambient dimension"));
    }
    let basis = chart_basis(ambient, m);
    let mut out = Vec::new();
    for g in ideal.generators() {
        if g.degree() > m {
            continue;
        }
        let lifted: Form<Poly> = g.map_coefficients(|c| Poly::constant(c.clone()));
        for tuple in subsets(m, g.degree()) {
            let vectors: Vec<Vec<Poly>> = tuple.iter().map(|&t| basis[t].clone()).collect();
            out.push(lifted.evaluate(&vectors)?);
        }
    }
    Ok(out)
}

/// Chart coordinates of a plane given as a graph `e_λ = X_λ + …` over the
/// base coframe.
pub fn chart_point(flag: &IntegralElement, m: usize) -> Result<Vec<Rational>> {
    let basis = flag.basis();
    if basis.len() != m {
        return Err(Error::input("flag dimension differs from the base dimension"));
    }
    let ambient = basis.first().map_or(0, Vec::len);
    for (l, e) in basis.iter().enumerate() {
        if (0..m).any(|k| e[k] != if k == l { Rational::one() } else { Rational::zero() }) {
            return Err(Error::input("flag is not a graph over the base coframe"));
        }
    }
    let mut point = vec![Rational::zero(); m * (ambient - m)];
    for (l, e) in basis.iter().enumerate() {
        for k in m..ambient {
            point[chart_variable(ambient, m, l, k - m)] = e[k].clone();
        }
    }
    Ok(point)
}

/// Rank of the Jacobian of `functions` at `point`.
pub fn independent_differentials(functions: &[Poly], point: &[Rational]) -> Result<usize> {
    let vars = point.len();
    let mut rows: Matrix = Vec::with_capacity(functions.len());
    for f in functions {
        let mut row = vec![Rational::zero(); vars];
        let mut used: Vec<usize> = f.terms().flat_map(|(mono, _)| mono.exponents().iter().map(|&(v, _)| v)).collect();
        used.sort_unstable();
        used.dedup();
        for v in used {
            if v >= vars {
                return Err(Error::input("function uses a variable outside the chart"));
            }
            row[v] = f.derivative(v).evaluate(point)?;
        }
        rows.push(row);
    }
    Ok(linalg::rank(&rows))
}

/// Codimension of the integral-element variety at the flag, read off the
/// pulled-back generators.
pub fn observed_codimension(ideal: &AlgebraicIdeal, flag: &IntegralElement, m: usize) -> Result<usize> {
    let functions = grassmann_pullback(ideal, m)?;
    independent_differentials(&functions, &chart_point(flag, m)?)
}

/// Signed sum predicted for the `φ`-type pullback at `P`:
/// `Σ_{i,λ} (−1)^{λ+1} ψ^i_{Λ∖λ} P^{σ(a,i)}_λ`.
pub fn phi_type_pullback(psi: &PsiData, kappa: usize, a: usize) -> Poly {
    let (n, m) = (psi.n(), psi.m());
    let sigma = SigmaIndexMap::new(n, kappa);
    let ambient = ambient_dim(n, m, kappa);
    let mut p = Poly::zero();
    for i in 0..n {
        for l in 0..m {
            let c = identity_sign(l) * psi.get(i, l);
            let var = chart_variable(ambient, m, l, sigma.normal_coordinate(m, a, i) - m);
            p = p + Poly::var(var).scale(&c);
        }
    }
    p
}
