//! Energy-momentum tensors as conservation laws: build
//! `τ^λ = T^{λμ} (ξ_μ ⌟ vol)`, compute `d_∇τ` and the covariant divergence,
//! and check `d_∇τ = (∇_μ T^{λμ}) vol` at sample points.

pub mod exact;
pub mod numeric;
pub mod sampling;

use nalgebra::DMatrix;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::poly::{Poly, PolyTerm};
use crate::rational::{self, Rational};

use numeric::NumericChart;
use sampling::ChartBox;

/// Number of sample points in an audit.
pub const SAMPLE_COUNT: usize = 100;

/// Dimension `m + (m−1)²` of the space the conservation law takes values in.
pub fn target_dimension(m: usize) -> usize {
    m + (m - 1) * (m - 1)
}

/// Polynomial metric chart with a base point.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricChart {
    pub m: usize,
    pub components: Vec<Vec<Poly>>,
    pub base_point: Vec<Rational>,
}

fn check_square(m: usize, rows: &[Vec<Poly>], what: &str) -> Result<()> {
    if m == 0 || rows.len() != m || rows.iter().any(|r| r.len() != m) {
        return Err(Error::input(format!("{what} must be a {m}×{m} matrix")));
    }
    if rows.iter().flatten().any(|p| p.variable_bound() > m) {
        return Err(Error::input(format!("{what} uses more than {m} chart variables")));
    }
    Ok(())
}

impl MetricChart {
    /// Checks symmetry and positive definiteness at the base point.
    pub fn new(m: usize, components: Vec<Vec<Poly>>, base_point: Vec<Rational>) -> Result<Self> {
        check_square(m, &components, "metric")?;
        if base_point.len() != m {
            return Err(Error::input("base point has the wrong dimension"));
        }
        for i in 0..m {
            for j in 0..i {
                if components[i][j] != components[j][i] {
                    return Err(Error::input(format!("metric is not symmetric at ({}, {})", i + 1, j + 1)));
                }
            }
        }
        let chart = MetricChart { m, components, base_point };
        let at_base = chart.evaluate(&chart.base_point)?;
        if !linalg::is_positive_definite(&at_base) {
            return Err(Error::input("metric is not positive definite at the base point"));
        }
        Ok(chart)
    }

    pub fn flat(m: usize) -> Self {
        let components = (0..m)
            .map(|i| (0..m).map(|j| if i == j { Poly::constant(rational::int(1)) } else { Poly::zero() }).collect())
            .collect();
        MetricChart { m, components, base_point: vec![Rational::zero(); m] }
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Matrix> {
        self.components.iter().map(|row| row.iter().map(|p| p.evaluate(point)).collect()).collect()
    }
}

/// Contravariant 2-tensor `T^{λμ}`; symmetry is not assumed.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyMomentum {
    pub m: usize,
    pub components: Vec<Vec<Poly>>,
}

impl EnergyMomentum {
    pub fn new(m: usize, components: Vec<Vec<Poly>>) -> Result<Self> {
        check_square(m, &components, "tensor")?;
        Ok(EnergyMomentum { m, components })
    }
}

fn poly_field(rows: &[Vec<Poly>]) -> numeric::Field {
    let rows = rows.to_vec();
    let m = rows.len();
    Box::new(move |x: &[f64]| DMatrix::from_fn(m, m, |i, j| rows[i][j].evaluate_f64(x)))
}

/// Floating-point mirror of a polynomial chart.
pub fn numeric_chart(g: &MetricChart, t: &EnergyMomentum) -> NumericChart {
    NumericChart { m: g.m, metric: poly_field(&g.components), tensor: poly_field(&t.components) }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Exact,
    Numeric,
}

/// Outcome at the worst sample point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WorstPoint {
    pub point: Vec<f64>,
    pub d_nabla_tau: Vec<f64>,
    pub divergence: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EquivalenceReport {
    pub backend: Backend,
    pub m: usize,
    pub samples: usize,
    /// Largest `|d_∇τ − (∇·T) vol|` component over the samples.
    pub max_residual: f64,
    /// Exact maximum residual, as a rational string (exact backend only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual_exact: Option<String>,
    /// Largest `|∇·T|` component: zero iff `T` is conserved.
    pub max_divergence: f64,
    pub conserved: bool,
    pub tolerance: f64,
    pub worst: Option<WorstPoint>,
    pub target_dimension: usize,
}

impl EquivalenceReport {
    pub fn holds(&self) -> bool {
        match self.backend {
            Backend::Exact => self.max_residual_exact.as_deref() == Some("0"),
            Backend::Numeric => self.max_residual < self.tolerance,
        }
    }
}

fn to_f64s(v: &[Rational]) -> Vec<f64> {
    v.iter().map(rational::to_f64).collect()
}

/// Exact audit at every sample point.
pub fn verify_equivalence_exact(g: &MetricChart, t: &EnergyMomentum, points: &[Vec<Rational>]) -> Result<EquivalenceReport> {
    if g.m != t.m {
        return Err(Error::input("metric and tensor dimensions differ"));
    }
    let mut max_residual = Rational::zero();
    let mut max_divergence = Rational::zero();
    let mut worst: Option<(Rational, WorstPoint)> = None;
    for p in points {
        let lhs = exact::covariant_exterior_derivative(g, t, p)?;
        let gamma = exact::christoffel_at(g, p)?;
        let rhs = exact::covariant_divergence(t, &gamma, p)?;
        let residual = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).max().unwrap_or_else(Rational::zero);
        let divergence = rhs.iter().map(Signed::abs).max().unwrap_or_else(Rational::zero);
        if divergence > max_divergence {
            max_divergence = divergence;
        }
        if worst.as_ref().is_none_or(|(s, _)| &residual > s) {
            worst = Some((residual.clone(), WorstPoint { point: to_f64s(p), d_nabla_tau: to_f64s(&lhs), divergence: to_f64s(&rhs) }));
        }
        if residual > max_residual {
            max_residual = residual;
        }
    }
    Ok(EquivalenceReport {
        backend: Backend::Exact,
        m: g.m,
        samples: points.len(),
        max_residual: rational::to_f64(&max_residual),
        max_residual_exact: Some(max_residual.to_string()),
        max_divergence: rational::to_f64(&max_divergence),
        conserved: max_divergence.is_zero(),
        tolerance: 0.0,
        worst: worst.map(|(_, w)| w),
        target_dimension: target_dimension(g.m),
    })
}

/// Numeric audit at every sample point.
pub fn verify_equivalence_numeric(chart: &NumericChart, points: &[Vec<f64>]) -> Result<EquivalenceReport> {
    let mut max_residual = 0.0f64;
    let mut max_divergence = 0.0f64;
    let mut worst: Option<(f64, WorstPoint)> = None;
    for p in points {
        let (lhs, rhs) = numeric::coordinate_sides(chart, p)?;
        if lhs.iter().chain(&rhs).any(|x| !x.is_finite()) {
            return Err(Error::input(format!("non-finite values at {p:?}")));
        }
        let residual = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        max_divergence = rhs.iter().map(|x| x.abs()).fold(max_divergence, f64::max);
        if worst.as_ref().is_none_or(|(s, _)| residual > *s) {
            worst = Some((residual, WorstPoint { point: p.clone(), d_nabla_tau: lhs, divergence: rhs }));
        }
        max_residual = max_residual.max(residual);
    }
    Ok(EquivalenceReport {
        backend: Backend::Numeric,
        m: chart.m,
        samples: points.len(),
        max_residual,
        max_residual_exact: None,
        max_divergence,
        conserved: max_divergence < numeric::TOLERANCE,
        tolerance: numeric::TOLERANCE,
        worst: worst.map(|(_, w)| w),
        target_dimension: target_dimension(chart.m),
    })
}

/// Chart input: either explicit polynomials or a named preset.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EmtInput {
    Polynomial(PolynomialInput),
    Preset(PresetInput),
}

/// `{ "m", "g": [[poly]], "T": [[poly]], "box": [[lo, hi]; m], "margin" }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolynomialInput {
    pub m: usize,
    pub g: Vec<Vec<Vec<PolyTerm>>>,
    #[serde(rename = "T")]
    pub tensor: Vec<Vec<Vec<PolyTerm>>>,
    #[serde(rename = "box")]
    pub chart_box: Vec<[f64; 2]>,
    #[serde(default)]
    pub margin: f64,
}

/// `{ "preset": "sphere-inverse-metric", "box"?, "margin"? }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetInput {
    pub preset: String,
    #[serde(rename = "box", default)]
    pub chart_box: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    pub margin: Option<f64>,
}

/// Exact rational for a float written in decimal, e.g. `0.1 → 1/10`.
pub fn decimal_rational(x: f64) -> Result<Rational> {
    if !x.is_finite() {
        return Err(Error::input(format!("non-finite value {x}")));
    }
    let text = format!("{x}");
    let (mantissa, exponent) = match text.split_once(['e', 'E']) {
        Some((a, b)) => (a.to_string(), b.parse::<i32>().map_err(|_| Error::input("bad exponent"))?),
        None => (text.clone(), 0),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((&mantissa, ""));
    let digits = format!("{int_part}{frac_part}");
    let q = rational::parse(&digits)?;
    let shift = exponent - frac_part.len() as i32;
    let power = num_traits::pow(rational::int(10), shift.unsigned_abs() as usize);
    Ok(if shift < 0 { q / power } else { q * power })
}

fn chart_box(bounds: &[[f64; 2]]) -> Result<ChartBox> {
    ChartBox::new(bounds.iter().map(|[lo, hi]| Ok((decimal_rational(*lo)?, decimal_rational(*hi)?))).collect::<Result<_>>()?)
}

/// A fully resolved audit problem.
pub enum EmtProblem {
    Polynomial { metric: MetricChart, tensor: EnergyMomentum, samples: Vec<Vec<Rational>> },
    Numeric { chart: NumericChart, samples: Vec<Vec<f64>> },
}

impl EmtInput {
    pub fn resolve(&self) -> Result<EmtProblem> {
        match self {
            EmtInput::Polynomial(p) => {
                let m = p.m;
                if p.chart_box.len() != m {
                    return Err(Error::input(format!("box must list {m} intervals")));
                }
                let parse = |rows: &[Vec<Vec<PolyTerm>>]| -> Result<Vec<Vec<Poly>>> {
                    rows.iter().map(|r| r.iter().map(|terms| Poly::from_json_terms(terms, m)).collect()).collect()
                };
                let region = chart_box(&p.chart_box)?.shrink(&decimal_rational(p.margin)?)?;
                let metric = MetricChart::new(m, parse(&p.g)?, region.center())?;
                let tensor = EnergyMomentum::new(m, parse(&p.tensor)?)?;
                let samples = region.halton(SAMPLE_COUNT)?;
                Ok(EmtProblem::Polynomial { metric, tensor, samples })
            }
            EmtInput::Preset(p) => match p.preset.as_str() {
                "sphere-inverse-metric" => {
                    let bounds = p.chart_box.clone().unwrap_or(vec![[0.0, std::f64::consts::PI], [0.0, 2.0 * std::f64::consts::PI]]);
                    if bounds.len() != 2 {
                        return Err(Error::input("the sphere chart has 2 coordinates"));
                    }
                    let region = chart_box(&bounds)?.shrink(&decimal_rational(p.margin.unwrap_or(0.1))?)?;
                    let samples = region.halton(SAMPLE_COUNT)?.iter().map(|q| to_f64s(q)).collect();
                    Ok(EmtProblem::Numeric { chart: numeric::sphere_inverse_metric(), samples })
                }
                other => Err(Error::input(format!("unknown preset {other:?}"))),
            },
        }
    }
}

impl EmtProblem {
    pub fn m(&self) -> usize {
        match self {
            EmtProblem::Polynomial { metric, .. } => metric.m,
            EmtProblem::Numeric { chart, .. } => chart.m,
        }
    }

    pub fn run(&self, backend: Backend) -> Result<EquivalenceReport> {
        match (self, backend) {
            (EmtProblem::Polynomial { metric, tensor, samples }, Backend::Exact) => {
                verify_equivalence_exact(metric, tensor, samples)
            }
            (EmtProblem::Polynomial { metric, tensor, samples }, Backend::Numeric) => {
                let points: Vec<Vec<f64>> = samples.iter().map(|q| to_f64s(q)).collect();
                verify_equivalence_numeric(&numeric_chart(metric, tensor), &points)
            }
            (EmtProblem::Numeric { chart, samples }, Backend::Numeric) => verify_equivalence_numeric(chart, samples),
            (EmtProblem::Numeric { .. }, Backend::Exact) => {
                Err(Error::input("this chart is not polynomial; use the numeric backend"))
            }
        }
    }
}
