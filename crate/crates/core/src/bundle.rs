//! Chart-level calculus on a vector bundle: exterior derivative of forms with
//! polynomial coefficients, connection and curvature matrices, generalized
//! torsion and Bianchi residuals.
//!
//! Forms live on the coordinate coframe `dx^1, …, dx^m` of a chart, so the
//! form dimension equals the number of chart variables.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exterior::{Form, MultiIndex, VectorValuedForm};
use crate::poly::Poly;
use crate::rational::Rational;

pub type ChartForm = Form<Poly>;

/// Exact exterior derivative `d(f dx^I) = Σ_k ∂_k f dx^k ∧ dx^I`.
pub fn exterior_derivative(form: &ChartForm) -> ChartForm {
    let m = form.dim();
    let mut out = ChartForm::zero(m, form.degree() + 1);
    if form.degree() >= m {
        return out;
    }
    for (idx, f) in form.terms() {
        for k in 0..m {
            if idx.indices().contains(&k) {
                continue;
            }
            let df = f.derivative(k);
            if df.is_zero() {
                continue;
            }
            let mut indices = vec![k];
            indices.extend_from_slice(idx.indices());
            let term = ChartForm::monomial(m, &indices, df).expect("indices within chart dimension");
            out = out.add(&term).expect("same shape");
        }
    }
    out
}

/// Evaluates every coefficient at a chart point.
pub fn evaluate_form_at(form: &ChartForm, point: &[Rational]) -> Result<Form<Rational>> {
    let mut terms = Vec::new();
    for (idx, f) in form.terms() {
        terms.push((idx.indices().to_vec(), f.evaluate(point)?));
    }
    Form::from_terms(form.dim(), form.degree(), terms)
}

/// Lifts a constant-coefficient form to chart coefficients.
pub fn constant_form(form: &Form<Rational>) -> ChartForm {
    form.map_coefficients(|c| Poly::constant(c.clone()))
}

fn check_square<T>(rows: &[Vec<T>]) -> Result<usize> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        return Err(Error::input("matrix of forms is not square"));
    }
    Ok(n)
}

/// `o(n)`-valued connection 1-form `(η^i_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConnectionForm {
    entries: Vec<Vec<ChartForm>>,
}

impl ConnectionForm {
    pub fn new(entries: Vec<Vec<ChartForm>>) -> Result<Self> {
        let n = check_square(&entries)?;
        let dim = entries.first().and_then(|r| r.first()).map_or(0, Form::dim);
        for i in 0..n {
            for j in 0..n {
                let e = &entries[i][j];
                if e.degree() != 1 || e.dim() != dim {
                    return Err(Error::input(format!("connection entry ({i},{j}) is not a 1-form on dim {dim}")));
                }
                if e.add(&entries[j][i])? != ChartForm::zero(dim, 1) {
                    return Err(Error::input(format!("connection is not antisymmetric at ({i},{j})")));
                }
            }
        }
        Ok(ConnectionForm { entries })
    }

    /// The trivial connection on a rank-`n` bundle over an `m`-dimensional chart.
    pub fn flat(n: usize, m: usize) -> Self {
        ConnectionForm { entries: vec![vec![ChartForm::zero(m, 1); n]; n] }
    }

    /// Builds an antisymmetric connection from its upper-triangular entries
    /// `η^i_j`, `i < j`, listed row by row.
    pub fn from_upper(n: usize, m: usize, upper: Vec<ChartForm>) -> Result<Self> {
        if upper.len() != n * (n - 1) / 2 {
            return Err(Error::input("wrong number of upper-triangular connection entries"));
        }
        let mut entries = vec![vec![ChartForm::zero(m, 1); n]; n];
        let mut it = upper.into_iter();
        for i in 0..n {
            for j in i + 1..n {
                let e = it.next().expect("counted above");
                entries[j][i] = e.neg();
                entries[i][j] = e;
            }
        }
        Self::new(entries)
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn dim(&self) -> usize {
        self.entries.first().and_then(|r| r.first()).map_or(0, Form::dim)
    }

    pub fn entry(&self, i: usize, j: usize) -> &ChartForm {
        &self.entries[i][j]
    }
}

/// Curvature 2-form matrix `(Ω^i_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Curvature2Form {
    entries: Vec<Vec<ChartForm>>,
}

impl Curvature2Form {
    pub fn new(entries: Vec<Vec<ChartForm>>) -> Result<Self> {
        check_square(&entries)?;
        if entries.iter().flatten().any(|e| e.degree() != 2) {
            return Err(Error::input("curvature entries must be 2-forms"));
        }
        Ok(Curvature2Form { entries })
    }

    pub fn rank(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> &ChartForm {
        &self.entries[i][j]
    }

    pub fn is_antisymmetric(&self) -> bool {
        let n = self.rank();
        (0..n).all(|i| (0..n).all(|j| self.entries[i][j].add(&self.entries[j][i]).is_ok_and(|s| s.is_zero())))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(Form::is_zero)
    }
}

/// Second structure equation `Ω^i_j = dη^i_j + η^i_k ∧ η^k_j`.
pub fn curvature_from_connection(eta: &ConnectionForm) -> Curvature2Form {
    let n = eta.rank();
    let m = eta.dim();
    let entries = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut omega = exterior_derivative(eta.entry(i, j));
                    for k in 0..n {
                        let q = eta.entry(i, k).wedge(eta.entry(k, j)).expect("common chart");
                        omega = omega.add(&q).expect("2-forms");
                    }
                    if omega.dim() != m {
                        unreachable!("curvature stays on the chart");
                    }
                    omega
                })
                .collect()
        })
        .collect();
    Curvature2Form { entries }
}

/// Generalized torsion `Θ^i = dφ^i + η^i_j ∧ φ^j`.
pub fn generalized_torsion(
    phi: &VectorValuedForm<Poly>,
    eta: &ConnectionForm,
) -> Result<VectorValuedForm<Poly>> {
    let n = phi.rank();
    if n != eta.rank() {
        return Err(Error::input(format!("form of rank {n} with a connection of rank {}", eta.rank())));
    }
    let mut components = Vec::with_capacity(n);
    for i in 0..n {
        let mut theta = exterior_derivative(phi.component(i));
        for j in 0..n {
            theta = theta.add(&eta.entry(i, j).wedge(phi.component(j))?)?;
        }
        components.push(theta);
    }
    VectorValuedForm::new(components)
}

/// Index placement for the Bianchi residuals.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BianchiConvention {
    /// `Σ_j Ω^i_j ∧ φ^j`, one residual per `i` (from `d_∇² φ`).
    Contracted,
    /// `Σ_i Ω^i_j ∧ φ^i`, one residual per `j`.
    Transposed,
}

/// Generalized Bianchi residuals; all vanish identically once `p + 2 > m`.
pub fn bianchi_residual(
    omega: &Curvature2Form,
    phi: &VectorValuedForm<Poly>,
    convention: BianchiConvention,
) -> Result<Vec<ChartForm>> {
    let n = phi.rank();
    if n != omega.rank() {
        return Err(Error::input("curvature and form ranks differ"));
    }
    let (dim, degree) = phi.components().first().map_or((0, 0), |f| (f.dim(), f.degree()));
    (0..n)
        .map(|free| {
            let mut acc = ChartForm::zero(dim, degree + 2);
            for s in 0..n {
                let term = match convention {
                    BianchiConvention::Contracted => omega.entry(free, s).wedge(phi.component(s))?,
                    BianchiConvention::Transposed => omega.entry(s, free).wedge(phi.component(s))?,
                };
                acc = acc.add(&term)?;
            }
            Ok(acc)
        })
        .collect()
}

/// `φ^i = dx^i`, the identity form of a tangent-bundle chart.
pub fn identity_form(m: usize) -> VectorValuedForm<Poly> {
    VectorValuedForm::new((0..m).map(|i| ChartForm::basis(m, i)).collect()).expect("uniform shape")
}

/// The top-degree multi-index of a chart.
pub fn volume_index(m: usize) -> MultiIndex {
    MultiIndex::full(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn dx(m: usize, i: usize) -> ChartForm {
        ChartForm::basis(m, i)
    }

    #[test]
    fn derivative_examples() {
        let c = ChartForm::monomial(2, &[0], Poly::constant(int(3))).unwrap();
        assert!(exterior_derivative(&c).is_zero());
        let f = ChartForm::monomial(2, &[1], Poly::var(0)).unwrap();
        assert_eq!(exterior_derivative(&f), ChartForm::monomial(2, &[0, 1], Poly::one()).unwrap());
        let g = ChartForm::monomial(2, &[0], Poly::var(0) * Poly::var(1)).unwrap();
        assert_eq!(exterior_derivative(&g), ChartForm::monomial(2, &[0, 1], -Poly::var(0)).unwrap());
    }

    use num_traits::One;

    #[test]
    fn curvature_examples() {
        assert!(curvature_from_connection(&ConnectionForm::flat(3, 2)).is_zero());
        let eta = ConnectionForm::from_upper(2, 2, vec![ChartForm::monomial(2, &[1], Poly::var(0)).unwrap()]).unwrap();
        let omega = curvature_from_connection(&eta);
        assert_eq!(omega.entry(0, 1), &ChartForm::monomial(2, &[0, 1], Poly::one()).unwrap());
        assert!(omega.is_antisymmetric());
    }

    #[test]
    fn torsion_examples() {
        let c = int(5);
        let eta = ConnectionForm::from_upper(2, 2, vec![dx(2, 1).scale(&Poly::constant(c.clone()))]).unwrap();
        let theta = generalized_torsion(&identity_form(2), &eta).unwrap();
        assert!(theta.component(0).is_zero());
        assert_eq!(theta.component(1), &ChartForm::monomial(2, &[0, 1], Poly::constant(c)).unwrap());
        assert!(generalized_torsion(&identity_form(3), &ConnectionForm::flat(3, 3)).unwrap().is_zero());
    }

    #[test]
    fn rejects_non_antisymmetric_connection() {
        let one = dx(2, 0);
        let entries = vec![vec![ChartForm::zero(2, 1), one.clone()], vec![one, ChartForm::zero(2, 1)]];
        assert!(ConnectionForm::new(entries).is_err());
    }
}
