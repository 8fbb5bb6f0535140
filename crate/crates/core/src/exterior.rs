//! Sparse alternating forms over a labeled coframe.
//!
//! A form of degree `p` on an `m`-dimensional space stores one coefficient per
//! strictly increasing multi-index `I = (i_1 < … < i_p)`, standing for
//! `θ^{i_1} ∧ … ∧ θ^{i_p}`. Indices are 0-based. Zero coefficients are never
//! stored. Every reordering sign goes through [`sort_with_sign`].

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Coefficient ring of a form: rationals, chart polynomials, or floats.
pub trait Coefficient:
    Clone
    + PartialEq
    + fmt::Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
}

impl<T> Coefficient for T where
    T: Clone
        + PartialEq
        + fmt::Debug
        + Zero
        + One
        + Neg<Output = T>
        + Add<Output = T>
        + Sub<Output = T>
        + Mul<Output = T>
{
}

/// Sorts `indices`, returning the sign of the sorting permutation, or `None`
/// when an index repeats (the wedge monomial vanishes).
pub fn sort_with_sign(indices: &[usize]) -> Option<(i8, Vec<usize>)> {
    let mut v = indices.to_vec();
    let mut sign = 1i8;
    // insertion sort; each adjacent swap is one transposition
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && v[j - 1] == v[j] {
            return None;
        }
    }
    Some((sign, v))
}

/// Strictly increasing index set.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    pub fn new(indices: Vec<usize>, dim: usize) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::input(format!("multi-index {indices:?} is not strictly increasing")));
        }
        if indices.iter().any(|&i| i >= dim) {
            return Err(Error::input(format!("multi-index {indices:?} exceeds dimension {dim}")));
        }
        Ok(MultiIndex(indices))
    }

    pub fn empty() -> Self {
        MultiIndex(Vec::new())
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `(0, …, m-1)` without `k`.
    pub fn complement_of(k: usize, dim: usize) -> Self {
        MultiIndex((0..dim).filter(|&i| i != k).collect())
    }

    pub fn full(dim: usize) -> Self {
        MultiIndex((0..dim).collect())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        write!(f, "{}", labels.join(","))
    }
}

/// All strictly increasing `k`-subsets of `0..n`, in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut current, &mut out);
    out
}

/// Homogeneous alternating form with coefficients in `C`.
#[derive(Clone, Debug, PartialEq)]
pub struct Form<C> {
    dim: usize,
    degree: usize,
    terms: BTreeMap<MultiIndex, C>,
}

pub type ExteriorForm = Form<Rational>;

impl<C: Coefficient> Form<C> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Form { dim, degree, terms: BTreeMap::new() }
    }

    /// The constant 0-form `c`.
    pub fn scalar(dim: usize, c: C) -> Self {
        let mut f = Self::zero(dim, 0);
        f.add_term(MultiIndex::empty(), c);
        f
    }

    /// The basis 1-form `θ^i`.
    pub fn basis(dim: usize, i: usize) -> Self {
        Self::monomial(dim, &[i], C::one()).expect("basis index within dimension")
    }

    /// `c · θ^{i_1} ∧ … ∧ θ^{i_p}` for indices in any order.
    pub fn monomial(dim: usize, indices: &[usize], c: C) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= dim) {
            return Err(Error::input(format!("index {bad} exceeds dimension {dim}")));
        }
        let mut f = Self::zero(dim, indices.len());
        if let Some((sign, sorted)) = sort_with_sign(indices) {
            let c = if sign < 0 { -c } else { c };
            f.add_term(MultiIndex(sorted), c);
        }
        Ok(f)
    }

    /// Builds a form from `(indices, coefficient)` pairs; indices may be unsorted.
    pub fn from_terms(dim: usize, degree: usize, terms: Vec<(Vec<usize>, C)>) -> Result<Self> {
        let mut f = Self::zero(dim, degree);
        for (idx, c) in terms {
            if idx.len() != degree {
                return Err(Error::input(format!("term {idx:?} has degree {} not {degree}", idx.len())));
            }
            f = f.add(&Self::monomial(dim, &idx, c)?)?;
        }
        Ok(f)
    }

    /// The 1-form `Σ_k c_k θ^k`.
    pub fn one_form(coefficients: &[C]) -> Self {
        let dim = coefficients.len();
        let mut f = Self::zero(dim, 1);
        for (k, c) in coefficients.iter().enumerate() {
            f.add_term(MultiIndex(vec![k]), c.clone());
        }
        f
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, index: &MultiIndex) -> C {
        self.terms.get(index).cloned().unwrap_or_else(C::zero)
    }

    /// Coefficient of `θ^{indices}` where `indices` may be unsorted.
    pub fn coefficient_of(&self, indices: &[usize]) -> C {
        match sort_with_sign(indices) {
            Some((sign, sorted)) => {
                let c = self.coefficient(&MultiIndex(sorted));
                if sign < 0 {
                    -c
                } else {
                    c
                }
            }
            None => C::zero(),
        }
    }

    fn add_term(&mut self, index: MultiIndex, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&index) {
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.terms.insert(index, sum);
                }
            }
            None => {
                self.terms.insert(index, c);
            }
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim || self.degree != other.degree {
            return Err(Error::input(format!(
                "shape mismatch: (dim {}, degree {}) vs (dim {}, degree {})",
                self.dim, self.degree, other.dim, other.degree
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_coefficients(|c| -c.clone())
    }

    pub fn scale(&self, s: &C) -> Self {
        self.map_coefficients(|c| c.clone() * s.clone())
    }

    /// Applies `f` to every coefficient, dropping results that vanish.
    pub fn map_coefficients<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> Form<D> {
        let mut out = Form::zero(self.dim, self.degree);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), f(c));
        }
        out
    }

    /// Exterior product.
    pub fn wedge(&self, other: &Self) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::input(format!(
                "wedge of forms on dimensions {} and {}",
                self.dim, other.dim
            )));
        }
        let mut out = Self::zero(self.dim, self.degree + other.degree);
        if out.degree > self.dim {
            return Ok(out);
        }
        let mut joined = Vec::with_capacity(out.degree);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                joined.clear();
                joined.extend_from_slice(&a.0);
                joined.extend_from_slice(&b.0);
                if let Some((sign, sorted)) = sort_with_sign(&joined) {
                    let c = ca.clone() * cb.clone();
                    out.add_term(MultiIndex(sorted), if sign < 0 { -c } else { c });
                }
            }
        }
        Ok(out)
    }

    /// Interior product `v ⌟ self`, contracting the first slot.
    pub fn interior_product(&self, v: &[C]) -> Result<Self> {
        if v.len() != self.dim {
            return Err(Error::input(format!(
                "vector of length {} contracted with a form on dimension {}",
                v.len(),
                self.dim
            )));
        }
        if self.degree == 0 {
            return Err(Error::input("interior product of a 0-form"));
        }
        let mut out = Self::zero(self.dim, self.degree - 1);
        for (idx, c) in &self.terms {
            for (pos, &k) in idx.0.iter().enumerate() {
                if v[k].is_zero() {
                    continue;
                }
                // θ^{i_1..i_p} = (-1)^pos θ^k ∧ (rest)
                let mut rest = idx.0.clone();
                rest.remove(pos);
                let term = c.clone() * v[k].clone();
                out.add_term(MultiIndex(rest), if pos % 2 == 1 { -term } else { term });
            }
        }
        Ok(out)
    }

    /// `self(v_1, …, v_p)` as a sum of `p × p` minors.
    pub fn evaluate(&self, vectors: &[Vec<C>]) -> Result<C> {
        if vectors.len() != self.degree {
            return Err(Error::input(format!(
                "{}-form evaluated on {} vectors",
                self.degree,
                vectors.len()
            )));
        }
        if let Some(v) = vectors.iter().find(|v| v.len() != self.dim) {
            return Err(Error::input(format!(
                "vector of length {} for a form on dimension {}",
                v.len(),
                self.dim
            )));
        }
        let mut total = C::zero();
        for (idx, c) in &self.terms {
            let minor: Vec<Vec<C>> =
                idx.0.iter().map(|&row| vectors.iter().map(|v| v[row].clone()).collect()).collect();
            let d = laplace_determinant(&minor);
            if !d.is_zero() {
                total = total + c.clone() * d;
            }
        }
        Ok(total)
    }

    /// Pullback along a linear change of coframe: each `θ^k` is replaced by
    /// the 1-form `images[k]` (all on a common target dimension).
    pub fn substitute(&self, images: &[Form<C>]) -> Result<Form<C>> {
        if images.len() != self.dim {
            return Err(Error::input(format!(
                "{} images supplied for a coframe of dimension {}",
                images.len(),
                self.dim
            )));
        }
        let target = images.first().map_or(0, |f| f.dim);
        if images.iter().any(|f| f.degree != 1 || f.dim != target) {
            return Err(Error::input("substitution images must be 1-forms on one dimension"));
        }
        let mut out = Form::zero(target, self.degree);
        for (idx, c) in &self.terms {
            let mut product = Form::scalar(target, c.clone());
            for &k in &idx.0 {
                product = product.wedge(&images[k])?;
                if product.is_zero() {
                    break;
                }
            }
            out = out.add(&product)?;
        }
        Ok(out)
    }
}

impl<C: Coefficient + fmt::Display> fmt::Display for Form<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| if k.is_empty() { format!("{c}") } else { format!("({c}) θ^{{{k}}}") })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Determinant by cofactor expansion along the first row, skipping zeros.
/// Only ring operations are used, so it applies to any coefficient type.
pub fn laplace_determinant<C: Coefficient>(m: &[Vec<C>]) -> C {
    match m.len() {
        0 => C::one(),
        1 => m[0][0].clone(),
        2 => m[0][0].clone() * m[1][1].clone() - m[0][1].clone() * m[1][0].clone(),
        n => {
            let mut total = C::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<C>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, x)| x.clone()).collect())
                    .collect();
                let sub = laplace_determinant(&minor);
                if sub.is_zero() {
                    continue;
                }
                let term = m[0][j].clone() * sub;
                total = if j % 2 == 0 { total + term } else { total - term };
            }
            total
        }
    }
}

/// A tuple of forms of common dimension and degree, `φ = E_i φ^i`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorValuedForm<C> {
    components: Vec<Form<C>>,
}

impl<C: Coefficient> VectorValuedForm<C> {
    pub fn new(components: Vec<Form<C>>) -> Result<Self> {
        if let Some(first) = components.first() {
            if components.iter().any(|c| c.dim != first.dim || c.degree != first.degree) {
                return Err(Error::input("vector-valued form components differ in dimension or degree"));
            }
        }
        Ok(VectorValuedForm { components })
    }

    pub fn rank(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Form<C>] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Form<C> {
        &self.components[i]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Form::is_zero)
    }
}
