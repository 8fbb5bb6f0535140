//! Sparse multivariate polynomials with rational coefficients.
//!
//! Used as chart-level coefficient functions (exact partial derivatives) and
//! as the pulled-back generator functions on a Grassmannian chart. Variables
//! are 0-based indices; a polynomial does not fix its number of variables.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Sorted `(variable, exponent)` pairs with positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(usize, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: usize) -> Self {
        Monomial(vec![(v, 1)])
    }

    /// From a dense exponent vector.
    pub fn from_exponents(exponents: &[u32]) -> Self {
        Monomial(exponents.iter().enumerate().filter(|(_, &e)| e > 0).map(|(v, &e)| (v, e)).collect())
    }

    pub fn exponents(&self) -> &[(usize, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e).sum()
    }

    pub fn max_var(&self) -> Option<usize> {
        self.0.last().map(|&(v, _)| v)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            let (a, b) = (self.0[i], other.0[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

/// Chart-level coefficient function.
pub type ChartFunction = Poly;

impl Poly {
    pub fn constant(c: Rational) -> Self {
        let mut p = Poly::default();
        p.add_term(Monomial::one(), c);
        p
    }

    pub fn var(v: usize) -> Self {
        let mut p = Poly::default();
        p.add_term(Monomial::var(v), Rational::one());
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Poly::default();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.0.is_empty())
    }

    pub fn constant_term(&self) -> Rational {
        self.terms.get(&Monomial::one()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// One past the largest variable index used.
    pub fn variable_bound(&self) -> usize {
        self.terms.keys().filter_map(Monomial::max_var).map(|v| v + 1).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.terms.insert(m, sum);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale(&self, s: &Rational) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), c * s)))
    }

    /// Exact partial derivative with respect to variable `v`.
    pub fn derivative(&self, v: usize) -> Poly {
        let mut out = Poly::default();
        for (m, c) in &self.terms {
            if let Some(pos) = m.0.iter().position(|&(var, _)| var == v) {
                let e = m.0[pos].1;
                let mut reduced = m.0.clone();
                if e == 1 {
                    reduced.remove(pos);
                } else {
                    reduced[pos].1 = e - 1;
                }
                out.add_term(Monomial(reduced), c * Rational::from_integer(e.into()));
            }
        }
        out
    }

    pub fn evaluate(&self, point: &[Rational]) -> Result<Rational> {
        let bound = self.variable_bound();
        if bound > point.len() {
            return Err(Error::input(format!(
                "polynomial uses {bound} variables, point has {}",
                point.len()
            )));
        }
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for &(v, e) in &m.0 {
                term *= num_traits::pow(point[v].clone(), e as usize);
            }
            total += term;
        }
        Ok(total)
    }

    /// Floating-point evaluation; panics if `point` is too short.
    pub fn evaluate_f64(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| {
                m.0.iter().fold(rational::to_f64(c), |acc, &(v, e)| acc * point[v].powi(e as i32))
            })
            .sum()
    }

    /// Gradient `(∂_0 p, …)` at `point`, restricted to the listed variables.
    pub fn gradient_at(&self, point: &[Rational], vars: usize) -> Result<Vec<Rational>> {
        (0..vars).map(|v| self.derivative(v).evaluate(point)).collect()
    }
}

impl Zero for Poly {
    fn zero() -> Self {
        Poly::default()
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl One for Poly {
    fn one() -> Self {
        Poly::constant(Rational::one())
    }
}

impl Add for Poly {
    type Output = Poly;

    fn add(mut self, rhs: Poly) -> Poly {
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
        self
    }
}

impl Sub for Poly {
    type Output = Poly;

    fn sub(self, rhs: Poly) -> Poly {
        self + (-rhs)
    }
}

impl Neg for Poly {
    type Output = Poly;

    fn neg(self) -> Poly {
        Poly { terms: self.terms.into_iter().map(|(m, c)| (m, -c)).collect() }
    }
}

impl Mul for Poly {
    type Output = Poly;

    fn mul(self, rhs: Poly) -> Poly {
        let mut out = Poly::default();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let vars: Vec<String> = m
                    .0
                    .iter()
                    .map(|&(v, e)| if e == 1 { format!("x{}", v + 1) } else { format!("x{}^{e}", v + 1) })
                    .collect();
                if vars.is_empty() {
                    format!("{c}")
                } else {
                    format!("{c}*{}", vars.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// JSON term: `{ "exponents": [..], "coefficient": "p/q" }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyTerm {
    pub exponents: Vec<u32>,
    pub coefficient: String,
}

impl Poly {
    pub fn from_json_terms(terms: &[PolyTerm], vars: usize) -> Result<Poly> {
        let mut p = Poly::default();
        for t in terms {
            if t.exponents.len() != vars {
                return Err(Error::input(format!(
                    "polynomial term has {} exponents, chart has {vars} variables",
                    t.exponents.len()
                )));
            }
            p.add_term(Monomial::from_exponents(&t.exponents), rational::parse(&t.coefficient)?);
        }
        Ok(p)
    }

    pub fn to_json_terms(&self, vars: usize) -> Vec<PolyTerm> {
        self.terms
            .iter()
            .map(|(m, c)| {
                let mut exponents = vec![0; vars];
                for &(v, e) in &m.0 {
                    exponents[v] = e;
                }
                PolyTerm { exponents, coefficient: c.to_string() }
            })
            .collect()
    }
}
