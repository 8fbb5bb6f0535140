//! Pointwise exterior-ideal machinery.
//!
//! Everything here happens in one tangent space `T_z`, with the ideal given by
//! constant-coefficient generators over a labeled coframe. Vectors are
//! coordinate columns with respect to the frame dual to that coframe.

use std::collections::{BTreeMap, HashSet};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exterior::{subsets, ExteriorForm};
use crate::linalg::{self, EchelonBasis, Matrix};
use crate::rational::Rational;

/// Labels of the coframe of the ambient tangent space.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaCoframe {
    labels: Vec<String>,
}

impl SigmaCoframe {
    pub fn new(labels: Vec<String>) -> Result<Self> {
        let mut seen = HashSet::new();
        if let Some(dup) = labels.iter().find(|l| !seen.insert(l.as_str())) {
            return Err(Error::input(format!("duplicate coframe label {dup:?}")));
        }
        Ok(SigmaCoframe { labels })
    }

    /// Labels `θ1, …, θN`.
    pub fn numbered(dim: usize) -> Self {
        SigmaCoframe { labels: (1..=dim).map(|k| format!("θ{k}")).collect() }
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

/// An exterior ideal given by algebraic generators at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraicIdeal {
    coframe: SigmaCoframe,
    generators: Vec<ExteriorForm>,
}

impl AlgebraicIdeal {
    pub fn new(coframe: SigmaCoframe, generators: Vec<ExteriorForm>) -> Result<Self> {
        for (k, g) in generators.iter().enumerate() {
            if g.degree() == 0 {
                return Err(Error::input(format!("generator {k} is a 0-form")));
            }
            if g.dim() != coframe.dim() {
                return Err(Error::input(format!(
                    "generator {k} lives on dimension {}, coframe has {}",
                    g.dim(),
                    coframe.dim()
                )));
            }
        }
        Ok(AlgebraicIdeal { coframe, generators })
    }

    pub fn coframe(&self) -> &SigmaCoframe {
        &self.coframe
    }

    pub fn dim(&self) -> usize {
        self.coframe.dim()
    }

    pub fn generators(&self) -> &[ExteriorForm] {
        &self.generators
    }
}

/// A subspace given by a basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Subspace {
    pub ambient: usize,
    pub basis: Matrix,
}

impl Subspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.ambient - self.dim()
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        let mut rows = self.basis.clone();
        let before = linalg::rank(&rows);
        rows.push(v.to_vec());
        linalg::rank(&rows) == before
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        let mut rows = self.basis.clone();
        let before = linalg::rank(&rows);
        rows.extend(other.basis.iter().cloned());
        linalg::rank(&rows) == before
    }
}

/// Candidate integral element: a linearly independent list of vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct IntegralElement {
    basis: Matrix,
}

impl IntegralElement {
    pub fn new(basis: Matrix) -> Result<Self> {
        if let Some(first) = basis.first() {
            if basis.iter().any(|v| v.len() != first.len()) {
                return Err(Error::input("basis vectors of unequal length"));
            }
        }
        if linalg::rank(&basis) != basis.len() {
            return Err(Error::input("basis vectors are linearly dependent"));
        }
        Ok(IntegralElement { basis })
    }

    /// The zero subspace of a space of dimension `ambient`.
    pub fn zero() -> Self {
        IntegralElement { basis: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    /// `E_p = span(e_1, …, e_p)`.
    pub fn truncate(&self, p: usize) -> IntegralElement {
        IntegralElement { basis: self.basis[..p.min(self.basis.len())].to_vec() }
    }
}

/// A generator that does not vanish on a candidate element.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonVanishing {
    pub generator: usize,
    /// 0-based positions of the basis vectors the generator was evaluated on.
    pub vectors: Vec<usize>,
    #[serde(with = "crate::rational::serde_string")]
    pub value: Rational,
}

fn check_ambient(element: &IntegralElement, ideal: &AlgebraicIdeal) -> Result<()> {
    if element.basis.iter().any(|v| v.len() != ideal.dim()) {
        return Err(Error::input(format!(
            "element vectors do not live in the ambient dimension {}",
            ideal.dim()
        )));
    }
    Ok(())
}

/// First generator evaluation that is nonzero on some increasing sub-tuple of
/// the basis, if any.
pub fn first_nonvanishing(element: &IntegralElement, ideal: &AlgebraicIdeal) -> Result<Option<NonVanishing>> {
    check_ambient(element, ideal)?;
    for (k, g) in ideal.generators.iter().enumerate() {
        if g.degree() > element.dim() {
            continue;
        }
        for tuple in subsets(element.dim(), g.degree()) {
            let vectors: Matrix = tuple.iter().map(|&t| element.basis[t].clone()).collect();
            let value = g.evaluate(&vectors)?;
            if !value.is_zero() {
                return Ok(Some(NonVanishing { generator: k, vectors: tuple, value }));
            }
        }
    }
    Ok(None)
}

/// Whether every generator (hence every element of the ideal) vanishes on `E`.
pub fn is_integral_element(element: &IntegralElement, ideal: &AlgebraicIdeal) -> Result<bool> {
    Ok(first_nonvanishing(element, ideal)?.is_none())
}

/// Linear equations `v ↦ φ(e_{j_1}, …, e_{j_d}, v)` of the polar system of `E`.
fn polar_equations(element: &IntegralElement, ideal: &AlgebraicIdeal) -> Result<Matrix> {
    let p = element.dim();
    let mut rows = Vec::new();
    for g in &ideal.generators {
        let d = g.degree() - 1;
        if d > p {
            continue;
        }
        for tuple in subsets(p, d) {
            let mut contracted = g.clone();
            for &t in &tuple {
                contracted = contracted.interior_product(&element.basis[t])?;
            }
            if contracted.is_zero() {
                continue;
            }
            let mut row = vec![Rational::zero(); ideal.dim()];
            for (idx, c) in contracted.terms() {
                row[idx.indices()[0]] = c.clone();
            }
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Polar space `H(E) = {v : φ(v, e_1, …, e_p) = 0 for all φ ∈ I_{p+1}}`.
///
/// `I_{p+1}` is spanned by `φ_ρ ∧ β`; on an integral element this reduces to
/// `φ_ρ(v, e_J) = 0` for every generator and every `J ⊂ {1..p}` of size
/// `deg φ_ρ − 1`.
pub fn polar_space(element: &IntegralElement, ideal: &AlgebraicIdeal) -> Result<Subspace> {
    check_ambient(element, ideal)?;
    let rows = polar_equations(element, ideal)?;
    Ok(Subspace { ambient: ideal.dim(), basis: linalg::nullspace(&rows, ideal.dim()) })
}

/// `r(E) = dim H(E) − (p + 1)`.
pub fn extension_rank(element: &IntegralElement, ideal: &AlgebraicIdeal) -> Result<i64> {
    let h = polar_space(element, ideal)?;
    Ok(h.dim() as i64 - (element.dim() as i64 + 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Ordinary,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CartanReport {
    pub characters: Vec<usize>,
    pub sum: usize,
    pub observed_codim: Option<usize>,
    pub verdict: Verdict,
}

impl CartanReport {
    pub fn from_characters(characters: Vec<usize>) -> Self {
        let sum = characters.iter().sum();
        CartanReport { characters, sum, observed_codim: None, verdict: Verdict::Inconclusive }
    }

    /// Records the observed codimension and applies the Cartan test.
    pub fn with_observed(mut self, observed_codim: usize) -> Self {
        self.verdict = cartan_test(&self, observed_codim);
        self.observed_codim = Some(observed_codim);
        self
    }
}

/// One-sided Cartan test: ordinary iff the character sum equals the observed
/// codimension of the integral-element variety; anything else is inconclusive.
pub fn cartan_test(report: &CartanReport, observed_codim: usize) -> Verdict {
    if report.sum == observed_codim {
        Verdict::Ordinary
    } else {
        Verdict::Inconclusive
    }
}

/// Coframe `(ω_1, …, ω_p | π_1, …, π_s)` adapted to an element `E`: the
/// frame is `(e_1, …, e_p, f_1, …, f_s)` with the `f` chosen among the
/// ambient basis vectors, and the coframe is its dual.

#[derive(Clone, Debug, PartialEq)]
pub struct AdaptedCoframe {
    frame: Matrix,
    split: usize,
}

impl AdaptedCoframe {
    pub fn from_element(element: &IntegralElement, ambient: usize) -> Result<Self> {
        if element.basis.iter().any(|v| v.len() != ambient) {
            return Err(Error::input("element does not live in the ambient space"));
        }
        let mut basis = EchelonBasis::new();
        for e in &element.basis {
            if !basis.insert(e) {
                return Err(Error::input("element basis is dependent"));
            }
        }
        // Last coordinates first, so fiber directions complete a flag over
        // the base rather than the other way round.
        let mut chosen = Vec::new();
        for k in (0..ambient).rev() {
            let mut unit = vec![Rational::zero(); ambient];
            unit[k] = Rational::one();
            if basis.insert(&unit) {
                chosen.push(k);
            }
        }
        chosen.sort_unstable();
        let mut frame = element.basis.clone();
        for k in chosen {
            let mut unit = vec![Rational::zero(); ambient];
            unit[k] = Rational::one();
            frame.push(unit);
        }
        Ok(AdaptedCoframe { frame, split: element.dim() })
    }

    pub fn split(&self) -> usize {
        self.split
    }

    pub fn ambient(&self) -> usize {
        self.frame.len()
    }

    /// The old coframe written in the adapted one: `θ^k = Σ_l θ^k(f_l) θ'^l`.
    pub fn images(&self) -> Vec<ExteriorForm> {
        let n = self.ambient();
        (0..n)
            .map(|k| {
                let coefficients: Vec<Rational> = self.frame.iter().map(|f| f[k].clone()).collect();
                ExteriorForm::one_form(&coefficients)
            })
            .collect()
    }
}

/// The one-forms `π_ρ^J` of the expansion `φ_ρ = Σ_J π_ρ^J ∧ ω_J + φ̃_ρ`,
/// as coefficient vectors over `π_1, …, π_s`.
#[derive(Clone, Debug, PartialEq)]
pub struct Expansion {
    pub split: usize,
    /// `(generator, J)` → coefficients of `π_ρ^J`.
    pub linear_terms: BTreeMap<(usize, Vec<usize>), Vec<Rational>>,
}

/// Rewrites every generator in the adapted coframe and collects its part that
/// is linear in the `π`. A term with no `π` factor means the element is not
/// integral; it is reported as the obstruction.
pub fn expand(ideal: &AlgebraicIdeal, coframe: &AdaptedCoframe) -> Result<Expansion> {
    if coframe.ambient() != ideal.dim() {
        return Err(Error::input("adapted coframe and ideal dimensions differ"));
    }
    let split = coframe.split();
    let s = ideal.dim() - split;
    let images = coframe.images();
    let mut linear_terms: BTreeMap<(usize, Vec<usize>), Vec<Rational>> = BTreeMap::new();
    for (rho, g) in ideal.generators.iter().enumerate() {
        let rewritten = g.substitute(&images)?;
        for (idx, c) in rewritten.terms() {
            let pis: Vec<usize> = idx.indices().iter().copied().filter(|&k| k >= split).collect();
            match pis.len() {
                0 => {
                    return Err(Error::input(format!(
                        "generator {rho} has the term {c}·ω^{{{idx}}} with no π factor; \
                         the element is not integral"
                    )))
                }
                1 => {
                    let omega: Vec<usize> = idx.indices().iter().copied().filter(|&k| k < split).collect();
                    // ω_J ∧ π = (-1)^{|J|} π ∧ ω_J
                    let c = if omega.len() % 2 == 1 { -c.clone() } else { c.clone() };
                    let entry = linear_terms.entry((rho, omega)).or_insert_with(|| vec![Rational::zero(); s]);
                    entry[pis[0] - split] += c;
                }
                _ => {}
            }
        }
    }
    Ok(Expansion { split, linear_terms })
}

/// Cartan characters `C_0, …, C_{p-1}`: `C_q` is the number of independent
/// `π_ρ^J` with `J ⊂ {1, …, q}`.
pub fn characters_from_expansion(expansion: &Expansion) -> Vec<usize> {
    let p = expansion.split;
    let mut by_level: Vec<Vec<&Vec<Rational>>> = vec![Vec::new(); p + 1];
    for ((_, j), v) in &expansion.linear_terms {
        let level = j.last().map_or(0, |&last| last + 1);
        if level <= p {
            by_level[level].push(v);
        }
    }
    let mut basis = EchelonBasis::new();
    let mut characters = Vec::with_capacity(p);
    for level in by_level.iter().take(p) {
        for v in level {
            basis.insert(v);
        }
        characters.push(basis.rank());
    }
    characters
}

/// Characters of the flag `E_0 ⊂ E_1 ⊂ … ⊂ E` by the expansion method.
pub fn cartan_characters_by_expansion(ideal: &AlgebraicIdeal, element: &IntegralElement) -> Result<CartanReport> {
    let coframe = AdaptedCoframe::from_element(element, ideal.dim())?;
    let expansion = expand(ideal, &coframe)?;
    Ok(CartanReport::from_characters(characters_from_expansion(&expansion)))
}

/// Characters as polar-space codimensions along the flag, `C_q = codim H(E_q)`.
pub fn characters_by_polar_spaces(ideal: &AlgebraicIdeal, element: &IntegralElement) -> Result<Vec<usize>> {
    (0..element.dim()).map(|q| Ok(polar_space(&element.truncate(q), ideal)?.codim())).collect()
}
