//! Coefficients of the covariantly closed `(m-1)`-form
//! `φ^i = Σ_λ ψ^i_{Λ∖λ} η^{Λ∖λ}` and their normalization.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exterior::{ExteriorForm, MultiIndex, VectorValuedForm};
use crate::linalg::{self, Matrix};
use crate::rational::{self, Rational};

use super::gauss::CurvatureElement;

/// `values[i][λ] = ψ^{i}_{Λ∖λ}` (0-based), `n` rows of `m` entries.
#[derive(Clone, Debug, PartialEq)]
pub struct PsiData {
    n: usize,
    m: usize,
    values: Matrix,
}

impl PsiData {
    pub fn new(n: usize, m: usize, values: Matrix) -> Result<Self> {
        if n < 2 || m < 2 {
            return Err(Error::input(format!("need n ≥ 2 and m ≥ 2, got n = {n}, m = {m}")));
        }
        if values.len() != n || values.iter().any(|r| r.len() != m) {
            return Err(Error::input(format!("psi must be {n} rows of {m} entries")));
        }
        Ok(PsiData { n, m, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn get(&self, i: usize, lambda: usize) -> &Rational {
        &self.values[i][lambda]
    }

    pub fn is_degenerate(&self) -> bool {
        self.values.iter().flatten().all(Zero::is_zero)
    }

    /// `ψ^1_{Λ∖m} = 1` and `ψ^i_{Λ∖m} = 0` for `i ≥ 2`.
    pub fn is_normalized(&self) -> bool {
        let last = self.m - 1;
        self.values[0][last].is_one() && self.values[1..].iter().all(|r| r[last].is_zero())
    }

    /// `φ` as a vector-valued form on the base coframe.
    pub fn form(&self) -> VectorValuedForm<Rational> {
        let components = self
            .values
            .iter()
            .map(|row| {
                let mut phi = ExteriorForm::zero(self.m, self.m - 1);
                for (lambda, c) in row.iter().enumerate() {
                    let idx = MultiIndex::complement_of(lambda, self.m);
                    let term = ExteriorForm::monomial(self.m, idx.indices(), c.clone()).expect("valid index");
                    phi = phi.add(&term).expect("same shape");
                }
                phi
            })
            .collect();
        VectorValuedForm::new(components).expect("uniform shape")
    }

    /// Reads the coefficients back from `(m-1)`-form components.
    pub fn from_form(phi: &VectorValuedForm<Rational>) -> Result<Self> {
        let first = phi.components().first().ok_or_else(|| Error::input("empty form"))?;
        let m = first.dim();
        if first.degree() + 1 != m {
            return Err(Error::input("psi data describes (m-1)-forms"));
        }
        let values = phi
            .components()
            .iter()
            .map(|c| (0..m).map(|lambda| c.coefficient(&MultiIndex::complement_of(lambda, m))).collect())
            .collect();
        PsiData::new(phi.rank(), m, values)
    }

    pub fn to_json(&self) -> PsiJson {
        PsiJson {
            n: self.n,
            m: self.m,
            psi: self.values.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect(),
            curvature: None,
        }
    }
}

/// One curvature component in an input file, 1-based indices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurvatureEntry {
    pub i: usize,
    pub j: usize,
    pub lambda: usize,
    pub mu: usize,
    pub value: String,
}

/// `{ "n", "m", "psi": [[ "p/q", … ] × m] × n, "R"?: [...] }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PsiJson {
    pub n: usize,
    pub m: usize,
    pub psi: Vec<Vec<String>>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub curvature: Option<Vec<CurvatureEntry>>,
}

impl PsiJson {
    pub fn psi_data(&self) -> Result<PsiData> {
        let values = self
            .psi
            .iter()
            .map(|row| row.iter().map(|s| rational::parse(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Matrix>>()?;
        PsiData::new(self.n, self.m, values)
    }

    /// The prescribed curvature, if any, converted to 0-based indices.
    pub fn curvature_element(&self) -> Result<Option<CurvatureElement>> {
        let Some(entries) = &self.curvature else { return Ok(None) };
        let converted = entries
            .iter()
            .map(|e| {
                if e.i == 0 || e.j == 0 || e.lambda == 0 || e.mu == 0 {
                    return Err(Error::input("curvature indices are 1-based"));
                }
                Ok((e.i - 1, e.j - 1, e.lambda - 1, e.mu - 1, rational::parse(&e.value)?))
            })
            .collect::<Result<Vec<_>>>()?;
        CurvatureElement::from_entries(self.n, self.m, &converted).map(Some)
    }
}

/// Normalized data together with the change of frame that produced it:
/// `φ_new = scale · Q · (φ_old with η^{swap.0} ↔ η^{swap.1})`.
#[derive(Clone, Debug, PartialEq)]
pub struct Normalization {
    pub psi: PsiData,
    pub base_swap: Option<(usize, usize)>,
    pub fiber_rotation: Matrix,
    pub scale: Rational,
}

impl Normalization {
    pub fn is_identity(&self) -> bool {
        self.base_swap.is_none() && self.scale.is_one() && self.fiber_rotation == identity(self.psi.n)
    }
}

fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect()
}

fn column(values: &Matrix, lambda: usize) -> Vec<Rational> {
    values.iter().map(|r| r[lambda].clone()).collect()
}

/// Brings `ψ` to the normalized shape by a base transposition, an orthogonal
/// change of fiber frame (a Householder reflection) and a rescaling of `φ`.
///
/// The reflection is exact only when the chosen column has a rational norm,
/// so some column must have one.
pub fn normalize_psi(raw: &PsiData) -> Result<Normalization> {
    if raw.is_degenerate() {
        return Err(Error::input("psi is identically zero; φ must be non-vanishing"));
    }
    let (n, m) = (raw.n, raw.m);
    if n == 2 && m == 2 && linalg::determinant(&raw.values).is_zero() {
        return Err(Error::unsupported("n = m = 2 requires det ψ ≠ 0"));
    }
    if raw.is_normalized() {
        return Ok(Normalization { psi: raw.clone(), base_swap: None, fiber_rotation: identity(n), scale: Rational::one() });
    }
    let last = m - 1;
    let norm_of = |lambda: usize| {
        let v = column(&raw.values, lambda);
        let sq = linalg::dot(&v, &v);
        if sq.is_zero() {
            None
        } else {
            rational::sqrt_exact(&sq)
        }
    };
    let chosen = std::iter::once(last).chain(0..last).find(|&l| norm_of(l).is_some()).ok_or_else(|| {
        Error::unsupported("no column of ψ has a rational Euclidean norm; exact normalization needs one")
    })?;
    let r = norm_of(chosen).expect("checked above");

    let mut values = raw.values.clone();
    let mut base_swap = None;
    if chosen != last {
        let images: Vec<ExteriorForm> = (0..m)
            .map(|k| {
                let target = if k == chosen { last } else if k == last { chosen } else { k };
                ExteriorForm::basis(m, target)
            })
            .collect();
        let swapped: Vec<ExteriorForm> =
            raw.form().components().iter().map(|c| c.substitute(&images)).collect::<Result<_>>()?;
        values = PsiData::from_form(&VectorValuedForm::new(swapped)?)?.values;
        base_swap = Some((chosen, last));
    }

    let v = column(&values, last);
    let mut u = v.clone();
    u[0] -= &r;
    let uu = linalg::dot(&u, &u);
    let rotation: Matrix = if uu.is_zero() {
        identity(n)
    } else {
        let factor = Rational::from_integer(2.into()) / &uu;
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let delta = if i == j { Rational::one() } else { Rational::zero() };
                        delta - &factor * &u[i] * &u[j]
                    })
                    .collect()
            })
            .collect()
    };
    let scale = r.recip();
    let rotated = linalg::mat_mul(&rotation, &values);
    let scaled: Matrix = rotated.iter().map(|row| row.iter().map(|x| x * &scale).collect()).collect();
    let psi = PsiData::new(n, m, scaled)?;
    debug_assert!(psi.is_normalized());
    Ok(Normalization { psi, base_swap, fiber_rotation: rotation, scale })
}

/// Seed-deterministic normalized `ψ`: entries `p/q` with `|p| ≤ 10`,
/// `1 ≤ q ≤ 10`, last column a nonzero multiple of a fiber basis vector.
pub fn random_psi(n: usize, m: usize, seed: u64) -> Result<PsiData> {
    if n < 2 || m < 2 {
        return Err(Error::input(format!("need n ≥ 2 and m ≥ 2, got n = {n}, m = {m}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| rational::frac(rng.gen_range(-10..=10), rng.gen_range(1..=10));
    loop {
        let mut values = vec![vec![Rational::zero(); m]; n];
        for row in values.iter_mut() {
            for x in row[..m - 1].iter_mut() {
                *x = draw(&mut rng);
            }
        }
        let mut c = draw(&mut rng);
        while c.is_zero() {
            c = draw(&mut rng);
        }
        let j = rng.gen_range(0..n);
        values[j][m - 1] = c;
        let raw = PsiData::new(n, m, values)?;
        if n == 2 && m == 2 && linalg::determinant(&raw.values).is_zero() {
            continue;
        }
        return Ok(normalize_psi(&raw)?.psi);
    }
}

/// `(-1)^{λ+1}` for the 1-based base index, i.e. `(-1)^l` for 0-based `l`.
pub(crate) fn identity_sign(l: usize) -> Rational {
    if l.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn psi(n: usize, m: usize, rows: &[&[i64]]) -> PsiData {
        PsiData::new(n, m, rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()).unwrap()
    }

    #[test]
    fn normalized_input_is_left_alone() {
        let p = PsiData::new(
            3,
            2,
            vec![vec![frac(1, 2), int(1)], vec![frac(-3, 4), int(0)], vec![int(2), int(0)]],
        )
        .unwrap();
        let norm = normalize_psi(&p).unwrap();
        assert!(norm.is_identity());
        assert_eq!(norm.psi, p);
    }

    #[test]
    fn rescales_when_only_magnitude_is_off() {
        let p = psi(2, 2, &[&[0, 2], &[1, 0]]);
        let norm = normalize_psi(&p).unwrap();
        assert_eq!(norm.scale, frac(1, 2));
        assert!(norm.psi.is_normalized());
        assert_eq!(norm.psi.values()[1][0], frac(1, 2));
    }

    #[test]
    fn reflects_and_swaps() {
        let p = psi(2, 3, &[&[3, 1, 0], &[4, 1, 0]]);
        let norm = normalize_psi(&p).unwrap();
        assert!(norm.psi.is_normalized());
        assert_eq!(norm.base_swap, Some((0, 2)));
        let q = &norm.fiber_rotation;
        assert_eq!(linalg::mat_mul(q, &linalg::transpose(q)), identity(2));
    }

    #[test]
    fn rejects_degenerate_and_unsupported() {
        assert!(matches!(normalize_psi(&psi(2, 2, &[&[0, 0], &[0, 0]])), Err(Error::Input(_))));
        assert!(matches!(normalize_psi(&psi(2, 2, &[&[1, 1], &[1, 1]])), Err(Error::Unsupported(_))));
        assert!(matches!(normalize_psi(&psi(2, 3, &[&[1, 1, 1], &[1, 1, 1]])), Err(Error::Unsupported(_))));
    }

    #[test]
    fn random_psi_is_deterministic_and_normalized() {
        for seed in 0..20 {
            let a = random_psi(3, 4, seed).unwrap();
            assert!(a.is_normalized());
            assert_eq!(a, random_psi(3, 4, seed).unwrap());
            let b = random_psi(2, 2, seed).unwrap();
            assert!(!linalg::determinant(b.values()).is_zero());
        }
    }

    #[test]
    fn json_round_trip() {
        let p = random_psi(3, 2, 5).unwrap();
        let text = serde_json::to_string(&p.to_json()).unwrap();
        let back: PsiJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.psi_data().unwrap(), p);
    }
}
