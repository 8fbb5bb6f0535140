//! Shared strategies and brute-force oracles for the integration tests.
#![allow(dead_code)]

use conslaw_core::eds::{AlgebraicIdeal, IntegralElement};
use conslaw_core::exterior::{subsets, ExteriorForm};
use conslaw_core::gie::{build_integral_flag, construct_preimage, gauss_map, gie_ideal, random_psi};
use conslaw_core::linalg;
use conslaw_core::rational::{frac, Rational};
use proptest::prelude::*;

pub fn small_rational() -> impl Strategy<Value = Rational> {
    (-9i64..=9, 1i64..=6).prop_map(|(p, q)| frac(p, q))
}

/// Strictly increasing index list of length `k` drawn from `0..dim`.
pub fn subset(dim: usize, k: usize) -> impl Strategy<Value = Vec<usize>> {
    proptest::sample::subsequence((0..dim).collect::<Vec<_>>(), k)
}

pub fn form(dim: usize, degree: usize) -> impl Strategy<Value = ExteriorForm> {
    proptest::collection::vec((subset(dim, degree), small_rational()), 0..5).prop_map(move |terms| {
        let mut f = ExteriorForm::zero(dim, degree);
        for (idx, c) in terms {
            f = f.add(&ExteriorForm::monomial(dim, &idx, c).unwrap()).unwrap();
        }
        f
    })
}

/// `(dim, form)` with `dim ≤ max_dim` and any degree.
pub fn any_form(max_dim: usize) -> impl Strategy<Value = ExteriorForm> {
    (1..=max_dim).prop_flat_map(|dim| (0..=dim).prop_flat_map(move |deg| form(dim, deg)))
}

pub fn vector(dim: usize) -> impl Strategy<Value = Vec<Rational>> {
    proptest::collection::vec(small_rational(), dim)
}

/// All permutations of `0..k` with their signs, by Heap's algorithm.
pub fn permutations(k: usize) -> Vec<(Vec<usize>, i64)> {
    fn heap(k: usize, a: &mut Vec<usize>, sign: &mut i64, out: &mut Vec<(Vec<usize>, i64)>) {
        if k <= 1 {
            out.push((a.clone(), *sign));
            return;
        }
        for i in 0..k - 1 {
            heap(k - 1, a, sign, out);
            if k.is_multiple_of(2) {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
            *sign = -*sign;
        }
        heap(k - 1, a, sign, out);
    }
    let mut out = Vec::new();
    let mut a: Vec<usize> = (0..k).collect();
    let mut sign = 1;
    heap(k, &mut a, &mut sign, &mut out);
    out
}

/// Parity of a sequence of distinct integers by counting inversions.
pub fn inversion_sign(seq: &[usize]) -> i64 {
    let mut inv = 0;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `α(v_1, …, v_p) = Σ_I c_I Σ_π sgn π Π_k v_{π(k)}[I_k]`.
pub fn evaluate_by_permutations(f: &ExteriorForm, vectors: &[Vec<Rational>]) -> Rational {
    let p = vectors.len();
    let perms = permutations(p);
    let mut total = Rational::from_integer(0.into());
    for (idx, c) in f.terms() {
        let ix = idx.indices();
        for (perm, sign) in &perms {
            let mut prod = c.clone() * Rational::from_integer((*sign).into());
            for k in 0..p {
                prod *= &vectors[perm[k]][ix[k]];
            }
            total += prod;
        }
    }
    total
}

/// Wedge product by concatenating index lists and counting inversions.
pub fn wedge_by_inversions(a: &ExteriorForm, b: &ExteriorForm) -> ExteriorForm {
    let dim = a.dim();
    let mut out = ExteriorForm::zero(dim, a.degree() + b.degree());
    for (i, x) in a.terms() {
        for (j, y) in b.terms() {
            let joined: Vec<usize> = i.indices().iter().chain(j.indices()).copied().collect();
            let mut sorted = joined.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() != joined.len() {
                continue;
            }
            let c = x * y * Rational::from_integer(inversion_sign(&joined).into());
            out = out.add(&ExteriorForm::monomial(dim, &sorted, c).unwrap()).unwrap();
        }
    }
    out
}

pub fn unit(dim: usize, k: usize) -> Vec<Rational> {
    (0..dim).map(|i| Rational::from_integer(((i == k) as i64).into())).collect()
}

pub fn gie_instance(n: usize, m: usize, seed: u64) -> (AlgebraicIdeal, IntegralElement) {
    let psi = random_psi(n, m, seed).unwrap();
    let kappa = (n - 1) * (m - 1);
    let h = construct_preimage(&psi, kappa).unwrap();
    let ideal = gie_ideal(&psi, &gauss_map(&h), kappa).unwrap();
    (ideal, build_integral_flag(&h))
}

/// Polar-space codimension straight from the definition: the linear
/// functionals `v ↦ φ(v, e_J)` for every generator `φ` and every
/// `J ⊂ {1..q}` of size `deg φ − 1`, each evaluated on the unit vectors.
pub fn polar_codim_by_definition(ideal: &AlgebraicIdeal, basis: &[Vec<Rational>]) -> usize {
    let dim = ideal.dim();
    let mut rows = Vec::new();
    for g in ideal.generators() {
        let d = g.degree();
        if d == 0 || d - 1 > basis.len() {
            continue;
        }
        for j in subsets(basis.len(), d - 1) {
            let row: Vec<Rational> = (0..dim)
                .map(|k| {
                    let mut args = vec![unit(dim, k)];
                    args.extend(j.iter().map(|&t| basis[t].clone()));
                    evaluate_by_permutations(g, &args)
                })
                .collect();
            rows.push(row);
        }
    }
    linalg::rank(&rows)
}
