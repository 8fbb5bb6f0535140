//! Explicit points of the solution set of the Gauss and Cartan equations.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};
use crate::rational::Rational;

use super::gauss::{curvature_indices, gauss_map, impose_cartan_identity, unit_vector, CurvatureElement, SecondFundamental};
use super::psi::PsiData;

/// `(n−1)(m−1)`, the smallest admissible embedding codimension.
pub fn minimal_kappa(n: usize, m: usize) -> usize {
    (n - 1) * (m - 1)
}

/// Symmetric coefficients `A^{iλ}_j` (0-based `i, j < n−1`, `λ < m−1`) with
/// `A^{iλ}_1 = A^{1λ}_i = (−1)^{m+λ+1} ψ^i_{Λ∖λ}` and all others zero.
pub fn preimage_coefficients(psi: &PsiData) -> Vec<Vec<Vec<Rational>>> {
    let (n, m) = (psi.n(), psi.m());
    let mut a = vec![vec![vec![Rational::zero(); n - 1]; m - 1]; n - 1];
    for i in 0..n - 1 {
        for l in 0..m - 1 {
            // 1-based exponent m+λ+1 has the parity of m + l
            let c = if (m + l) % 2 == 0 { psi.get(i, l).clone() } else { -psi.get(i, l).clone() };
            a[i][l][0] = c.clone();
            a[0][l][i] = c;
        }
    }
    a
}

/// A point with `G(H) = 0` satisfying the Cartan identities:
/// `{H_{iλ}}_{i<n, λ<m}` are the first standard basis vectors of `W` in
/// `(i, λ)` order, `H_{nλ} = 0`, and `H_{jm} = Σ A^{iλ}_j H_{iλ}`.
pub fn construct_preimage(psi: &PsiData, kappa: usize) -> Result<SecondFundamental> {
    let (n, m) = (psi.n(), psi.m());
    let min = minimal_kappa(n, m);
    if kappa < min {
        return Err(Error::input(format!("κ = {kappa} is below the minimum (n−1)(m−1) = {min}")));
    }
    if !psi.is_normalized() {
        return Err(Error::input("ψ must be normalized"));
    }
    let mut h = SecondFundamental::zero(n, m, kappa);
    for i in 0..n - 1 {
        for l in 0..m - 1 {
            h.set_vector(i, l, unit_vector(kappa, i * (m - 1) + l));
        }
    }
    let a = preimage_coefficients(psi);
    for j in 0..n - 1 {
        let mut v = vec![Rational::zero(); kappa];
        for i in 0..n - 1 {
            for l in 0..m - 1 {
                let c = &a[i][l][j];
                if !c.is_zero() {
                    v[i * (m - 1) + l] += c;
                }
            }
        }
        h.set_vector(j, m - 1, v);
    }
    Ok(h)
}

/// Solves `G(H) = R` together with the Cartan identities, starting from the
/// preimage and adjusting the `H_{kν}`, `k, ν ≥ 2`, one block at a time.
///
/// With `ν` outermost, block `(k, ν)` reads
/// `Σ_a H^a_{iλ} H^a_{kν} = R^i_{k;λν} + H_{iν}·H_{kλ}` (`i < k`, `λ < ν`),
/// which is linear in `H_{kν}` because every other vector involved is already
/// fixed. `H_{1m}` is refreshed from the Cartan identity as it changes.
pub fn solve_gauss_equation(psi: &PsiData, r: &CurvatureElement, kappa: usize) -> Result<SecondFundamental> {
    let (n, m) = (psi.n(), psi.m());
    if r.n() != n || r.m() != m {
        return Err(Error::input("curvature element and ψ have different shapes"));
    }
    let mut h = construct_preimage(psi, kappa)?;
    for nu in 1..m {
        for k in 1..n {
            let mut rows: Matrix = Vec::new();
            let mut rhs = Vec::new();
            for i in 0..k {
                for l in 0..nu {
                    let lhs_vec = h.vector(i, l).to_vec();
                    let target = r.get(i, k, l, nu) + linalg::dot(h.vector(i, nu), h.vector(k, l));
                    rhs.push(target - linalg::dot(&lhs_vec, h.vector(k, nu)));
                    rows.push(lhs_vec);
                }
            }
            let delta = linalg::solve(&rows, &rhs).ok_or_else(|| {
                Error::violation(format!("Gauss equation block (k={}, ν={}) is singular at this point", k + 1, nu + 1))
            })?;
            let updated: Vec<Rational> = h.vector(k, nu).iter().zip(&delta).map(|(x, d)| x + d).collect();
            h.set_vector(k, nu, updated);
            if nu < m - 1 {
                impose_cartan_identity(&mut h, psi)?;
            }
        }
    }
    let residual = gauss_map(&h).sub(r);
    if !residual.is_zero() {
        let (idx, v) = curvature_indices(n, m)
            .into_iter()
            .zip(residual.values().iter().cloned())
            .find(|(_, v)| !v.is_zero())
            .expect("nonzero residual");
        return Err(Error::violation(format!("Gauss equation residual {v} at {idx:?}")));
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gie::gauss::cartan_identity_residual;
    use crate::gie::psi::random_psi;
    use crate::rational::{frac, int};

    #[test]
    fn two_by_two_preimage() {
        let s = frac(-7, 3);
        let psi = PsiData::new(2, 2, vec![vec![s.clone(), int(1)], vec![int(2), int(0)]]).unwrap();
        let h = construct_preimage(&psi, 1).unwrap();
        assert_eq!(h.vector(0, 0), &[int(1)][..]);
        assert_eq!(h.vector(0, 1), &[s][..]);
        assert!(h.vector(1, 0)[0].is_zero() && h.vector(1, 1)[0].is_zero());
        assert!(gauss_map(&h).is_zero());
        assert!(construct_preimage(&psi, 0).is_err());
    }

    #[test]
    fn solves_prescribed_curvature() {
        let psi = random_psi(3, 3, 11).unwrap();
        let values: Vec<Rational> = (0..9).map(|k| frac(k - 4, 3)).collect();
        let r = CurvatureElement::from_values(3, 3, values).unwrap();
        let h = solve_gauss_equation(&psi, &r, 4).unwrap();
        assert_eq!(gauss_map(&h), r);
        assert!(cartan_identity_residual(&h, &psi).unwrap().iter().all(Zero::is_zero));
    }
}
