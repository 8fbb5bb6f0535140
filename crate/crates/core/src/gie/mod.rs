//! Generalized isometric embedding: `ψ`-data, the Gauss map and its
//! pre-images, the rank certificate, explicit ordinary integral flags and the
//! dimension ledger.

pub mod flag;
pub mod gauss;
pub mod ledger;
pub mod preimage;
pub mod psi;
pub mod sigma;

use num_traits::Zero;
use serde::Serialize;

use crate::eds::{cartan_characters_by_expansion, CartanReport, Verdict};
use crate::error::Result;
use crate::rational::Rational;

pub use flag::{build_integral_flag, check_flag, gie_ideal, grassmann_pullback, observed_codimension, FlagCheck};
pub use gauss::{
    cartan_identity_residual, flag_subspace_test, gauss_differential, gauss_map, jacobian_rank_certificate,
    CurvatureElement, RankCertificate, SecondFundamental,
};
pub use ledger::{dimension_ledger, DimensionLedger};
pub use preimage::{construct_preimage, minimal_kappa, solve_gauss_equation};
pub use psi::{normalize_psi, random_psi, PsiData};
pub use sigma::SigmaIndexMap;

/// The three contracts of the submersion lemma at one point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    pub n: usize,
    pub m: usize,
    pub kappa: usize,
    #[serde(with = "crate::rational::serde_vec")]
    pub cartan_residual: Vec<Rational>,
    pub gauss_residual_zero: bool,
    pub open_set: bool,
    pub certificate: RankCertificate,
}

impl LemmaReport {
    pub fn cartan_residual_zero(&self) -> bool {
        self.cartan_residual.iter().all(Zero::is_zero)
    }

    pub fn passes(&self) -> bool {
        self.cartan_residual_zero() && self.gauss_residual_zero && self.open_set && self.certificate.is_full_rank()
    }
}

/// Checks residuals, open-set membership and the rank certificate at `h`.
pub fn lemma_contracts(psi: &PsiData, h: &SecondFundamental) -> Result<LemmaReport> {
    Ok(LemmaReport {
        n: h.n(),
        m: h.m(),
        kappa: h.kappa(),
        cartan_residual: cartan_identity_residual(h, psi)?,
        gauss_residual_zero: gauss_map(h).is_zero(),
        open_set: h.in_open_set(),
        certificate: jacobian_rank_certificate(h, psi)?,
    })
}

/// Builds the pre-image for `ψ` and checks the lemma's contracts there.
pub fn verify_lemma(psi: &PsiData, kappa: usize) -> Result<(SecondFundamental, LemmaReport)> {
    let h = construct_preimage(psi, kappa)?;
    let report = lemma_contracts(psi, &h)?;
    Ok((h, report))
}

/// Makes `H_{21}` equal to `H_{11}`, breaking open-set membership.
pub fn corrupt(h: &SecondFundamental) -> SecondFundamental {
    let mut out = h.clone();
    out.set_vector(1, 0, h.vector(0, 0).to_vec());
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlagReport {
    pub ledger: DimensionLedger,
    pub check: FlagCheck,
    pub cartan: Option<CartanReport>,
    pub grassmann_codim: usize,
}

impl FlagReport {
    pub fn passes(&self) -> bool {
        self.check.passes()
            && self.grassmann_codim == self.ledger.codim_v
            && self.cartan.as_ref().is_some_and(|c| c.verdict == Verdict::Ordinary && c.characters == self.ledger.characters)
    }
}

/// Builds the explicit flag at `H` (the pre-image, or a solution of the
/// Gauss equation for a prescribed `R`) and runs every check on it.
pub fn flag_pipeline(psi: &PsiData, kappa: usize, curvature: Option<&CurvatureElement>) -> Result<(SecondFundamental, FlagReport)> {
    let ledger = dimension_ledger(psi.n(), psi.m(), kappa)?;
    let h = match curvature {
        Some(r) => solve_gauss_equation(psi, r, kappa)?,
        None => construct_preimage(psi, kappa)?,
    };
    let r = gauss_map(&h);
    let ideal = gie_ideal(psi, &r, kappa)?;
    let flag = build_integral_flag(&h);
    let check = check_flag(&ideal, &flag, psi.n(), psi.m(), kappa)?;
    let grassmann_codim = observed_codimension(&ideal, &flag, psi.m())?;
    let cartan = if check.integral {
        Some(cartan_characters_by_expansion(&ideal, &flag)?.with_observed(grassmann_codim))
    } else {
        None
    };
    Ok((h, FlagReport { ledger, check, cartan, grassmann_codim }))
}
