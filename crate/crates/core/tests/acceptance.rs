//! End-to-end acceptance checks. Runs without the libtest harness so that
//! each criterion prints exactly one PASS/FAIL line; any failure makes the
//! process exit non-zero.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use common::{gie_instance, polar_codim_by_definition};
use conslaw_core::eds::{cartan_characters_by_expansion, Verdict};
use conslaw_core::emt::numeric::{self, NumericChart};
use conslaw_core::emt::sampling::ChartBox;
use conslaw_core::emt::{
    numeric_chart, target_dimension, verify_equivalence_exact, verify_equivalence_numeric, EnergyMomentum, MetricChart,
    SAMPLE_COUNT,
};
use conslaw_core::gie::gauss::{dim_k, expand_vector_matrix, impose_cartan_identity, substituted_partials};
use conslaw_core::gie::ledger::predicted_characters;
use conslaw_core::gie::{
    build_integral_flag, check_flag, construct_preimage, corrupt, dimension_ledger, flag_pipeline, gauss_map, gie_ideal,
    jacobian_rank_certificate, minimal_kappa, observed_codimension, random_psi, verify_lemma, PsiData,
    SecondFundamental,
};
use conslaw_core::linalg;
use conslaw_core::poly::{Monomial, Poly};
use conslaw_core::rational::{frac, int, to_f64, Rational};
use nalgebra::DMatrix;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS: u64 = 5;

fn grid() -> impl Iterator<Item = (usize, usize)> {
    (2..=5).flat_map(|n| (2..=5).map(move |m| (n, m)))
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    frac(rng.gen_range(-9..=9), rng.gen_range(1..=5))
}

fn lemma_grid() -> Result<String, String> {
    let mut cells = 0;
    for (n, m) in grid() {
        for seed in 0..SEEDS {
            let psi = random_psi(n, m, seed).map_err(|e| e.to_string())?;
            let (_, report) = verify_lemma(&psi, minimal_kappa(n, m)).map_err(|e| e.to_string())?;
            let expected = n * (n - 1) * m * (m - 1) / 4;
            if !(report.cartan_residual_zero() && report.gauss_residual_zero && report.open_set) {
                return Err(format!("residual or open-set failure at n={n} m={m} seed={seed}"));
            }
            if report.certificate.rank != expected || !report.certificate.is_full_rank() {
                return Err(format!("rank {} ≠ {expected} at n={n} m={m} seed={seed}", report.certificate.rank));
            }
            cells += 1;
        }
    }
    Ok(format!("{cells} cells, zero residuals, full Jacobian rank"))
}

fn characters_match_codimension() -> Result<String, String> {
    let mut cells = 0;
    for (n, m) in grid() {
        for seed in 0..SEEDS {
            let kappa = minimal_kappa(n, m);
            let (ideal, flag) = gie_instance(n, m, seed);
            let report = cartan_characters_by_expansion(&ideal, &flag).map_err(|e| e.to_string())?;
            let pairs = n * (n - 1) / 2;
            let codim = m * pairs + n * (n - 1) * m * (m - 1) / 4 + kappa;
            if report.sum != codim {
                return Err(format!("ΣC = {} ≠ {codim} at n={n} m={m} seed={seed}", report.sum));
            }
            let closed: Vec<usize> =
                (0..m).map(|l| if l + 2 <= m { n * (n - 1) * (l + 1) / 2 } else { n * (n - 1) * m / 2 + kappa }).collect();
            if report.characters != closed || predicted_characters(n, m, kappa) != closed {
                return Err(format!("characters {:?} ≠ {closed:?} at n={n} m={m} seed={seed}", report.characters));
            }
            cells += 1;
        }
    }
    Ok(format!("{cells} cells, expansion characters equal closed forms and codimension"))
}

fn worked_example() -> Result<String, String> {
    let psi = PsiData::new(3, 2, vec![vec![frac(2, 1), int(1)], vec![frac(-1, 2), int(0)], vec![int(3), int(0)]])
        .map_err(|e| e.to_string())?;
    let h = construct_preimage(&psi, 2).map_err(|e| e.to_string())?;
    let (columns, rows) = substituted_partials(&h, &psi).map_err(|e| e.to_string())?;
    if columns != [(0, 0), (1, 0), (2, 0), (1, 1), (2, 1)] {
        return Err(format!("unexpected columns {columns:?}"));
    }
    let v = |i: usize, l: usize| h.vector(i, l).to_vec();
    let neg = |x: Vec<Rational>| x.into_iter().map(|t| -t).collect::<Vec<_>>();
    let zero = vec![int(0); 2];
    let psi_h: Vec<Rational> =
        (0..2).map(|k| (0..3).map(|i| psi.get(i, 0) * &h.vector(i, 0)[k]).fold(Rational::zero(), |s, t| s + t)).collect();
    let expected = vec![
        vec![v(1, 1), neg(psi_h.clone()), zero.clone(), v(0, 0), zero.clone()],
        vec![v(2, 1), zero.clone(), neg(psi_h), zero.clone(), v(0, 0)],
        vec![zero, v(2, 1), neg(v(1, 1)), neg(v(2, 0)), v(1, 0)],
    ];
    if rows != expected {
        return Err("3×5 matrix differs from the displayed entries".into());
    }
    let restricted = |x: &SecondFundamental| -> Result<usize, String> {
        let (_, rows) = substituted_partials(x, &psi).map_err(|e| e.to_string())?;
        let block: Vec<Vec<Vec<Rational>>> = rows.iter().map(|r| r[3..].to_vec()).collect();
        Ok(linalg::rank(&expand_vector_matrix(&block)))
    };
    if restricted(&h)? != 3 {
        return Err("restricted block is rank-deficient at independent H₁₁, H₂₁".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..50 {
        let vectors = (0..3).map(|_| (0..2).map(|_| (0..2).map(|_| random_rational(&mut rng)).collect()).collect()).collect();
        let mut x = SecondFundamental::new(vectors).map_err(|e| e.to_string())?;
        impose_cartan_identity(&mut x, &psi).map_err(|e| e.to_string())?;
        let pair = vec![x.vector(0, 0).to_vec(), x.vector(1, 0).to_vec()];
        if linalg::rank(&pair) == 2 && restricted(&x)? != 3 {
            return Err(format!("trial {trial}: independent H₁₁, H₂₁ but restricted rank < 3"));
        }
    }
    let bad = corrupt(&h);
    let certificate = jacobian_rank_certificate(&bad, &psi).map_err(|e| e.to_string())?;
    if restricted(&bad)? >= 3 || certificate.deficit != Some((3, 2)) {
        return Err(format!("H₁₁ = H₂₁ not detected (deficit {:?})", certificate.deficit));
    }
    Ok("3×5 matrix reproduced, rank 3, deficit detected at block (3,2)".into())
}

fn ledger() -> Result<String, String> {
    if dim_k(3, 4) != 18 {
        return Err(format!("dim K = {} for n=3, m=4", dim_k(3, 4)));
    }
    for (n, m) in grid() {
        for kappa in [minimal_kappa(n, m), minimal_kappa(n, m) + 2] {
            let l = dimension_ledger(n, m, kappa).map_err(|e| e.to_string())?;
            let k = n * (n - 1) * m * (m - 1) / 4;
            let sigma = m + n * (n - 1) / 2 + n * kappa;
            let hset = (n * m - 1) * kappa - k;
            if (l.dim_k, l.dim_sigma, l.dim_hset, l.dim_z) != (k, sigma, hset, sigma + hset) {
                return Err(format!("ledger mismatch at n={n} m={m} κ={kappa}"));
            }
        }
    }
    Ok("dim K(3,4) = 18 and every ledger entry matches".into())
}

fn flag_suite() -> Result<String, String> {
    let mut checked = 0;
    for (n, m) in grid() {
        let kappa = minimal_kappa(n, m);
        let psi = random_psi(n, m, 1).map_err(|e| e.to_string())?;
        let h = construct_preimage(&psi, kappa).map_err(|e| e.to_string())?;
        let ideal = gie_ideal(&psi, &gauss_map(&h), kappa).map_err(|e| e.to_string())?;
        let flag = build_integral_flag(&h);
        let check = check_flag(&ideal, &flag, n, m, kappa).map_err(|e| e.to_string())?;
        if !check.passes() {
            return Err(format!("flag check failed at n={n} m={m}: {check:?}"));
        }
        let observed = observed_codimension(&ideal, &flag, m).map_err(|e| e.to_string())?;
        let ledger = dimension_ledger(n, m, kappa).map_err(|e| e.to_string())?;
        if observed != ledger.codim_v {
            return Err(format!("Grassmann count {observed} ≠ codim {} at n={n} m={m}", ledger.codim_v));
        }
        let (_, report) = flag_pipeline(&psi, kappa, None).map_err(|e| e.to_string())?;
        if !report.passes() || report.cartan.as_ref().map(|c| c.verdict) != Some(Verdict::Ordinary) {
            return Err(format!("pipeline not ordinary at n={n} m={m}"));
        }
        checked += 1;
    }
    Ok(format!("{checked} flags integral with unit volume; Grassmann count equals codimension"))
}

fn oracle_equivalence() -> Result<String, String> {
    for seed in 0..10 {
        let (ideal, flag) = gie_instance(2, 2, seed);
        let expansion = cartan_characters_by_expansion(&ideal, &flag).map_err(|e| e.to_string())?.characters;
        let definition: Vec<usize> = (0..2).map(|q| polar_codim_by_definition(&ideal, &flag.basis()[..q])).collect();
        if expansion != definition {
            return Err(format!("seed {seed}: expansion {expansion:?} vs definition {definition:?}"));
        }
    }
    Ok("n=m=2, 10 flags: expansion characters equal raw polar codimensions".into())
}

fn scaling() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for trial in 0..100 {
        let (n, m, kappa) = (rng.gen_range(2..=4), rng.gen_range(2..=4), rng.gen_range(1..=4));
        let vectors = (0..n)
            .map(|_| (0..m).map(|_| (0..kappa).map(|_| random_rational(&mut rng)).collect()).collect())
            .collect();
        let h = SecondFundamental::new(vectors).map_err(|e| e.to_string())?;
        let rho = random_rational(&mut rng);
        let lhs = gauss_map(&h.scale(&rho));
        let rhs: Vec<Rational> = gauss_map(&h).values().iter().map(|x| x * &rho * &rho).collect();
        if lhs.values() != rhs.as_slice() {
            return Err(format!("trial {trial}: G(ρH) ≠ ρ²G(H)"));
        }
    }
    Ok("100 random (ρ, H): G(ρH) = ρ²G(H) exactly".into())
}

fn random_quadratic(rng: &mut ChaCha8Rng, vars: usize) -> Poly {
    Poly::from_terms((0..3).map(|_| {
        let exponents: Vec<u32> = (0..vars).map(|_| rng.gen_range(0..=1)).collect();
        (Monomial::from_exponents(&exponents), random_rational(rng))
    }))
}

fn emt_audit() -> Result<String, String> {
    let flat = MetricChart::flat(2);
    let constant = |x: Rational| Poly::constant(x);
    let t = EnergyMomentum::new(2, vec![vec![constant(int(3)), constant(frac(1, 2))], vec![constant(int(-1)), constant(int(2))]])
        .map_err(|e| e.to_string())?;
    let unit_square = ChartBox::new(vec![(int(-1), int(1)); 2]).map_err(|e| e.to_string())?;
    let points = unit_square.halton(SAMPLE_COUNT).map_err(|e| e.to_string())?;
    let report = verify_equivalence_exact(&flat, &t, &points).map_err(|e| e.to_string())?;
    if report.max_residual_exact.as_deref() != Some("0") {
        return Err(format!("flat residual {:?}", report.max_residual_exact));
    }

    let sphere_box = ChartBox::new(vec![(frac(1, 10), frac(30, 10)), (frac(1, 10), frac(61, 10))]).map_err(|e| e.to_string())?;
    let sphere_points: Vec<Vec<f64>> =
        sphere_box.halton(SAMPLE_COUNT).map_err(|e| e.to_string())?.iter().map(|p| p.iter().map(to_f64).collect()).collect();
    let sphere = verify_equivalence_numeric(&numeric::sphere_inverse_metric(), &sphere_points).map_err(|e| e.to_string())?;
    if sphere.max_residual >= 1e-6 || sphere.samples != 100 {
        return Err(format!("sphere residual {}", sphere.max_residual));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let one_plus_square = Poly::var(0) * Poly::var(0) + constant(int(1));
    let conformal = MetricChart::new(
        2,
        vec![vec![one_plus_square.clone(), Poly::zero()], vec![Poly::zero(), one_plus_square]],
        vec![int(0), int(0)],
    )
    .map_err(|e| e.to_string())?;
    let float_points: Vec<Vec<f64>> = points.iter().map(|p| p.iter().map(to_f64).collect()).collect();
    let mut worst: f64 = 0.0;
    for trial in 0..20 {
        let components = (0..2).map(|_| (0..2).map(|_| random_quadratic(&mut rng, 2)).collect()).collect();
        let t = EnergyMomentum::new(2, components).map_err(|e| e.to_string())?;
        let (metric, chart): (&MetricChart, NumericChart) = if trial % 2 == 0 {
            (&conformal, numeric_chart(&conformal, &t))
        } else {
            (&flat, numeric_chart(&flat, &t))
        };
        let report = verify_equivalence_numeric(&chart, &float_points).map_err(|e| e.to_string())?;
        if report.conserved {
            return Err(format!("trial {trial}: random tensor happened to be conserved"));
        }
        if !report.holds() {
            return Err(format!("trial {trial}: residual {}", report.max_residual));
        }
        let exact = verify_equivalence_exact(metric, &t, &points[..10]).map_err(|e| e.to_string())?;
        if !exact.holds() {
            return Err(format!("trial {trial}: exact residual {:?}", exact.max_residual_exact));
        }
        worst = worst.max(report.max_residual);
    }

    // Sphere metric with a random, non-conserved tensor as well.
    let coefficients: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let chart = NumericChart {
        m: 2,
        metric: numeric::sphere_inverse_metric().metric,
        tensor: Box::new(move |x: &[f64]| {
            DMatrix::from_row_slice(2, 2, &[coefficients[0] * x[0], coefficients[1] * x[1], coefficients[2], coefficients[3] * x[0] * x[1]])
        }),
    };
    let report = verify_equivalence_numeric(&chart, &sphere_points).map_err(|e| e.to_string())?;
    if report.conserved || !report.holds() {
        return Err(format!("sphere with random T: residual {}", report.max_residual));
    }
    if target_dimension(4) != 13 {
        return Err(format!("target dimension {} for m=4", target_dimension(4)));
    }
    Ok(format!("flat exact 0; sphere {:.1e}; 20 random T max residual {worst:.1e}; m=4 target 13", sphere.max_residual))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Result<String, String>); 8] = [
        ("lemma grid", lemma_grid),
        ("Cartan characters", characters_match_codimension),
        ("worked 3×2 example", worked_example),
        ("dimension ledger", ledger),
        ("flag suite", flag_suite),
        ("oracle equivalence", oracle_equivalence),
        ("scaling identity", scaling),
        ("EMT audit", emt_audit),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let elapsed = started.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail}) [{elapsed:.2}s]", k + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {}: FAIL  {name} ({detail}) [{elapsed:.2}s]", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
