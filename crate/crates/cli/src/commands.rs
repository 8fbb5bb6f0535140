use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use conslaw_core::emt::{Backend, EmtInput, EmtProblem};
use conslaw_core::gie::psi::{Normalization, PsiJson};
use conslaw_core::gie::{
    corrupt, dimension_ledger, flag_pipeline, lemma_contracts, minimal_kappa, normalize_psi, random_psi,
    verify_lemma, CurvatureElement, PsiData,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::{Arithmetic, Failure, Outcome};

type CommandResult = Result<Outcome, Failure>;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Args, Debug, Serialize)]
pub struct PsiSource {
    /// ψ input file: {"n", "m", "psi": [[p/q]], "R"?: [{i, j, lambda, mu, value}]}
    #[arg(long, conflicts_with = "random_psi")]
    pub psi: Option<PathBuf>,
    /// Draw a normalized ψ from this seed instead of reading a file
    #[arg(long = "random-psi", value_name = "SEED")]
    pub random_psi: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct LemmaArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    /// Fiber extension; defaults to the minimum (n−1)(m−1)
    #[arg(long)]
    pub kappa: Option<usize>,
    #[command(flatten)]
    pub source: PsiSource,
}

/// Resolved ψ, the frame change that normalized it and any prescribed `R`.
struct PsiInput {
    psi: PsiData,
    normalization: Option<Normalization>,
    curvature: Option<CurvatureElement>,
}

fn check_dim(name: &str, given: Option<usize>, actual: usize) -> Result<(), Failure> {
    match given {
        Some(v) if v != actual => Err(Failure::Invalid(format!("--{name} {v} disagrees with the ψ file ({name} = {actual})"))),
        _ => Ok(()),
    }
}

fn resolve_psi(n: Option<usize>, m: Option<usize>, source: &PsiSource) -> Result<PsiInput, Failure> {
    match (&source.psi, source.random_psi) {
        (Some(path), _) => {
            let file: PsiJson = read_json(path)?;
            check_dim("n", n, file.n)?;
            check_dim("m", m, file.m)?;
            let raw = file.psi_data()?;
            let curvature = file.curvature_element()?;
            let normalization = normalize_psi(&raw)?;
            if curvature.is_some() && !normalization.is_identity() {
                return Err(Failure::Invalid("R can only be prescribed together with an already normalized ψ".into()));
            }
            Ok(PsiInput { psi: normalization.psi.clone(), normalization: Some(normalization), curvature })
        }
        (None, Some(seed)) => {
            let (Some(n), Some(m)) = (n, m) else {
                return Err(Failure::Invalid("--random-psi needs --n and --m".into()));
            };
            Ok(PsiInput { psi: random_psi(n, m, seed)?, normalization: None, curvature: None })
        }
        (None, None) => Err(Failure::Invalid("give either --psi FILE or --random-psi SEED".into())),
    }
}

fn normalization_json(norm: &Normalization) -> Value {
    json!({
        "identity": norm.is_identity(),
        "base_swap": norm.base_swap.map(|(a, b)| [a + 1, b + 1]),
        "fiber_rotation": norm.fiber_rotation.iter().map(|r| r.iter().map(ToString::to_string).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "scale": norm.scale.to_string(),
    })
}

fn psi_json(input: &PsiInput) -> Value {
    let mut v = json!({ "psi": to_value(&input.psi.to_json().psi) });
    if let Some(norm) = &input.normalization {
        v["normalization"] = normalization_json(norm);
    }
    v
}

fn kappa_or_minimal(kappa: Option<usize>, psi: &PsiData) -> usize {
    kappa.unwrap_or_else(|| minimal_kappa(psi.n(), psi.m()))
}

pub fn verify_lemma_cmd(args: &LemmaArgs) -> CommandResult {
    let input = resolve_psi(args.n, args.m, &args.source)?;
    let kappa = kappa_or_minimal(args.kappa, &input.psi);
    dimension_ledger(input.psi.n(), input.psi.m(), kappa)?;
    let (h, report) = verify_lemma(&input.psi, kappa)?;
    let mut data = psi_json(&input);
    data["lemma"] = to_value(&report);
    data["preimage"] = to_value(&h.to_strings());
    Ok(Outcome::new(Arithmetic::Exact, data, report.passes()))
}

pub fn flag_cmd(args: &LemmaArgs) -> CommandResult {
    let input = resolve_psi(args.n, args.m, &args.source)?;
    let kappa = kappa_or_minimal(args.kappa, &input.psi);
    dimension_ledger(input.psi.n(), input.psi.m(), kappa)?;
    let (h, report) = flag_pipeline(&input.psi, kappa, input.curvature.as_ref())?;
    let mut data = psi_json(&input);
    data["prescribed_curvature"] = json!(input.curvature.is_some());
    data["flag"] = to_value(&report);
    data["second_fundamental_form"] = to_value(&h.to_strings());
    Ok(Outcome::new(Arithmetic::Exact, data, report.passes()))
}

#[derive(Args, Debug, Serialize)]
pub struct LedgerArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub m: usize,
    /// Defaults to the minimum (n−1)(m−1)
    #[arg(long)]
    pub kappa: Option<usize>,
}

pub fn ledger_cmd(args: &LedgerArgs) -> CommandResult {
    if args.n < 2 || args.m < 2 {
        return Err(Failure::Invalid(format!("need n ≥ 2 and m ≥ 2, got n = {}, m = {}", args.n, args.m)));
    }
    let kappa = args.kappa.unwrap_or_else(|| minimal_kappa(args.n, args.m));
    let ledger = dimension_ledger(args.n, args.m, kappa)?;
    Ok(Outcome::new(Arithmetic::Exact, json!({ "ledger": to_value(&ledger) }), ledger.cartan_equality()))
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BackendArg {
    Exact,
    Numeric,
}

#[derive(Args, Debug, Serialize)]
pub struct EmtArgs {
    /// Chart file with metric, tensor and sample box, or a preset
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to exact for polynomial charts, numeric for presets
    #[arg(long, value_enum)]
    pub backend: Option<BackendArg>,
}

pub fn emt_audit_cmd(args: &EmtArgs) -> CommandResult {
    let input: EmtInput = read_json(&args.input)?;
    let problem = input.resolve()?;
    let backend = match (args.backend, &problem) {
        (Some(BackendArg::Exact), _) => Backend::Exact,
        (Some(BackendArg::Numeric), _) => Backend::Numeric,
        (None, EmtProblem::Polynomial { .. }) => Backend::Exact,
        (None, EmtProblem::Numeric { .. }) => Backend::Numeric,
    };
    let report = problem.run(backend)?;
    let arithmetic = match backend {
        Backend::Exact => Arithmetic::Exact,
        Backend::Numeric => Arithmetic::Numeric,
    };
    let pass = report.holds();
    Ok(Outcome::new(arithmetic, json!({ "equivalence": to_value(&report) }), pass))
}

/// Inclusive range `a..b`, or a single value; `a > b` is empty.
#[derive(Clone, Debug, Serialize)]
pub struct IndexRange {
    pub start: usize,
    pub end: usize,
}

impl IndexRange {
    fn values(&self) -> std::ops::RangeInclusive<usize> {
        self.start..=self.end
    }

    fn is_empty(&self) -> bool {
        self.start > self.end
    }
}

impl std::str::FromStr for IndexRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad range {s:?}; expected a..b or a"));
        match s.split_once("..") {
            Some((a, b)) => Ok(IndexRange { start: parse(a)?, end: parse(b.trim_start_matches('='))? }),
            None => {
                let v = parse(s)?;
                Ok(IndexRange { start: v, end: v })
            }
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct SweepArgs {
    #[arg(long = "n-range", default_value = "2..5")]
    pub n_range: IndexRange,
    #[arg(long = "m-range", default_value = "2..5")]
    pub m_range: IndexRange,
    /// Random ψ per cell
    #[arg(long, default_value_t = 5)]
    pub seeds: u64,
    /// First seed; cell seeds are seed-base, seed-base+1, ...
    #[arg(long = "seed-base", default_value_t = 0)]
    pub seed_base: u64,
    /// Overwrite H₂₁ with H₁₁ before checking, to exercise failure reporting
    #[arg(long)]
    pub corrupt: bool,
}

#[derive(Debug, Serialize)]
struct Cell {
    n: usize,
    m: usize,
    kappa: usize,
    seed: u64,
    pass: bool,
    cartan_residual_zero: bool,
    gauss_residual_zero: bool,
    open_set: bool,
    rank: usize,
    expected_rank: usize,
    /// First singular block `(k, ν)` of the rank certificate.
    deficit: Option<(usize, usize)>,
}

fn sweep_cell(n: usize, m: usize, seed: u64, inject: bool) -> Result<Cell, Failure> {
    let psi = random_psi(n, m, seed)?;
    let kappa = minimal_kappa(n, m);
    let (h, mut report) = verify_lemma(&psi, kappa)?;
    if inject {
        report = lemma_contracts(&psi, &corrupt(&h))?;
    }
    Ok(Cell {
        n,
        m,
        kappa,
        seed,
        pass: report.passes(),
        cartan_residual_zero: report.cartan_residual_zero(),
        gauss_residual_zero: report.gauss_residual_zero,
        open_set: report.open_set,
        rank: report.certificate.rank,
        expected_rank: report.certificate.expected,
        deficit: report.certificate.deficit,
    })
}

pub fn sweep_cmd(args: &SweepArgs) -> CommandResult {
    for (name, r) in [("n", &args.n_range), ("m", &args.m_range)] {
        if !r.is_empty() && r.start < 2 {
            return Err(Failure::Invalid(format!("{name}-range must start at 2 or above")));
        }
    }
    let mut warnings = Vec::new();
    if args.n_range.is_empty() || args.m_range.is_empty() || args.seeds == 0 {
        warnings.push("empty sweep: nothing to check, passing vacuously".to_string());
    }
    let jobs: Vec<(usize, usize, u64)> = args
        .n_range
        .values()
        .flat_map(|n| args.m_range.values().map(move |m| (n, m)))
        .flat_map(|(n, m)| (args.seed_base..args.seed_base + args.seeds).map(move |s| (n, m, s)))
        .collect();
    let cells: Vec<Cell> =
        jobs.par_iter().map(|&(n, m, s)| sweep_cell(n, m, s, args.corrupt)).collect::<Result<_, _>>()?;
    let passes = cells.iter().filter(|c| c.pass).count();
    let matrix: Vec<Value> = args
        .n_range
        .values()
        .flat_map(|n| args.m_range.values().map(move |m| (n, m)))
        .map(|(n, m)| {
            let here = cells.iter().filter(|c| c.n == n && c.m == m);
            json!({ "n": n, "m": m, "passes": here.clone().filter(|c| c.pass).count(), "total": here.count() })
        })
        .collect();
    let data = json!({
        "passes": passes,
        "violations": cells.len() - passes,
        "matrix": matrix,
        "cells": to_value(&cells),
    });
    let mut outcome = Outcome::new(Arithmetic::Exact, data, passes == cells.len());
    outcome.warnings = warnings;
    Ok(outcome)
}
