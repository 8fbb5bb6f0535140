use std::time::Instant;

use conslaw_core::Error;
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: &str = "1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Violation,
    InvalidInput,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Violation => 1,
            Verdict::InvalidInput => 2,
        }
    }
}

/// Whether a result block was computed in exact or floating-point arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Arithmetic {
    Exact,
    Numeric,
}

#[derive(Clone, Debug, Serialize)]
pub struct Results {
    pub arithmetic: Arithmetic,
    #[serde(flatten)]
    pub data: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub inputs: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub results: Option<Results>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub wall_time_seconds: f64,
}

/// What a command produces before the envelope is filled in.
pub struct Outcome {
    pub results: Results,
    pub verdict: Verdict,
    pub warnings: Vec<String>,
}

impl Outcome {
    pub fn new(arithmetic: Arithmetic, data: Value, pass: bool) -> Self {
        let verdict = if pass { Verdict::Pass } else { Verdict::Violation };
        Outcome { results: Results { arithmetic, data }, verdict, warnings: Vec::new() }
    }
}

/// Failure of a command, classified for the exit code.
#[derive(Debug)]
pub enum Failure {
    Invalid(String),
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Violation(_) => Failure::Violation(e.to_string()),
            Error::Input(_) | Error::Unsupported(_) => Failure::Invalid(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Invalid(format!("malformed JSON: {e}"))
    }
}

pub fn assemble(command: &str, inputs: Value, started: Instant, outcome: Result<Outcome, Failure>) -> Report {
    let (results, verdict, error, warnings) = match outcome {
        Ok(o) => (Some(o.results), o.verdict, None, o.warnings),
        Err(Failure::Invalid(msg)) => (None, Verdict::InvalidInput, Some(msg), Vec::new()),
        Err(Failure::Violation(msg)) => (None, Verdict::Violation, Some(msg), Vec::new()),
    };
    Report {
        schema: SCHEMA,
        command: command.to_string(),
        inputs,
        results,
        verdict,
        error,
        warnings,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    }
}
