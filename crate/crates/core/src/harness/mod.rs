//! Batch verification: seeded draws, suite execution and JSON-lines reports.
//!
//! Draw `i` of a run seeded with `s` uses a ChaCha8 stream seeded with
//! `splitmix64(s + i)`, so any single draw can be replayed on its own.

mod config;
mod sampling;
mod suites;

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

pub use config::{Precision, QSpec, SuiteConfig};
pub use sampling::{
    draw_rng, draw_seed, sample_balanced_sextuple, sample_balanced_triplepair, sample_point, sample_q,
    sample_sextuple_with, sample_triplepair_with, splitmix64, Band, MAX_ATTEMPTS,
};
pub use suites::{lookup, SuiteInfo, SUITES};

use crate::error::{QsvError, Result};
use crate::numeric::{DoubleDouble, Real};
use crate::qcore::QContext;
use crate::report::{Status, VerificationReport};
use suites::{run_draw, DrawSpec};

/// Environment variable overriding the series term limit.
pub const MAX_TERMS_ENV: &str = "QSV_MAX_TERMS";

/// How an evaluation error counts in a report, or `None` when the error is
/// a configuration or I/O problem that aborts the whole run.
pub fn classify(err: &QsvError) -> Option<Status> {
    use QsvError::*;
    match err {
        Config(_) | Io(_) => None,
        MaxTermsExceeded { .. }
        | NonConvergent(_)
        | NonConvergentBilateral(_)
        | QuadratureNonconvergent { .. }
        | BilateralSumNonconvergent(_) => Some(Status::Nonconvergent),
        InvalidContext(_) | ConstraintViolated(_) | InvalidIndex(_) => Some(Status::Fail),
        _ => Some(Status::RejectedDraw),
    }
}

pub(crate) fn error_report(identity: &str, err: QsvError) -> Result<VerificationReport> {
    match classify(&err) {
        Some(status) => Ok(VerificationReport::without_values(identity, status, err.to_string())),
        None => Err(err),
    }
}

/// Counts over one run. Serialized as the last line of the report stream.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteSummary {
    pub record: &'static str,
    pub suite: String,
    pub precision: Precision,
    pub seed: u64,
    pub draws: usize,
    pub reports: usize,
    pub pass: usize,
    pub fail: usize,
    pub rejected: usize,
    pub nonconvergent: usize,
    /// Largest relative residual among evaluated reports.
    pub max_rel_residual: f64,
    pub exit_code: i32,
}

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub reports: Vec<VerificationReport>,
    pub summary: SuiteSummary,
}

impl SuiteOutcome {
    /// 0 when every evaluated report passes, 1 on any failure, 3 when every
    /// draw was rejected.
    pub fn exit_code(&self) -> i32 {
        self.summary.exit_code
    }

    /// One JSON object per report, then the summary.
    pub fn write_jsonl<W: Write>(&self, mut w: W) -> Result<()> {
        for r in &self.reports {
            serde_json::to_writer(&mut w, r).map_err(std::io::Error::from)?;
            w.write_all(b"\n")?;
        }
        serde_json::to_writer(&mut w, &self.summary).map_err(std::io::Error::from)?;
        w.write_all(b"\n")?;
        Ok(())
    }
}

fn max_terms_override() -> Result<Option<usize>> {
    match std::env::var(MAX_TERMS_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| QsvError::Config(format!("{MAX_TERMS_ENV}={v} is not a positive integer"))),
        Err(_) => Ok(None),
    }
}

fn context<R: Real>(q: num_complex::Complex<f64>, config: &SuiteConfig, max_terms: Option<usize>) -> Result<QContext<R>> {
    let mut ctx = QContext::<R>::from_c64(q)?;
    if let Some(t) = config.tol {
        ctx = ctx.with_verify_tol(t)?;
    }
    if let Some(t) = config.series_tol {
        ctx = ctx.with_series_tol(t)?;
    }
    if let Some(n) = max_terms {
        ctx = ctx.with_max_terms(n).map_err(|e| QsvError::Config(e.to_string()))?;
    }
    Ok(ctx)
}

fn draw<R: Real>(config: &SuiteConfig, spec: &DrawSpec, qspec: &QSpec, max_terms: Option<usize>, seed: u64) -> Result<Vec<VerificationReport>> {
    let mut rng = draw_rng(seed);
    let q = sample_q(&mut rng, qspec.modulus, qspec.phase);
    let ctx = context::<R>(q, config, max_terms)?;
    run_draw(&ctx, &mut rng, spec)
}

/// Runs every draw of the configured suite, in parallel, and writes the
/// report stream to `config.out` when set.
pub fn run_suite(config: &SuiteConfig) -> Result<SuiteOutcome> {
    config.validate()?;
    let info = lookup(&config.suite)?;
    let qspec = config.q.unwrap_or_else(|| info.suite.default_q());
    qspec.validate()?;
    let max_terms = max_terms_override()?;
    let per_draw: Vec<Vec<VerificationReport>> = (0..config.draws as u64)
        .into_par_iter()
        .map(|i| {
            let seed = draw_seed(config.seed, i);
            let spec = DrawSpec {
                suite: info.suite,
                index: i,
                max_index: config.max_index,
            };
            let res = match config.precision {
                Precision::Double => draw::<f64>(config, &spec, &qspec, max_terms, seed),
                Precision::Extended => draw::<DoubleDouble>(config, &spec, &qspec, max_terms, seed),
            };
            let reports = match res {
                Ok(r) => r,
                Err(e) => vec![error_report(info.id, e)?],
            };
            Ok(reports.into_iter().map(|r| r.with_seed(seed)).collect())
        })
        .collect::<Result<_>>()?;
    let reports: Vec<VerificationReport> = per_draw.into_iter().flatten().collect();
    let summary = summarize(config, &reports);
    let outcome = SuiteOutcome { reports, summary };
    if let Some(path) = &config.out {
        let f = std::fs::File::create(path)?;
        let mut w = std::io::BufWriter::new(f);
        outcome.write_jsonl(&mut w)?;
        w.flush()?;
    }
    Ok(outcome)
}

fn summarize(config: &SuiteConfig, reports: &[VerificationReport]) -> SuiteSummary {
    let count = |s: Status| reports.iter().filter(|r| r.status == s).count();
    let (pass, fail, rejected, nonconvergent) = (
        count(Status::Pass),
        count(Status::Fail),
        count(Status::RejectedDraw),
        count(Status::Nonconvergent),
    );
    let max_rel_residual = reports
        .iter()
        .filter(|r| r.rel_residual.is_finite())
        .map(|r| r.rel_residual)
        .fold(0.0, f64::max);
    let exit_code = if pass + fail + nonconvergent == 0 {
        3
    } else if fail + nonconvergent > 0 {
        1
    } else {
        0
    };
    SuiteSummary {
        record: "summary",
        suite: config.suite.clone(),
        precision: config.precision,
        seed: config.seed,
        draws: config.draws,
        reports: reports.len(),
        pass,
        fail,
        rejected,
        nonconvergent,
        max_rel_residual,
        exit_code,
    }
}
