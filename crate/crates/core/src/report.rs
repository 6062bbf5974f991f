//! Verification reports and the residual normalization shared by every
//! identity check.

use std::fmt;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::numeric::{abs, to_c64, Real, Tracked, C};

/// Multiplier on `Σ|terms|·ε` in the cancellation guard.
const CANCELLATION_SAFETY: f64 = 64.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    RejectedDraw,
    Nonconvergent,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::RejectedDraw => "rejected_draw",
            Status::Nonconvergent => "nonconvergent",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamEcho {
    pub name: String,
    pub re: f64,
    pub im: f64,
}

/// One identity check at one parameter draw. Field order is the
/// serialization order and is part of the report format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub identity: String,
    pub seed: Option<u64>,
    pub params: Vec<ParamEcho>,
    pub lhs_re: f64,
    pub lhs_im: f64,
    pub rhs_re: f64,
    pub rhs_im: f64,
    pub abs_residual: f64,
    pub rel_residual: f64,
    pub cancellation_flag: bool,
    pub status: Status,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn lhs(&self) -> Complex<f64> {
        Complex::new(self.lhs_re, self.lhs_im)
    }

    pub fn rhs(&self) -> Complex<f64> {
        Complex::new(self.rhs_re, self.rhs_im)
    }

    /// A report for a draw that could not be evaluated.
    pub fn without_values(identity: &str, status: Status, note: String) -> Self {
        Self {
            identity: identity.to_string(),
            seed: None,
            params: Vec::new(),
            lhs_re: f64::NAN,
            lhs_im: f64::NAN,
            rhs_re: f64::NAN,
            rhs_im: f64::NAN,
            abs_residual: f64::NAN,
            rel_residual: f64::NAN,
            cancellation_flag: false,
            status,
            tolerance: f64::NAN,
            note: Some(note),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Appends `prefix1, prefix2, …` to the parameter echo.
    pub fn with_params<R: Real>(mut self, prefix: &str, zs: &[C<R>]) -> Self {
        for (i, z) in zs.iter().enumerate() {
            let z = to_c64(*z);
            self.params.push(ParamEcho {
                name: format!("{prefix}{}", i + 1),
                re: z.re,
                im: z.im,
            });
        }
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// Collects both sides of an identity and produces a report.
///
/// `rel_residual = |L−R| / max(|L|, |R|, scale, 64·Σ|terms|·ε/tol)`. The
/// last entry is the cancellation guard: when it dominates, the sides were
/// formed by cancellation too severe to resolve `tol`, the comparison is
/// judged at roundoff level instead, and `cancellation_flag` is set.
pub struct Comparison<R: Real> {
    identity: String,
    params: Vec<ParamEcho>,
    lhs: Tracked<R>,
    rhs: Tracked<R>,
    scale: R,
}

impl<R: Real> Comparison<R> {
    pub fn new(identity: &str, lhs: Tracked<R>, rhs: Tracked<R>) -> Self {
        Self {
            identity: identity.to_string(),
            params: Vec::new(),
            lhs,
            rhs,
            scale: R::zero(),
        }
    }

    pub fn param(mut self, name: &str, z: C<R>) -> Self {
        let z = to_c64(z);
        self.params.push(ParamEcho {
            name: name.to_string(),
            re: z.re,
            im: z.im,
        });
        self
    }

    pub fn params(mut self, prefix: &str, zs: &[C<R>]) -> Self {
        for (i, z) in zs.iter().enumerate() {
            self = self.param(&format!("{prefix}{}", i + 1), *z);
        }
        self
    }

    pub fn int_param(self, name: &str, k: i64) -> Self {
        self.param(name, Complex::new(R::from_i64(k), R::zero()))
    }

    /// Reference magnitude for identities whose exact value is zero.
    pub fn scale(mut self, s: R) -> Self {
        self.scale = s;
        self
    }

    pub fn finish(self, tol: f64) -> VerificationReport {
        let diff = abs(self.lhs.value - self.rhs.value);
        let l = abs(self.lhs.value);
        let r = abs(self.rhs.value);
        let natural = l.max(r).max(self.scale);
        let guard = (self.lhs.magnitude + self.rhs.magnitude)
            * R::epsilon()
            * R::from_f64(CANCELLATION_SAFETY / tol);
        let denom = natural.max(guard);
        let rel = if denom == R::zero() {
            if diff == R::zero() {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (diff / denom).to_f64()
        };
        let lhs = to_c64(self.lhs.value);
        let rhs = to_c64(self.rhs.value);
        let status = if rel <= tol { Status::Pass } else { Status::Fail };
        VerificationReport {
            identity: self.identity,
            seed: None,
            params: self.params,
            lhs_re: lhs.re,
            lhs_im: lhs.im,
            rhs_re: rhs.re,
            rhs_im: rhs.im,
            abs_residual: diff.to_f64(),
            rel_residual: rel,
            cancellation_flag: guard > natural,
            status,
            tolerance: tol,
            note: None,
        }
    }
}
