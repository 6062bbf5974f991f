//! Numerical engine for bilateral basic hypergeometric summations, the
//! Rahman and Al-Salam–Ismail functionals, their biorthogonal rational
//! functions, and the sum-integral identities in which they decouple.
//!
//! Every identity is checked by evaluating both sides independently and
//! reporting a normalized residual ([`report::VerificationReport`]).

pub mod alsalam;
pub mod error;
pub mod harness;
pub mod hyperg;
pub mod indexkit;
pub mod numeric;
pub mod params;
pub mod qcore;
pub mod quad;
pub mod rahman;
pub mod report;

pub use error::{QsvError, Result};
pub use params::{AsiParams, RahmanParams, SaalschutzParams, TriplePairParams};
pub use qcore::QContext;
pub use report::{Status, VerificationReport};
