//! Unilateral, bilateral and very-well-poised basic hypergeometric series,
//! and the summation formulas checked against them.

mod identities;
mod series;

pub use identities::{
    jackson_psi, saalschutz_row, verify_bilateral_jackson, verify_bilateral_saalschutz,
    verify_jackson_transformation, verify_nonterminating_jackson, verify_nonterminating_saalschutz,
};
pub use series::{
    eval_phi, eval_psi, eval_series, eval_w, phi_tracked, psi_tracked, w_tracked, SeriesKind,
    SeriesSpec,
};
