//! Base-q context, q-shifted factorials of every order, the theta function
//! and the lattice-distance measure behind genericity certificates.

mod identities;
mod pochhammer;

pub use identities::{
    rahman_bracket, verify_ftt, verify_theta_quasiperiodicity, verify_weierstrass_bracket,
    CONDITIONING_FLOOR,
};
pub use pochhammer::{
    qpoch, qpoch_inf, qpoch_inf_prod, qpoch_inf_scaled, qpoch_prod, theta, theta_prod,
    theta_scaled,
};

use num_complex::Complex;

use crate::error::{QsvError, Result};
use crate::numeric::{abs, powi, sqrt, to_c64, Real, C};

/// Largest |m| examined when measuring distance to the lattice q^ℤ.
pub const LATTICE_WINDOW: i64 = 60;
pub const DEFAULT_GENERICITY_THRESHOLD: f64 = 1e-3;
pub const DEFAULT_MAX_TERMS: usize = 4000;

/// The fixed base `q`, its chosen square root, and the numerical policy.
///
/// Immutable once built; every evaluation takes it by reference.
#[derive(Clone, Debug)]
pub struct QContext<R: Real> {
    q: C<R>,
    sqrt_q: C<R>,
    /// Relative truncation threshold for series, products and quadrature.
    pub series_tol: R,
    /// Hard cap on terms, factors, nodes-per-direction.
    pub max_terms: usize,
    /// Relative residual a verification must reach to pass.
    pub verify_tol: f64,
    /// Minimum multiplicative distance to q^ℤ for a generic draw.
    pub genericity_threshold: f64,
    snap_tol: R,
}

impl<R: Real> QContext<R> {
    /// Context with the principal square root of `q`.
    pub fn new(q: C<R>) -> Result<Self> {
        Self::with_sqrt(q, sqrt(q))
    }

    pub fn with_sqrt(q: C<R>, sqrt_q: C<R>) -> Result<Self> {
        let m = abs(q).to_f64();
        if !(m > 0.0 && m < 1.0) {
            return Err(QsvError::InvalidContext(format!("|q| = {m} is not in (0,1)")));
        }
        let eps = R::epsilon();
        if abs(sqrt_q * sqrt_q - q) > eps * R::from_f64(64.0) * abs(q) {
            return Err(QsvError::InvalidContext("sqrt_q^2 != q".into()));
        }
        let double = R::PRECISION_BITS <= 53;
        Ok(Self {
            q,
            sqrt_q,
            series_tol: R::from_f64(if double { 1e-15 } else { 1e-30 }),
            max_terms: DEFAULT_MAX_TERMS,
            verify_tol: if double { 1e-8 } else { 1e-20 },
            genericity_threshold: DEFAULT_GENERICITY_THRESHOLD,
            snap_tol: eps * R::from_f64(1e4),
        })
    }

    /// Context from a double-precision `q`, converted exactly.
    pub fn from_c64(q: Complex<f64>) -> Result<Self> {
        Self::new(Complex::new(R::from_f64(q.re), R::from_f64(q.im)))
    }

    pub fn with_series_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(QsvError::InvalidContext("series_tol must be positive".into()));
        }
        self.series_tol = R::from_f64(tol);
        Ok(self)
    }

    pub fn with_max_terms(mut self, n: usize) -> Result<Self> {
        if n < 64 {
            return Err(QsvError::InvalidContext("max_terms must be at least 64".into()));
        }
        self.max_terms = n;
        Ok(self)
    }

    pub fn with_verify_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(QsvError::InvalidContext("tolerance must be positive".into()));
        }
        self.verify_tol = tol;
        Ok(self)
    }

    #[inline]
    pub fn q(&self) -> C<R> {
        self.q
    }

    #[inline]
    pub fn sqrt_q(&self) -> C<R> {
        self.sqrt_q
    }

    pub fn precision_bits(&self) -> u32 {
        R::PRECISION_BITS
    }

    /// `q^k`.
    #[inline]
    pub fn qpow(&self, k: i64) -> C<R> {
        powi(self.q, k)
    }

    /// `q^{k/2}` using the fixed square root.
    #[inline]
    pub fn half_qpow(&self, k: i64) -> C<R> {
        powi(self.sqrt_q, k)
    }

    pub fn abs_q(&self) -> f64 {
        abs(self.q).to_f64()
    }

    /// Tolerance for "these two quadrature/series values agree".
    pub fn agreement_tol(&self) -> R {
        self.series_tol.max(R::epsilon() * R::from_f64(8.0))
    }

    /// Tolerance for checking product constraints such as b₁⋯b₆ = q.
    pub fn constraint_tol(&self) -> R {
        R::epsilon() * R::from_f64(1e4)
    }

    /// Multiplicative distance from `v` to the lattice `{q^m : |m| ≤ 60}`:
    /// `min_m min(|1 − v q^{-m}|, |1 − q^m/v|)`.
    pub fn lattice_distance(&self, v: C<R>) -> f64 {
        let v = to_c64(v);
        let q = to_c64(self.q);
        if v.norm() == 0.0 {
            return 0.0;
        }
        let m0 = v.norm().ln() / q.norm().ln();
        let lo = (m0.floor() as i64).clamp(-LATTICE_WINDOW, LATTICE_WINDOW);
        let hi = (m0.ceil() as i64).clamp(-LATTICE_WINDOW, LATTICE_WINDOW);
        let mut best = f64::INFINITY;
        for m in [lo, hi] {
            let qm = q.powi(m as i32);
            let d1 = (Complex::new(1.0, 0.0) - v / qm).norm();
            let d2 = (Complex::new(1.0, 0.0) - qm / v).norm();
            best = best.min(d1).min(d2);
        }
        best
    }

    /// `Some(m)` when `v` equals `q^m` to working precision. Used to make
    /// lattice cancellations exact instead of leaving roundoff residue.
    pub fn lattice_exponent(&self, v: C<R>) -> Option<i64> {
        let vf = to_c64(v);
        let qf = to_c64(self.q);
        if vf.norm() == 0.0 {
            return None;
        }
        let m = (vf.norm().ln() / qf.norm().ln()).round() as i64;
        if m.abs() > 4 * LATTICE_WINDOW {
            return None;
        }
        let ratio = v * powi(self.q, -m);
        let d = abs(ratio - Complex::new(R::one(), R::zero()));
        (d < self.snap_tol).then_some(m)
    }
}

/// Smallest multiplicative distance to q^ℤ over the ratios and products a
/// draw must keep away from the lattice.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GenericityCertificate {
    pub min_lattice_distance: f64,
}

impl GenericityCertificate {
    pub fn from_values<R: Real>(ctx: &QContext<R>, values: impl IntoIterator<Item = C<R>>) -> Self {
        let min = values
            .into_iter()
            .map(|v| ctx.lattice_distance(v))
            .fold(f64::INFINITY, f64::min);
        Self {
            min_lattice_distance: min,
        }
    }

    pub fn is_generic(&self, threshold: f64) -> bool {
        self.min_lattice_distance > threshold
    }
}
