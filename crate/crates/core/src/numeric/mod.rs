//! Scalar plumbing shared by every module: the [`Real`] abstraction over
//! working precision, complex helpers, and compensated/scaled accumulators.

mod accum;
mod dd;

pub use accum::{CompensatedSum, ScaledProduct, Tracked};
pub use dd::DoubleDouble;

use std::fmt::Debug;
use std::ops::{AddAssign, MulAssign, Neg, SubAssign};

use num_complex::Complex;
use num_traits::Num;

/// Complex number over the working real type.
pub type C<R> = Complex<R>;

/// A real scalar the engine can run at.
///
/// Implemented for `f64` (double mode) and [`DoubleDouble`] (extended mode).
pub trait Real:
    Num
    + Copy
    + Debug
    + PartialOrd
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Send
    + Sync
    + 'static
{
    /// Significand bits of the representation.
    const PRECISION_BITS: u32;

    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn epsilon() -> Self;
    /// Exact multiplication by `2^k`.
    fn mul_pow2(self, k: i32) -> Self;
    /// `(cos, sin)` of `2πj/n`; `n` is a power of two ≥ 8.
    fn cos_sin_turn(j: u64, n: u64) -> (Self, Self);

    fn from_i64(k: i64) -> Self {
        Self::from_f64(k as f64)
    }

    fn max(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }

    fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }
}

impl Real for f64 {
    const PRECISION_BITS: u32 = 53;

    #[inline]
    fn from_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn abs(self) -> Self {
        f64::abs(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    #[inline]
    fn epsilon() -> Self {
        f64::EPSILON
    }
    #[inline]
    fn mul_pow2(self, k: i32) -> Self {
        self * 2f64.powi(k)
    }
    fn cos_sin_turn(j: u64, n: u64) -> (Self, Self) {
        let t = std::f64::consts::TAU * ((j % n) as f64) / (n as f64);
        (t.cos(), t.sin())
    }
}

impl Real for DoubleDouble {
    const PRECISION_BITS: u32 = 106;

    #[inline]
    fn from_f64(x: f64) -> Self {
        DoubleDouble::from_f64(x)
    }
    #[inline]
    fn to_f64(self) -> f64 {
        DoubleDouble::to_f64(self)
    }
    #[inline]
    fn abs(self) -> Self {
        DoubleDouble::abs(self)
    }
    #[inline]
    fn sqrt(self) -> Self {
        DoubleDouble::sqrt(self)
    }
    #[inline]
    fn epsilon() -> Self {
        DoubleDouble::EPSILON
    }
    #[inline]
    fn mul_pow2(self, k: i32) -> Self {
        DoubleDouble::mul_pow2(self, k)
    }
    fn cos_sin_turn(j: u64, n: u64) -> (Self, Self) {
        DoubleDouble::cos_sin_turn(j, n)
    }
}

/// `re + i·im` from doubles.
#[inline]
pub fn cx<R: Real>(re: f64, im: f64) -> C<R> {
    Complex::new(R::from_f64(re), R::from_f64(im))
}

#[inline]
pub fn real<R: Real>(x: f64) -> C<R> {
    Complex::new(R::from_f64(x), R::zero())
}

#[inline]
pub fn one<R: Real>() -> C<R> {
    Complex::new(R::one(), R::zero())
}

#[inline]
pub fn zero<R: Real>() -> C<R> {
    Complex::new(R::zero(), R::zero())
}

/// Modulus, scaled to avoid overflow in the squares.
pub fn abs<R: Real>(z: C<R>) -> R {
    let a = z.re.abs();
    let b = z.im.abs();
    let (big, small) = if a >= b { (a, b) } else { (b, a) };
    if big == R::zero() {
        return R::zero();
    }
    let r = small / big;
    big * (R::one() + r * r).sqrt()
}

#[inline]
pub fn abs_f64<R: Real>(z: C<R>) -> f64 {
    abs(z).to_f64()
}

/// Lossy conversion for reporting.
#[inline]
pub fn to_c64<R: Real>(z: C<R>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

#[inline]
pub fn from_c64<R: Real>(z: Complex<f64>) -> C<R> {
    Complex::new(R::from_f64(z.re), R::from_f64(z.im))
}

/// Principal square root. The larger component comes from `|z| ± Re z`
/// without cancellation; the other from `Im z / 2w`.
pub fn sqrt<R: Real>(z: C<R>) -> C<R> {
    let m = abs(z);
    if m == R::zero() {
        return zero();
    }
    let half = R::from_f64(0.5);
    if z.re >= R::zero() {
        let re = ((m + z.re) * half).sqrt();
        Complex::new(re, z.im / (re + re))
    } else {
        let im = ((m - z.re) * half).sqrt();
        let re = z.im.abs() / (im + im);
        if z.im < R::zero() {
            Complex::new(re, -im)
        } else {
            Complex::new(re, im)
        }
    }
}

/// Reciprocal with the division done on the scaled conjugate.
pub fn inv<R: Real>(z: C<R>) -> C<R> {
    let s = z.re.abs().max(z.im.abs());
    let zr = Complex::new(z.re / s, z.im / s);
    let d = zr.re * zr.re + zr.im * zr.im;
    Complex::new(zr.re / d / s, -zr.im / d / s)
}

/// Integer power by binary exponentiation.
pub fn powi<R: Real>(z: C<R>, k: i64) -> C<R> {
    let mut base = if k < 0 { inv(z) } else { z };
    let mut e = k.unsigned_abs();
    let mut acc = one();
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base;
        }
        base = base * base;
        e >>= 1;
    }
    acc
}

/// `n(n-1)/2`, the exponent in `q^{C(n,2)}`; valid for negative `n`.
#[inline]
pub fn binom2(n: i64) -> i64 {
    n * (n - 1) / 2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn principal_sqrt_squares_back() {
        // the last two sit just off the branch cut
        for &(re, im) in &[(0.3, 0.0), (-0.3, 0.1), (-0.3, -0.1), (0.1, -0.4), (-0.4, 1e-9), (-0.25, -3e-17)] {
            let z: C<f64> = cx(re, im);
            let r = sqrt(z);
            assert!(abs(r * r - z) < 4.0 * f64::EPSILON * abs(z), "{z}");
            assert!(r.re >= 0.0);
            let zd: C<DoubleDouble> = cx(re, im);
            let rd = sqrt(zd);
            assert!(abs(rd * rd - zd).to_f64() < 1e-31 * abs(zd).to_f64());
        }
    }

    #[test]
    fn powi_negative_matches_inverse() {
        let z: C<f64> = cx(0.7, -0.2);
        let a = powi(z, -5);
        let b = inv(powi(z, 5));
        assert!(abs(a - b) < 1e-13);
        assert_eq!(powi(z, 0), one());
    }

    #[test]
    fn binom2_negative_orders() {
        assert_eq!(binom2(0), 0);
        assert_eq!(binom2(1), 0);
        assert_eq!(binom2(3), 3);
        assert_eq!(binom2(-1), 1);
        assert_eq!(binom2(-3), 6);
    }
}
