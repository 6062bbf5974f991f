use num_complex::Complex;

use super::{abs, one, zero, Real, C};

/// Neumaier-compensated complex summation that also keeps `Σ|term|`,
/// the scale against which cancellation is judged.
#[derive(Clone, Copy, Debug)]
pub struct CompensatedSum<R: Real> {
    sum: C<R>,
    comp: C<R>,
    abs_sum: R,
}

#[inline]
fn neumaier<R: Real>(sum: &mut R, comp: &mut R, x: R) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
}

impl<R: Real> Default for CompensatedSum<R> {
    fn default() -> Self {
        Self::new()
    }
}

impl<R: Real> CompensatedSum<R> {
    pub fn new() -> Self {
        Self {
            sum: zero(),
            comp: zero(),
            abs_sum: R::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: C<R>) {
        neumaier(&mut self.sum.re, &mut self.comp.re, x.re);
        neumaier(&mut self.sum.im, &mut self.comp.im, x.im);
        self.abs_sum += abs(x);
    }

    /// Adds a value whose own magnitude bookkeeping is already known.
    #[inline]
    pub fn add_tracked(&mut self, x: Tracked<R>) {
        neumaier(&mut self.sum.re, &mut self.comp.re, x.value.re);
        neumaier(&mut self.sum.im, &mut self.comp.im, x.value.im);
        self.abs_sum += x.magnitude;
    }

    #[inline]
    pub fn value(&self) -> C<R> {
        self.sum + self.comp
    }

    #[inline]
    pub fn abs_sum(&self) -> R {
        self.abs_sum
    }

    pub fn tracked(&self) -> Tracked<R> {
        Tracked {
            value: self.value(),
            magnitude: self.abs_sum,
        }
    }
}

/// A value together with the magnitude of the constituents it was built
/// from. `magnitude ≫ |value|` means the value came out of cancellation.
#[derive(Clone, Copy, Debug)]
pub struct Tracked<R: Real> {
    pub value: C<R>,
    pub magnitude: R,
}

impl<R: Real> Tracked<R> {
    /// A value with no cancellation history.
    #[inline]
    pub fn exact(value: C<R>) -> Self {
        Self {
            value,
            magnitude: abs(value),
        }
    }

    #[inline]
    pub fn scale(self, factor: C<R>) -> Self {
        Self {
            value: self.value * factor,
            magnitude: self.magnitude * abs(factor),
        }
    }

    #[inline]
    pub fn mul(self, other: Self) -> Self {
        Self {
            value: self.value * other.value,
            magnitude: self.magnitude * other.magnitude,
        }
    }

    #[inline]
    pub fn add(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            magnitude: self.magnitude + other.magnitude,
        }
    }

    #[inline]
    pub fn sub(self, other: Self) -> Self {
        Self {
            value: self.value - other.value,
            magnitude: self.magnitude + other.magnitude,
        }
    }
}

/// A complex product kept as `mantissa · 2^exp2`, for integrands whose
/// individual factors overflow a double while the product does not.
#[derive(Clone, Copy, Debug)]
pub struct ScaledProduct<R: Real> {
    mant: C<R>,
    exp2: i64,
}

const RENORM_HI: f64 = 1e100;
const RENORM_LO: f64 = 1e-100;

impl<R: Real> Default for ScaledProduct<R> {
    fn default() -> Self {
        Self::one()
    }
}

impl<R: Real> ScaledProduct<R> {
    pub fn one() -> Self {
        Self {
            mant: one(),
            exp2: 0,
        }
    }

    #[inline]
    pub fn mul(&mut self, f: C<R>) {
        self.mant = self.mant * f;
        self.renormalize();
    }

    #[inline]
    pub fn div(&mut self, f: C<R>) {
        self.mant = self.mant * super::inv(f);
        self.renormalize();
    }

    pub fn mul_scaled(&mut self, other: &ScaledProduct<R>) {
        self.mant = self.mant * other.mant;
        self.exp2 += other.exp2;
        self.renormalize();
    }

    pub fn div_scaled(&mut self, other: &ScaledProduct<R>) {
        self.mant = self.mant * super::inv(other.mant);
        self.exp2 -= other.exp2;
        self.renormalize();
    }

    #[inline]
    fn renormalize(&mut self) {
        let m = self.mant.re.abs().max(self.mant.im.abs()).to_f64();
        if m > RENORM_HI || (m < RENORM_LO && m > 0.0) {
            let k = m.log2().floor() as i32;
            self.mant = Complex::new(self.mant.re.mul_pow2(-k), self.mant.im.mul_pow2(-k));
            self.exp2 += k as i64;
        }
    }

    /// `log2 |value|`, finite even when the value itself is not representable.
    pub fn log2_abs(&self) -> f64 {
        abs(self.mant).to_f64().log2() + self.exp2 as f64
    }

    /// The represented value; underflows to zero and overflows to infinity.
    pub fn value(&self) -> C<R> {
        let mut re = self.mant.re;
        let mut im = self.mant.im;
        let mut e = self.exp2;
        while e != 0 {
            let step = e.clamp(-1000, 1000) as i32;
            re = re.mul_pow2(step);
            im = im.mul_pow2(step);
            e -= step as i64;
        }
        Complex::new(re, im)
    }
}
