//! Double-double reals: an unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`,
//! giving roughly 106 bits of significand.
//!
//! Only the operations the engine needs are provided: the four field
//! operations, square root, power-of-two scaling and sin/cos of rational
//! multiples of a full turn (for quadrature nodes).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use num_traits::{Num, One, Zero};

#[derive(Copy, Clone, Debug, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl DoubleDouble {
    pub const ZERO: Self = Self { hi: 0.0, lo: 0.0 };
    pub const ONE: Self = Self { hi: 1.0, lo: 0.0 };
    /// 2π to double-double accuracy.
    pub const TAU: Self = Self {
        hi: std::f64::consts::TAU,
        lo: 2.449_293_598_294_706_4e-16,
    };
    pub const EPSILON: Self = Self {
        hi: 4.930_380_657_631_324e-32,
        lo: 0.0,
    };

    #[inline]
    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    pub fn sqrt(self) -> Self {
        if self.hi <= 0.0 {
            return Self::ZERO;
        }
        let a = self.hi.sqrt();
        let (p, e) = two_prod(a, a);
        let resid = (self - Self { hi: p, lo: e }).to_f64();
        let (s, t) = quick_two_sum(a, resid * 0.5 / a);
        Self { hi: s, lo: t }
    }

    #[inline]
    pub fn mul_pow2(self, k: i32) -> Self {
        let f = pow2(k);
        Self {
            hi: self.hi * f,
            lo: self.lo * f,
        }
    }

    /// `(cos 2πj/n, sin 2πj/n)`; `n` must be divisible by 8.
    pub fn cos_sin_turn(j: u64, n: u64) -> (Self, Self) {
        debug_assert!(n % 8 == 0);
        let j = j % n;
        let eighth = n / 8;
        let octant = j / eighth;
        let rem = j % eighth;
        // angle within the octant, measured so that it stays in [0, π/4]
        let (m, flip) = if octant % 2 == 0 { (rem, false) } else { (eighth - rem, true) };
        let theta = Self::TAU * Self::from_f64(m as f64) / Self::from_f64(n as f64);
        let (c, s) = taylor_cos_sin(theta);
        let (c, s) = if flip { (s, c) } else { (c, s) };
        // map back from the first octant by the dihedral symmetries
        match octant {
            0 | 1 => (c, s),
            2 | 3 => (-s, c),
            4 | 5 => (-c, -s),
            _ => (s, -c),
        }
    }
}

fn pow2(k: i32) -> f64 {
    f64::from_bits(((1023 + k.clamp(-1022, 1023)) as u64) << 52)
}

fn taylor_cos_sin(x: DoubleDouble) -> (DoubleDouble, DoubleDouble) {
    let x2 = x * x;
    let mut term = DoubleDouble::ONE;
    let mut cos = DoubleDouble::ONE;
    let mut sin = x;
    let mut sterm = x;
    let mut k = 1.0;
    while term.hi.abs() > 1e-36 || sterm.hi.abs() > 1e-36 {
        term = -term * x2 / DoubleDouble::from_f64(k * (k + 1.0));
        sterm = -sterm * x2 / DoubleDouble::from_f64((k + 1.0) * (k + 2.0));
        cos += term;
        sin += sterm;
        k += 2.0;
    }
    (cos, sin)
}

impl Neg for DoubleDouble {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Self { hi, lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let (p, e) = two_prod(self.hi, rhs.hi);
        let e = e + (self.hi * rhs.lo + self.lo * rhs.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

impl Div for DoubleDouble {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs * Self::from_f64(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs * Self::from_f64(q2);
        let q3 = r.hi / rhs.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::from_f64(q3)
    }
}

impl Rem for DoubleDouble {
    type Output = Self;
    fn rem(self, rhs: Self) -> Self {
        let q = (self / rhs).to_f64().trunc();
        self - rhs * Self::from_f64(q)
    }
}

impl AddAssign for DoubleDouble {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl SubAssign for DoubleDouble {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl MulAssign for DoubleDouble {
    #[inline]
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl PartialOrd for DoubleDouble {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Equal) => self.lo.partial_cmp(&other.lo),
            o => o,
        }
    }
}

impl Zero for DoubleDouble {
    fn zero() -> Self {
        Self::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi == 0.0 && self.lo == 0.0
    }
}

impl One for DoubleDouble {
    fn one() -> Self {
        Self::ONE
    }
}

impl Num for DoubleDouble {
    type FromStrRadixErr = std::num::ParseFloatError;
    fn from_str_radix(s: &str, _radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        s.parse::<f64>().map(Self::from_f64)
    }
}

impl fmt::Display for DoubleDouble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}{:+e}", self.hi, self.lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dd(x: f64) -> DoubleDouble {
        DoubleDouble::from_f64(x)
    }

    #[test]
    fn one_third_round_trips() {
        let third = dd(1.0) / dd(3.0);
        let back = third * dd(3.0);
        assert!((back - dd(1.0)).abs().to_f64() < 1e-31);
        // the low word carries the bits a double drops
        assert!(third.lo != 0.0);
    }

    #[test]
    fn sqrt_two_squared() {
        let r = dd(2.0).sqrt();
        assert!((r * r - dd(2.0)).abs().to_f64() < 1e-31);
    }

    #[test]
    fn nodes_lie_on_unit_circle() {
        for j in 0..64 {
            let (c, s) = DoubleDouble::cos_sin_turn(j, 64);
            let r = c * c + s * s - dd(1.0);
            assert!(r.abs().to_f64() < 1e-30, "j={j}");
        }
        let (c, s) = DoubleDouble::cos_sin_turn(8, 64);
        // 45 degrees
        assert!((c - s).abs().to_f64() < 1e-31);
        let (c, s) = DoubleDouble::cos_sin_turn(16, 64);
        assert!(c.abs().to_f64() < 1e-31 && (s - dd(1.0)).abs().to_f64() < 1e-31);
    }

    #[test]
    fn node_values_match_f64_trig() {
        for j in 0..128u64 {
            let (c, s) = DoubleDouble::cos_sin_turn(j, 128);
            let t = std::f64::consts::TAU * j as f64 / 128.0;
            assert!((c.to_f64() - t.cos()).abs() < 1e-15, "cos j={j}");
            assert!((s.to_f64() - t.sin()).abs() < 1e-15, "sin j={j}");
        }
    }
}
