//! Seeded parameter draws that respect the balancing conditions.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{QsvError, Result};
use crate::numeric::{abs_f64, Real, C};
use crate::params::{AsiParams, RahmanParams};
use crate::qcore::QContext;

/// Redraws allowed before a sampler gives up.
pub const MAX_ATTEMPTS: usize = 100;

/// One step of the SplitMix64 generator, used as a bijective seed mixer.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of draw `index` in a suite seeded with `suite_seed`.
pub fn draw_seed(suite_seed: u64, index: u64) -> u64 {
    splitmix64(suite_seed.wrapping_add(index))
}

pub fn draw_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A closed modulus interval. Bands for balanced parameters must lie in
/// `(0, 1)`; auxiliary points may use any positive interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Band {
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(QsvError::Config(format!("invalid modulus band [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    /// `|q|^{1/6}·[1−δ, 1+δ]`, where a balanced sextuple of equal moduli sits.
    pub fn around_sixth_root(abs_q: f64, delta: f64) -> Self {
        let r = abs_q.powf(1.0 / 6.0);
        Self { lo: r * (1.0 - delta), hi: r * (1.0 + delta) }
    }

    /// `|q|^{1/6} ± w`.
    pub fn sixth_root_pm(abs_q: f64, w: f64) -> Self {
        let r = abs_q.powf(1.0 / 6.0);
        Self { lo: r - w, hi: r + w }
    }

    pub fn contains(&self, m: f64) -> bool {
        m >= self.lo && m <= self.hi
    }

    fn check_unit(&self) -> Result<()> {
        if self.hi >= 1.0 {
            return Err(QsvError::Config(format!("modulus band [{}, {}] leaves (0,1)", self.lo, self.hi)));
        }
        Ok(())
    }
}

/// Uniform modulus in the band, uniform phase.
pub fn sample_point<R: Real, G: Rng + ?Sized>(rng: &mut G, band: Band) -> C<R> {
    let r = band.lo + (band.hi - band.lo) * rng.gen::<f64>();
    let phi = std::f64::consts::TAU * rng.gen::<f64>();
    Complex::new(R::from_f64(r * phi.cos()), R::from_f64(r * phi.sin()))
}

/// `q` with modulus and phase (radians) uniform in the given ranges.
pub fn sample_q<G: Rng + ?Sized>(rng: &mut G, modulus: [f64; 2], phase: [f64; 2]) -> Complex<f64> {
    let r = modulus[0] + (modulus[1] - modulus[0]) * rng.gen::<f64>();
    let phi = phase[0] + (phase[1] - phase[0]) * rng.gen::<f64>();
    Complex::from_polar(r, phi)
}

/// `b₁…b₅` in the band, `b₆ = q/(b₁⋯b₅)`, redrawn until `b₆` is in the
/// band too and the sextuple is generic.
pub fn sample_sextuple_with<R: Real, G: Rng + ?Sized>(
    ctx: &QContext<R>,
    rng: &mut G,
    band: Band,
) -> Result<RahmanParams<R>> {
    band.check_unit()?;
    for _ in 0..MAX_ATTEMPTS {
        let b: [C<R>; 5] = std::array::from_fn(|_| sample_point(rng, band));
        let p = match RahmanParams::completing(ctx, b) {
            Ok(p) => p,
            Err(_) => continue,
        };
        if band.contains(abs_f64(p.b()[5])) && p.certificate().is_generic(ctx.genericity_threshold) {
            return Ok(p);
        }
    }
    Err(QsvError::SamplingExhausted(MAX_ATTEMPTS))
}

pub fn sample_balanced_sextuple<R: Real>(ctx: &QContext<R>, seed: u64, band: Band) -> Result<RahmanParams<R>> {
    sample_sextuple_with(ctx, &mut draw_rng(seed), band)
}

/// `a₁, a₂, a₃, b₁, b₂` in the band, `b₃ = q/(a₁a₂a₃b₁b₂)`.
pub fn sample_triplepair_with<R: Real, G: Rng + ?Sized>(
    ctx: &QContext<R>,
    rng: &mut G,
    band: Band,
) -> Result<AsiParams<R>> {
    band.check_unit()?;
    for _ in 0..MAX_ATTEMPTS {
        let a: [C<R>; 3] = std::array::from_fn(|_| sample_point(rng, band));
        let b: [C<R>; 2] = std::array::from_fn(|_| sample_point(rng, band));
        let p = match AsiParams::completing(ctx, a, b) {
            Ok(p) => p,
            Err(_) => continue,
        };
        if band.contains(abs_f64(p.b()[2])) && p.certificate().is_generic(ctx.genericity_threshold) {
            return Ok(p);
        }
    }
    Err(QsvError::SamplingExhausted(MAX_ATTEMPTS))
}

pub fn sample_balanced_triplepair<R: Real>(ctx: &QContext<R>, seed: u64, band: Band) -> Result<AsiParams<R>> {
    sample_triplepair_with(ctx, &mut draw_rng(seed), band)
}
