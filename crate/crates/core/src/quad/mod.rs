//! Trapezoid quadrature on origin-centred circles, contours threaded between
//! geometric pole ladders, and the truncated bilateral sum of integrals.
//!
//! Every integral here is normalized as `∮ f(z) dz/(2πiz)`, i.e. the mean
//! of `f` over the circle.

mod discrete;
mod ladder;

pub use discrete::measure_sum;
pub use ladder::{ladder_integral, plan_contour, residue, ContourPlan, Correction, Ladder};

use rayon::prelude::*;

use crate::error::{QsvError, Result};
use crate::numeric::{abs, CompensatedSum, Real, Tracked, C};
use crate::qcore::QContext;

pub const MIN_NODES: usize = 64;
pub const MAX_NODES: usize = 65536;
/// Node batches at least this large are evaluated in parallel.
const PARALLEL_BATCH: usize = 256;

/// A circle `|z| = radius` sampled with an initial power-of-two node count.
#[derive(Clone, Copy, Debug)]
pub struct ContourSpec<R: Real> {
    radius: R,
    nodes: usize,
}

impl<R: Real> ContourSpec<R> {
    pub fn new(radius: R, nodes: usize) -> Result<Self> {
        if !(radius > R::zero()) {
            return Err(QsvError::InvalidIndex("contour radius must be positive".into()));
        }
        if nodes < MIN_NODES || !nodes.is_power_of_two() || nodes > MAX_NODES {
            return Err(QsvError::InvalidIndex(format!(
                "node count {nodes} must be a power of two in [{MIN_NODES}, {MAX_NODES}]"
            )));
        }
        Ok(Self { radius, nodes })
    }

    pub fn with_radius(radius: R) -> Result<Self> {
        Self::new(radius, MIN_NODES)
    }

    pub fn radius(&self) -> R {
        self.radius
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }
}

/// Largest modulus of each pole sequence that must lie inside the contour
/// and smallest modulus of each sequence that must lie outside.
#[derive(Clone, Debug, Default)]
pub struct PoleProfile {
    pub inside_moduli: Vec<f64>,
    pub outside_moduli: Vec<f64>,
}

impl PoleProfile {
    pub fn inside_max(&self) -> f64 {
        self.inside_moduli.iter().copied().fold(0.0, f64::max)
    }

    pub fn outside_min(&self) -> f64 {
        self.outside_moduli.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Geometric mean of the innermost outside pole and outermost inside pole.
pub fn choose_radius(profile: &PoleProfile) -> Result<f64> {
    let inside_max = profile.inside_max();
    let outside_min = profile.outside_min();
    if inside_max >= outside_min {
        return Err(QsvError::NoSeparatingContour {
            inside_max,
            outside_min,
        });
    }
    Ok(match (inside_max > 0.0, outside_min.is_finite()) {
        (true, true) => (inside_max * outside_min).sqrt(),
        (true, false) => 2.0 * inside_max,
        (false, true) => 0.5 * outside_min,
        (false, false) => 1.0,
    })
}

fn eval_nodes<R, F>(f: &F, radius: R, n: usize, odd_only: bool) -> Result<Vec<C<R>>>
where
    R: Real,
    F: Fn(C<R>) -> Result<C<R>> + Sync,
{
    let (step, first) = if odd_only { (2, 1) } else { (1, 0) };
    let count = if odd_only { n / 2 } else { n };
    let node = |i: usize| {
        let j = (first + step * i) as u64;
        let (c, s) = R::cos_sin_turn(j, n as u64);
        f(C::new(radius * c, radius * s))
    };
    if count >= PARALLEL_BATCH {
        (0..count).into_par_iter().map(node).collect()
    } else {
        (0..count).map(node).collect()
    }
}

/// Mean of `f` over `|z| = radius` with exactly `nodes` equispaced nodes.
pub fn circle_integral_fixed<R, F>(f: F, radius: R, nodes: usize) -> Result<Tracked<R>>
where
    R: Real,
    F: Fn(C<R>) -> Result<C<R>> + Sync,
{
    let vals = eval_nodes(&f, radius, nodes, false)?;
    let mut acc = CompensatedSum::new();
    for v in vals {
        acc.add(v);
    }
    let n = R::from_f64(nodes as f64);
    Ok(Tracked {
        value: acc.value() / n,
        magnitude: acc.abs_sum() / n,
    })
}

/// Outcome of an adaptive trapezoid run.
#[derive(Clone, Copy, Debug)]
pub struct Quadrature<R: Real> {
    /// Converged mean, with the mean of `|f|` as magnitude.
    pub integral: Tracked<R>,
    /// Node count at which agreement was reached.
    pub nodes: usize,
}

/// `∮ f(z) dz/(2πiz)` over the contour, doubling the node count until two
/// successive trapezoid values agree to the context's series tolerance.
pub fn circle_integral<R, F>(ctx: &QContext<R>, f: F, contour: &ContourSpec<R>) -> Result<Quadrature<R>>
where
    R: Real,
    F: Fn(C<R>) -> Result<C<R>> + Sync,
{
    let tol = ctx.agreement_tol();
    let mut n = contour.nodes;
    let mut acc = CompensatedSum::new();
    for v in eval_nodes(&f, contour.radius, n, false)? {
        acc.add(v);
    }
    let mut prev = acc.value() / R::from_f64(n as f64);
    let mut change = f64::INFINITY;
    while n < MAX_NODES {
        n *= 2;
        for v in eval_nodes(&f, contour.radius, n, true)? {
            acc.add(v);
        }
        let nn = R::from_f64(n as f64);
        let cur = acc.value() / nn;
        let scale = abs(cur).max(acc.abs_sum() / nn);
        let diff = abs(cur - prev);
        if diff <= tol * scale {
            return Ok(Quadrature {
                integral: Tracked {
                    value: cur,
                    magnitude: acc.abs_sum() / nn,
                },
                nodes: n,
            });
        }
        change = if scale > R::zero() {
            (diff / scale).to_f64()
        } else {
            f64::INFINITY
        };
        prev = cur;
    }
    Err(QsvError::QuadratureNonconvergent { nodes: n, change })
}

/// Consecutive negligible terms required on each side of a bilateral sum.
pub const TAIL_RUN: usize = 4;
/// Initial symmetric window of the x-summation.
pub const X_WINDOW: i64 = 8;
/// Hard limit on |x|.
pub const X_LIMIT: i64 = 256;

/// `Σ_x term(x)` over all integers, evaluated on `[−8, 8]` first and then
/// extended per side until the last four terms of that side are below
/// `x_tail_tol` times the largest term seen.
pub fn sum_of_integrals<R, F>(term: F, x_tail_tol: f64) -> Result<Tracked<R>>
where
    R: Real,
    F: Fn(i64) -> Result<Tracked<R>> + Sync,
{
    sum_of_integrals_padded(term, x_tail_tol, 0)
}

/// As [`sum_of_integrals`], with `pad` further terms added on each side
/// after the tails have settled.
pub fn sum_of_integrals_padded<R, F>(term: F, x_tail_tol: f64, pad: usize) -> Result<Tracked<R>>
where
    R: Real,
    F: Fn(i64) -> Result<Tracked<R>> + Sync,
{
    let window: Vec<Tracked<R>> = (-X_WINDOW..=X_WINDOW)
        .into_par_iter()
        .map(&term)
        .collect::<Result<_>>()?;
    let mut big = window.iter().map(|t| abs(t.value).to_f64()).fold(0.0, f64::max);
    // per-side lists ordered by increasing |x|
    let mid = X_WINDOW as usize;
    let mut neg: Vec<Tracked<R>> = window[..mid].iter().rev().copied().collect();
    let mut pos: Vec<Tracked<R>> = window[mid + 1..].to_vec();
    let small = |t: &Tracked<R>, big: f64| abs(t.value).to_f64() <= x_tail_tol * big;
    for (side, sign) in [(&mut pos, 1i64), (&mut neg, -1i64)] {
        let mut extra = None;
        loop {
            let settled = side.len() >= TAIL_RUN && side[side.len() - TAIL_RUN..].iter().all(|t| small(t, big));
            if settled && extra.is_none() {
                extra = Some(side.len() + pad);
            }
            if extra == Some(side.len()) {
                break;
            }
            let x = sign * (side.len() as i64 + 1);
            if x.abs() > X_LIMIT {
                return Err(QsvError::BilateralSumNonconvergent(X_LIMIT));
            }
            let t = term(x)?;
            big = big.max(abs(t.value).to_f64());
            side.push(t);
        }
    }
    let mut acc = CompensatedSum::new();
    acc.add_tracked(window[mid]);
    // fixed order for reproducibility: 0, then alternate by |x|
    for i in 0..pos.len().max(neg.len()) {
        if let Some(t) = pos.get(i) {
            acc.add_tracked(*t);
        }
        if let Some(t) = neg.get(i) {
            acc.add_tracked(*t);
        }
    }
    Ok(acc.tracked())
}
