use crate::error::{QsvError, Result};
use crate::numeric::{abs_f64, Real, Tracked, C};
use crate::qcore::QContext;

use super::{choose_radius, circle_integral, ContourSpec, PoleProfile, MIN_NODES};

/// A one-sided geometric sequence of simple poles: `base·q^s` (inward, must
/// be enclosed) or `base·q^{−s}` (outward, must be excluded) for `s ≥ start`.
#[derive(Clone, Copy, Debug)]
pub struct Ladder<R: Real> {
    pub base: C<R>,
    pub start: i64,
    pub inward: bool,
}

impl<R: Real> Ladder<R> {
    pub fn inward(base: C<R>, start: i64) -> Self {
        Self {
            base,
            start,
            inward: true,
        }
    }

    pub fn outward(base: C<R>, start: i64) -> Self {
        Self {
            base,
            start,
            inward: false,
        }
    }

    pub fn point(&self, ctx: &QContext<R>, s: i64) -> C<R> {
        self.base * ctx.qpow(if self.inward { s } else { -s })
    }

    /// `ln|point(s)|`.
    fn log_modulus(&self, lq: f64, s: i64) -> f64 {
        let b = abs_f64(self.base).ln();
        if self.inward {
            b - lq * s as f64
        } else {
            b + lq * s as f64
        }
    }

    /// Modulus of the first point, the one nearest the unit circle side.
    fn extreme(&self, lq: f64) -> f64 {
        self.log_modulus(lq, self.start).exp()
    }
}

/// A residue added (`sign = 1`) or removed (`sign = −1`) from a circle
/// integral, evaluated on a small circle of the given radius.
#[derive(Clone, Copy, Debug)]
pub struct Correction<R: Real> {
    pub point: C<R>,
    pub sign: i8,
    pub radius: f64,
}

/// A circle plus the finitely many ladder points it leaves on the wrong side.
#[derive(Clone, Debug)]
pub struct ContourPlan<R: Real> {
    pub radius: R,
    pub corrections: Vec<Correction<R>>,
    /// Log-modulus distance from the circle to the nearest ladder point.
    pub clearance: f64,
}

impl<R: Real> ContourPlan<R> {
    pub fn is_pure_circle(&self) -> bool {
        self.corrections.is_empty()
    }

    /// The same plan with the circle moved to `radius`, recomputing which
    /// ladder points need corrections.
    pub fn with_radius(ctx: &QContext<R>, ladders: &[Ladder<R>], radius: f64) -> Result<Self> {
        build(ctx, ladders, radius)
    }
}

/// More corrections than this means the ladders are hopelessly interleaved.
const MAX_CORRECTIONS: usize = 512;

fn profile<R: Real>(ladders: &[Ladder<R>], lq: f64) -> PoleProfile {
    let mut p = PoleProfile::default();
    for l in ladders {
        if l.inward {
            p.inside_moduli.push(l.extreme(lq));
        } else {
            p.outside_moduli.push(l.extreme(lq));
        }
    }
    p
}

/// Chooses the circle: the geometric-mean radius when the ladders are
/// separable, otherwise the midpoint of the widest log-modulus gap between
/// ladder points in the overlap region.
pub fn plan_contour<R: Real>(ctx: &QContext<R>, ladders: &[Ladder<R>]) -> Result<ContourPlan<R>> {
    let lq = -ctx.abs_q().ln();
    let prof = profile(ladders, lq);
    if let Ok(r) = choose_radius(&prof) {
        return build(ctx, ladders, r);
    }
    let lo = prof.outside_min().ln() - 2.0 * lq;
    let hi = prof.inside_max().ln() + 2.0 * lq;
    let mut logs = Vec::new();
    for l in ladders {
        let mut s = l.start;
        loop {
            let v = l.log_modulus(lq, s);
            if (l.inward && v < lo) || (!l.inward && v > hi) {
                break;
            }
            if v >= lo && v <= hi {
                logs.push(v);
            }
            s += 1;
        }
    }
    logs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut best = (f64::NEG_INFINITY, 0.0);
    for w in logs.windows(2) {
        let gap = w[1] - w[0];
        let mid = 0.5 * (w[0] + w[1]);
        // prefer wide gaps, then circles near |z| = 1
        let better = gap > best.0 * (1.0 + 1e-9) || ((gap - best.0).abs() <= 1e-9 * gap && mid.abs() < best.1.abs());
        if better {
            best = (gap, mid);
        }
    }
    if !best.0.is_finite() || best.0 <= 1e-6 {
        return Err(QsvError::NoSeparatingContour {
            inside_max: prof.inside_max(),
            outside_min: prof.outside_min(),
        });
    }
    build(ctx, ladders, best.1.exp())
}

fn build<R: Real>(ctx: &QContext<R>, ladders: &[Ladder<R>], radius: f64) -> Result<ContourPlan<R>> {
    let lq = -ctx.abs_q().ln();
    let lr = radius.ln();
    let mut clearance = f64::INFINITY;
    let mut corrections = Vec::new();
    for l in ladders {
        // nearest point to the circle along this ladder
        let b = abs_f64(l.base).ln();
        let s0 = if l.inward { (b - lr) / lq } else { (lr - b) / lq };
        for s in [s0.floor() as i64, s0.ceil() as i64] {
            if s >= l.start {
                clearance = clearance.min((l.log_modulus(lq, s) - lr).abs());
            }
        }
        if l.start > s0.ceil() as i64 {
            clearance = clearance.min((l.log_modulus(lq, l.start) - lr).abs());
        }
        let mut s = l.start;
        loop {
            let v = l.log_modulus(lq, s);
            let wrong = if l.inward { v >= lr } else { v <= lr };
            if !wrong {
                break;
            }
            if corrections.len() >= MAX_CORRECTIONS {
                return Err(QsvError::NoSeparatingContour {
                    inside_max: profile(ladders, lq).inside_max(),
                    outside_min: profile(ladders, lq).outside_min(),
                });
            }
            let p = l.point(ctx, s);
            corrections.push(Correction {
                point: p,
                sign: if l.inward { 1 } else { -1 },
                radius: 0.0,
            });
            s += 1;
        }
    }
    for c in corrections.iter_mut() {
        c.radius = 0.4 * isolation(ctx, ladders, c.point, lq)?;
    }
    Ok(ContourPlan {
        radius: R::from_f64(radius),
        corrections,
        clearance,
    })
}

/// Distance from `p` to the nearest other ladder point, capped by `|p|(1−|q|)`.
fn isolation<R: Real>(ctx: &QContext<R>, ladders: &[Ladder<R>], p: C<R>, lq: f64) -> Result<f64> {
    let pm = abs_f64(p);
    let mut d = pm * (1.0 - ctx.abs_q());
    let lp = pm.ln();
    let mut hits = 0;
    for l in ladders {
        let b = abs_f64(l.base).ln();
        let s0 = if l.inward { (b - lp) / lq } else { (lp - b) / lq };
        let c = s0.round() as i64;
        for s in c - 1..=c + 1 {
            if s < l.start {
                continue;
            }
            let dist = abs_f64(l.point(ctx, s) - p);
            if dist <= 1e-12 * pm {
                hits += 1;
            } else {
                d = d.min(dist);
            }
        }
    }
    if hits > 1 || d <= 1e-8 * pm {
        return Err(QsvError::DegenerateDraw(format!(
            "pole ladders collide near |z| = {pm:e}"
        )));
    }
    Ok(d)
}

/// `Res_{z=p} f(z)/z` for a simple pole `p`, as the mean of
/// `f(p+w)·w/(p+w)` over `|w| = eps`.
pub fn residue<R, F>(ctx: &QContext<R>, f: &F, p: C<R>, eps: f64) -> Result<Tracked<R>>
where
    R: Real,
    F: Fn(C<R>) -> Result<C<R>> + Sync,
{
    let g = |w: C<R>| Ok(f(p + w)? * w / (p + w));
    let spec = ContourSpec::new(R::from_f64(eps), MIN_NODES)?;
    Ok(circle_integral(ctx, g, &spec)?.integral)
}

/// `∮ f dz/(2πiz)` over the planned contour: the circle integral plus the
/// signed residue corrections.
pub fn ladder_integral<R, F>(ctx: &QContext<R>, f: F, plan: &ContourPlan<R>, nodes: usize) -> Result<Tracked<R>>
where
    R: Real,
    F: Fn(C<R>) -> Result<C<R>> + Sync,
{
    let spec = ContourSpec::new(plan.radius, nodes)?;
    let mut total = circle_integral(ctx, &f, &spec)?.integral;
    for c in &plan.corrections {
        let r = residue(ctx, &f, c.point, c.radius)?;
        total = if c.sign > 0 { total.add(r) } else { total.sub(r) };
    }
    Ok(total)
}
