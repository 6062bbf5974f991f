//! Sum-integrals of superconformal-index type: a bilateral sum over `x` of
//! contour integrals whose contour moves with `x`. At the V and W levels the
//! integrals of `f(q^{−x/2}z) g(q^{x/2}z)` factor into `J(f)J′(g)` and
//! `K(f)K′(g)`, which yields two-index biorthogonal systems.

mod biorth;

pub use biorth::{verify_two_index_biorthogonality, verify_two_index_biorthogonality_w};

use crate::alsalam::{k_exact, WElement, WFunction};
use crate::error::{QsvError, Result};
use crate::numeric::{binom2, inv, one, powi, Real, ScaledProduct, Tracked, C};
use crate::params::{AsiParams, RahmanParams};
use crate::qcore::{qpoch_inf, qpoch_inf_scaled, QContext};
use crate::quad::{ladder_integral, plan_contour, sum_of_integrals_padded, ContourPlan, Ladder, MIN_NODES};
use crate::rahman::{j_exact, VElement, VFunction};
use crate::report::{Comparison, VerificationReport};

/// Integrand magnitudes below `2^−UNDERFLOW_LOG2` count as zero.
const UNDERFLOW_LOG2: f64 = 2000.0;

/// `b₁…b₆` with `b₁⋯b₆ = q` and integers `N₁+⋯+N₆ = 0`.
#[derive(Clone, Debug)]
pub struct IndexParamsGi<R: Real> {
    b: RahmanParams<R>,
    n: [i64; 6],
}

impl<R: Real> IndexParamsGi<R> {
    pub fn new(b: RahmanParams<R>, n: [i64; 6]) -> Result<Self> {
        if n.iter().sum::<i64>() != 0 {
            return Err(QsvError::ConstraintViolated(format!("N = {n:?} does not sum to zero")));
        }
        Ok(Self { b, n })
    }

    pub fn b(&self) -> &RahmanParams<R> {
        &self.b
    }

    pub fn n(&self) -> [i64; 6] {
        self.n
    }

    /// The parameters `b_j q^{N_j}` of the primed space.
    pub fn shifted(&self, ctx: &QContext<R>) -> Result<RahmanParams<R>> {
        self.b.shifted(ctx, self.n)
    }
}

/// `a, b` with `a₁a₂a₃b₁b₂b₃ = q` and integers `Σ M_j = Σ N_j = 0`.
#[derive(Clone, Debug)]
pub struct IndexParamsSp<R: Real> {
    p: AsiParams<R>,
    m: [i64; 3],
    n: [i64; 3],
}

impl<R: Real> IndexParamsSp<R> {
    pub fn new(p: AsiParams<R>, m: [i64; 3], n: [i64; 3]) -> Result<Self> {
        if m.iter().sum::<i64>() != 0 || n.iter().sum::<i64>() != 0 {
            return Err(QsvError::ConstraintViolated(format!("M = {m:?}, N = {n:?} must sum to zero")));
        }
        Ok(Self { p, m, n })
    }

    pub fn params(&self) -> &AsiParams<R> {
        &self.p
    }

    pub fn m(&self) -> [i64; 3] {
        self.m
    }

    pub fn n(&self) -> [i64; 3] {
        self.n
    }

    /// The parameters `a_j q^{M_j}`, `b_j q^{N_j}` of the primed space.
    pub fn shifted(&self, ctx: &QContext<R>) -> Result<AsiParams<R>> {
        self.p.shifted(ctx, self.m, self.n)
    }
}

/// `∏ (a_i;q)_∞^{±1}` in scaled form.
fn scaled_ratio<R: Real>(ctx: &QContext<R>, num: &[C<R>], den: &[C<R>]) -> Result<ScaledProduct<R>> {
    let mut p = ScaledProduct::one();
    for &a in num {
        p.mul_scaled(&qpoch_inf_scaled(ctx, a)?);
    }
    for &a in den {
        let d = qpoch_inf_scaled(ctx, a)?;
        if d.log2_abs() == f64::NEG_INFINITY {
            return Err(QsvError::PoleHit("measure denominator vanishes".into()));
        }
        p.div_scaled(&d);
    }
    Ok(p)
}

/// Multiplies `p` by `u^k` one factor at a time.
fn mul_power<R: Real>(p: &mut ScaledProduct<R>, u: C<R>, k: i64) {
    let f = if k >= 0 { u } else { inv(u) };
    for _ in 0..k.abs() {
        p.mul(f);
    }
}

/// Knobs for robustness checks of the sum-integral evaluator.
#[derive(Clone, Copy, Debug)]
pub struct SumOptions {
    /// Extra `x` terms per side beyond the settled tails.
    pub pad: usize,
    /// Factor applied to every per-`x` contour radius.
    pub rho_scale: f64,
}

impl Default for SumOptions {
    fn default() -> Self {
        Self { pad: 0, rho_scale: 1.0 }
    }
}

/// `Σ_x term(x)` where each term is a ladder-corrected circle integral.
fn sum_integral<R, L, M>(ctx: &QContext<R>, opts: &SumOptions, ladders: L, integrand: M) -> Result<Tracked<R>>
where
    R: Real,
    L: Fn(i64) -> Vec<Ladder<R>> + Sync,
    M: Fn(i64, C<R>) -> Result<C<R>> + Sync,
{
    let term = |x: i64| -> Result<Tracked<R>> {
        let l = ladders(x);
        let mut plan = plan_contour(ctx, &l)?;
        if opts.rho_scale != 1.0 {
            plan = ContourPlan::with_radius(ctx, &l, plan.radius.to_f64() * opts.rho_scale)?;
        }
        ladder_integral(ctx, |z| integrand(x, z), &plan, MIN_NODES)
    };
    sum_of_integrals_padded(term, ctx.series_tol.to_f64(), opts.pad)
}

/// `Σ_x ∮ (1−q^xz²)(1−q^xz⁻²) q^{−x} z^{−6x} ∏_j (q^{1+x/2}/b_jz, q^{1−x/2}z/b_j)_∞
/// / (q^{N_j+x/2}b_jz, q^{N_j−x/2}b_j/z)_∞ · f(q^{−x/2}z) g(q^{x/2}z)`.
///
/// `f` lives on the parameters of `p`, `g` on `c`, which must be a
/// permutation of `b_j q^{N_j}`.
pub fn sum_integral_v<R, F, G>(
    ctx: &QContext<R>,
    p: &IndexParamsGi<R>,
    f: &F,
    g: &G,
    c: &RahmanParams<R>,
) -> Result<Tracked<R>>
where
    R: Real,
    F: VFunction<R> + ?Sized,
    G: VFunction<R> + ?Sized,
{
    sum_integral_v_with(ctx, p, f, g, c, &SumOptions::default())
}

/// [`sum_integral_v`] with explicit evaluator options.
pub fn sum_integral_v_with<R, F, G>(
    ctx: &QContext<R>,
    p: &IndexParamsGi<R>,
    f: &F,
    g: &G,
    c: &RahmanParams<R>,
    opts: &SumOptions,
) -> Result<Tracked<R>>
where
    R: Real,
    F: VFunction<R> + ?Sized,
    G: VFunction<R> + ?Sized,
{
    let b = p.b.b();
    let cb = c.b();
    let gp = g.pole_orders();
    let q = ctx.q();
    let shifted: [C<R>; 6] = std::array::from_fn(|j| b[j] * ctx.qpow(p.n[j]));
    let ladders = |x: i64| {
        let s = ctx.half_qpow(-x);
        let mut l = Vec::with_capacity(12);
        for j in 0..6 {
            l.push(Ladder::inward(cb[j] * s, -gp[j]));
            l.push(Ladder::outward(s * inv(cb[j]), -gp[j]));
        }
        l
    };
    let integrand = |x: i64, z: C<R>| -> Result<C<R>> {
        let h = ctx.half_qpow(x);
        let hi = ctx.half_qpow(-x);
        let zi = inv(z);
        let mut num = Vec::with_capacity(12);
        let mut den = Vec::with_capacity(12);
        for j in 0..6 {
            let bi = inv(b[j]);
            num.push(q * h * bi * zi);
            num.push(q * hi * z * bi);
            den.push(shifted[j] * h * z);
            den.push(shifted[j] * hi * zi);
        }
        let mut m = scaled_ratio(ctx, &num, &den)?;
        let qx = ctx.qpow(x);
        m.mul((one::<R>() - qx * z * z) * (one::<R>() - qx * zi * zi));
        mul_power(&mut m, q, -x);
        mul_power(&mut m, z, -6 * x);
        if m.log2_abs() < -UNDERFLOW_LOG2 {
            return Ok(C::new(R::zero(), R::zero()));
        }
        m.mul(f.eval(ctx, b, hi * z)? * g.eval(ctx, cb, h * z)?);
        Ok(m.value())
    };
    sum_integral(ctx, opts, ladders, integrand)
}

/// `2 ∏_{i<j}(q/b_ib_j)_∞/(b_ib_jq^{N_i+N_j})_∞ / ∏_j q^{C(N_j,2)} b_j^{N_j}`.
pub fn gi_rhs<R: Real>(ctx: &QContext<R>, p: &IndexParamsGi<R>) -> Result<C<R>> {
    let b = p.b.b();
    let q = ctx.q();
    let mut v = one::<R>() + one::<R>();
    for i in 0..6 {
        for j in i + 1..6 {
            let bb = b[i] * b[j];
            v = v * qpoch_inf(ctx, q * inv(bb))? / qpoch_inf(ctx, bb * ctx.qpow(p.n[i] + p.n[j]))?;
        }
    }
    for j in 0..6 {
        v = v / (ctx.qpow(binom2(p.n[j])) * powi(b[j], p.n[j]));
    }
    Ok(v)
}

/// The top-level sum-integral evaluation.
pub fn verify_gi<R: Real>(ctx: &QContext<R>, p: &IndexParamsGi<R>) -> Result<VerificationReport> {
    let one_v = VElement::<R>::one();
    let lhs = sum_integral_v(ctx, p, &one_v, &one_v, &p.shifted(ctx)?)?;
    let rhs = gi_rhs(ctx, p)?;
    Ok(Comparison::new("gi", lhs, Tracked::exact(rhs))
        .params("b", p.b.b())
        .params("N", &p.n.map(|k| C::new(R::from_i64(k), R::zero())))
        .finish(ctx.verify_tol))
}

/// The sum-integral of `f(q^{−x/2}z) g(q^{x/2}z)` against `J(f)J′(g)`.
pub fn verify_decoupling_v<R: Real>(
    ctx: &QContext<R>,
    p: &IndexParamsGi<R>,
    f: &VElement<R>,
    g: &VElement<R>,
) -> Result<VerificationReport> {
    let c = p.shifted(ctx)?;
    let lhs = sum_integral_v(ctx, p, f, g, &c)?;
    let jf = j_exact(ctx, &p.b, f)?;
    let jg = j_exact(ctx, &c, g)?;
    let rhs = jf.mul(jg).scale(gi_rhs(ctx, p)?);
    Ok(Comparison::new("decoupling_v", lhs, rhs)
        .params("b", p.b.b())
        .params("N", &p.n.map(|k| C::new(R::from_i64(k), R::zero())))
        .finish(ctx.verify_tol))
}

/// `Σ_x ∮ ∏_j (q^{1+x/2}/a_jz, q^{1−x/2}z/b_j)_∞/(q^{M_j+x/2}a_jz, q^{N_j−x/2}b_j/z)_∞
/// (−q^{1/2}/tz³)^x f(q^{−x/2}z) g(q^{x/2}z)`.
///
/// `f` lives on the parameters of `p`, `g` on `primed`, which must be a
/// relabelling of `a_j q^{M_j}`, `b_j q^{N_j}`.
pub fn sum_integral_w<R, F, G>(
    ctx: &QContext<R>,
    p: &IndexParamsSp<R>,
    f: &F,
    g: &G,
    primed: &AsiParams<R>,
) -> Result<Tracked<R>>
where
    R: Real,
    F: WFunction<R> + ?Sized,
    G: WFunction<R> + ?Sized,
{
    sum_integral_w_with(ctx, p, f, g, primed, &SumOptions::default())
}

/// [`sum_integral_w`] with explicit evaluator options.
pub fn sum_integral_w_with<R, F, G>(
    ctx: &QContext<R>,
    p: &IndexParamsSp<R>,
    f: &F,
    g: &G,
    primed: &AsiParams<R>,
    opts: &SumOptions,
) -> Result<Tracked<R>>
where
    R: Real,
    F: WFunction<R> + ?Sized,
    G: WFunction<R> + ?Sized,
{
    let (a, b) = (p.p.a(), p.p.b());
    let (ap, bp) = (primed.a(), primed.b());
    let gp = g.pole_orders();
    let q = ctx.q();
    let am: [C<R>; 3] = std::array::from_fn(|j| a[j] * ctx.qpow(p.m[j]));
    let bn: [C<R>; 3] = std::array::from_fn(|j| b[j] * ctx.qpow(p.n[j]));
    let ladders = |x: i64| {
        let s = ctx.half_qpow(-x);
        let mut l = Vec::with_capacity(6);
        for j in 0..3 {
            l.push(Ladder::inward(bp[j] * s, -gp.b[j]));
            l.push(Ladder::outward(s * inv(ap[j]), -gp.a[j]));
        }
        l
    };
    let base = -ctx.sqrt_q() * inv(p.p.t());
    let integrand = |x: i64, z: C<R>| -> Result<C<R>> {
        let h = ctx.half_qpow(x);
        let hi = ctx.half_qpow(-x);
        let zi = inv(z);
        let mut num = Vec::with_capacity(6);
        let mut den = Vec::with_capacity(6);
        for j in 0..3 {
            num.push(q * h * inv(a[j]) * zi);
            num.push(q * hi * z * inv(b[j]));
            den.push(am[j] * h * z);
            den.push(bn[j] * hi * zi);
        }
        let mut m = scaled_ratio(ctx, &num, &den)?;
        mul_power(&mut m, base * zi * zi * zi, x);
        if m.log2_abs() < -UNDERFLOW_LOG2 {
            return Ok(C::new(R::zero(), R::zero()));
        }
        m.mul(f.eval(ctx, &p.p, hi * z)? * g.eval(ctx, primed, h * z)?);
        Ok(m.value())
    };
    sum_integral(ctx, opts, ladders, integrand)
}

/// `∏_{i,j}(q/a_ib_j)_∞/(a_ib_jq^{M_i+N_j})_∞ / ∏_j q^{C(M_j,2)+C(N_j,2)} a_j^{M_j} b_j^{N_j}`.
pub fn sp_rhs<R: Real>(ctx: &QContext<R>, p: &IndexParamsSp<R>) -> Result<C<R>> {
    let (a, b) = (p.p.a(), p.p.b());
    let q = ctx.q();
    let mut v = one::<R>();
    for i in 0..3 {
        for j in 0..3 {
            let ab = a[i] * b[j];
            v = v * qpoch_inf(ctx, q * inv(ab))? / qpoch_inf(ctx, ab * ctx.qpow(p.m[i] + p.n[j]))?;
        }
    }
    for j in 0..3 {
        v = v
            / (ctx.qpow(binom2(p.m[j]) + binom2(p.n[j])) * powi(a[j], p.m[j]) * powi(b[j], p.n[j]));
    }
    Ok(v)
}

/// The Saalschütz-level sum-integral evaluation.
pub fn verify_sp<R: Real>(ctx: &QContext<R>, p: &IndexParamsSp<R>) -> Result<VerificationReport> {
    let one_w = WElement::<R>::one();
    let lhs = sum_integral_w(ctx, p, &one_w, &one_w, &p.shifted(ctx)?)?;
    let rhs = sp_rhs(ctx, p)?;
    Ok(sp_comparison("sp", p, lhs, Tracked::exact(rhs)).finish(ctx.verify_tol))
}

fn sp_comparison<R: Real>(name: &str, p: &IndexParamsSp<R>, lhs: Tracked<R>, rhs: Tracked<R>) -> Comparison<R> {
    Comparison::new(name, lhs, rhs)
        .params("a", p.p.a())
        .params("b", p.p.b())
        .params("M", &p.m.map(|k| C::new(R::from_i64(k), R::zero())))
        .params("N", &p.n.map(|k| C::new(R::from_i64(k), R::zero())))
}

/// The sum-integral of `f(q^{−x/2}z) g(q^{x/2}z)` against `K(f)K′(g)`.
pub fn verify_decoupling_w<R: Real>(
    ctx: &QContext<R>,
    p: &IndexParamsSp<R>,
    f: &WElement<R>,
    g: &WElement<R>,
) -> Result<VerificationReport> {
    let primed = p.shifted(ctx)?;
    let lhs = sum_integral_w(ctx, p, f, g, &primed)?;
    let kf = k_exact(ctx, &p.p, f)?;
    let kg = k_exact(ctx, &primed, g)?;
    let rhs = kf.mul(kg).scale(sp_rhs(ctx, p)?);
    Ok(sp_comparison("decoupling_w", p, lhs, rhs).finish(ctx.verify_tol))
}
