use crate::error::{QsvError, Result};
use crate::numeric::{abs, inv, one, Real, Tracked, C};
use crate::params::AsiParams;
use crate::qcore::{qpoch_inf, qpoch_inf_prod, theta_prod, QContext, CONDITIONING_FLOOR};
use crate::quad::{ladder_integral, plan_contour, Ladder, MIN_NODES};
use crate::report::{Comparison, VerificationReport};

use super::{WFunction, WPoles};

/// The specialised contour representations of K.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KVariant {
    /// Gasper's measure with `(qz/b₃)_∞`; the `b₃` poles cancel.
    Gk,
    /// Its mirror image with `(q/a₃z)_∞`; the `a₃` poles cancel.
    Gkb,
    /// Both cancellations at once, with the fixed factor `θ(a₁a₂b₃z)`.
    Aik,
}

/// Pole ladders of `f` times the measure. `None` is the general measure,
/// which keeps all six.
pub fn w_ladders<R: Real>(params: &AsiParams<R>, poles: WPoles, variant: Option<KVariant>) -> Vec<Ladder<R>> {
    let (a, b) = (params.a(), params.b());
    let (keep_a3, keep_b3) = match variant {
        None => (true, true),
        Some(KVariant::Gk) => (true, false),
        Some(KVariant::Gkb) => (false, true),
        Some(KVariant::Aik) => (false, false),
    };
    let mut out = Vec::with_capacity(6);
    for j in 0..3 {
        if j < 2 || keep_b3 {
            out.push(Ladder::inward(b[j], -poles.b[j]));
        }
        if j < 2 || keep_a3 {
            out.push(Ladder::outward(inv(a[j]), -poles.a[j]));
        }
    }
    out
}

fn integrate<R, F>(ctx: &QContext<R>, ladders: &[Ladder<R>], g: F) -> Result<Tracked<R>>
where
    R: Real,
    F: Fn(C<R>) -> Result<C<R>> + Sync,
{
    let plan = plan_contour(ctx, ladders)?;
    ladder_integral(ctx, g, &plan, MIN_NODES)
}

fn require_nonzero<R: Real>(what: &str, v: C<R>) -> Result<()> {
    if abs(v).to_f64() < CONDITIONING_FLOOR * 1e-4 {
        return Err(QsvError::DegenerateAuxiliary(format!("{what} vanishes ({:e})", abs(v).to_f64())));
    }
    Ok(())
}

/// `∏_{j∈ja}(a_j z)_∞ ∏_{j∈jb}(b_j/z)_∞`.
fn measure_den<R: Real>(ctx: &QContext<R>, a: &[C<R>], b: &[C<R>], z: C<R>) -> Result<C<R>> {
    let zi = inv(z);
    let mut d = one::<R>();
    for &x in a {
        d = d * qpoch_inf(ctx, x * z)?;
    }
    for &x in b {
        d = d * qpoch_inf(ctx, x * zi)?;
    }
    Ok(d)
}

fn check_lambda<R: Real>(ctx: &QContext<R>, params: &AsiParams<R>, lam: &[C<R>; 3]) -> Result<()> {
    let prod = lam[0] * lam[1] * lam[2];
    let target = ctx.q() * params.t();
    let dev = abs(prod * inv(target) - one::<R>());
    if dev > ctx.constraint_tol() {
        return Err(QsvError::ConstraintViolated(format!(
            "lambda product deviates from q*a1a2a3 by {:e}",
            dev.to_f64()
        )));
    }
    Ok(())
}

/// `∏θ(λ₁/a_j, λ₂b_j) − (λ₁/λ₂)∏θ(λ₁b_j, λ₂/a_j)`.
fn sgl_bracket<R: Real>(ctx: &QContext<R>, params: &AsiParams<R>, l1: C<R>, l2: C<R>) -> Result<C<R>> {
    let (a, b) = (params.a(), params.b());
    let mut u = Vec::with_capacity(6);
    let mut v = Vec::with_capacity(6);
    for j in 0..3 {
        u.extend([l1 * inv(a[j]), l2 * b[j]]);
        v.extend([l1 * b[j], l2 * inv(a[j])]);
    }
    Ok(theta_prod(ctx, &u)? - l1 * inv(l2) * theta_prod(ctx, &v)?)
}

/// `(q)_∞ θ(λ₁/λ₂) ∏_{i,j}(a_ib_j)_∞`.
fn sgl_denominator<R: Real>(ctx: &QContext<R>, params: &AsiParams<R>, l1: C<R>, l2: C<R>) -> Result<C<R>> {
    let (a, b) = (params.a(), params.b());
    let mut d = qpoch_inf(ctx, ctx.q())? * theta_prod(ctx, &[l1 * inv(l2)])?;
    for &x in a {
        for &y in b {
            d = d * qpoch_inf(ctx, x * y)?;
        }
    }
    Ok(d)
}

fn sgl_integral<R, F>(ctx: &QContext<R>, params: &AsiParams<R>, f: &F, lam: &[C<R>; 3]) -> Result<Tracked<R>>
where
    R: Real,
    F: WFunction<R> + ?Sized,
{
    let ladders = w_ladders(params, f.pole_orders(), None);
    let (a, b) = (params.a(), params.b());
    let g = |z: C<R>| {
        let th = theta_prod(ctx, &[lam[0] * z, lam[1] * z, lam[2] * z])?;
        Ok(f.eval(ctx, params, z)? * th / measure_den(ctx, a, b, z)?)
    };
    integrate(ctx, &ladders, g)
}

/// The one-parameter extension of Gasper's integral, with
/// `λ₁λ₂λ₃ = q a₁a₂a₃`.
pub fn verify_sgl<R: Real>(ctx: &QContext<R>, params: &AsiParams<R>, lam: [C<R>; 3]) -> Result<VerificationReport> {
    check_lambda(ctx, params, &lam)?;
    let lhs = sgl_integral(ctx, params, &super::WElement::one(), &lam)?;
    let rhs = sgl_bracket(ctx, params, lam[0], lam[1])? / sgl_denominator(ctx, params, lam[0], lam[1])?;
    Ok(Comparison::new("sgl", lhs, Tracked::exact(rhs))
        .params("a", params.a())
        .params("b", params.b())
        .params("lam", &lam)
        .finish(ctx.verify_tol))
}

/// Gasper's integral
/// `∮ (qz/b₃)_∞θ(λz, qz/λb₁b₂)/(a₁z,a₂z,a₃z,b₁/z,b₂/z)_∞ = θ(b₁λ,b₂λ)/(q)_∞ ∏_j (q/b₃a_j)_∞/(b₁a_j,b₂a_j)_∞`.
pub fn verify_gasper<R: Real>(ctx: &QContext<R>, params: &AsiParams<R>, lam: C<R>) -> Result<VerificationReport> {
    let lhs = gk_integral(ctx, params, &super::WElement::one(), lam)?;
    let (a, b) = (params.a(), params.b());
    let q = ctx.q();
    let mut rhs = theta_prod(ctx, &[b[0] * lam, b[1] * lam])? / qpoch_inf(ctx, q)?;
    for &aj in a {
        rhs = rhs * qpoch_inf(ctx, q * inv(b[2] * aj))? / qpoch_inf_prod(ctx, &[b[0] * aj, b[1] * aj])?;
    }
    Ok(Comparison::new("gasper", lhs, Tracked::exact(rhs))
        .params("a", a)
        .params("b", b)
        .param("lam", lam)
        .finish(ctx.verify_tol))
}

fn gk_integral<R, F>(ctx: &QContext<R>, params: &AsiParams<R>, f: &F, lam: C<R>) -> Result<Tracked<R>>
where
    R: Real,
    F: WFunction<R> + ?Sized,
{
    let (a, b) = (params.a(), params.b());
    let q = ctx.q();
    let ladders = w_ladders(params, f.pole_orders(), Some(KVariant::Gk));
    let s = q * inv(lam * b[0] * b[1]);
    let b3i = inv(b[2]);
    let g = |z: C<R>| {
        let num = qpoch_inf(ctx, q * z * b3i)? * theta_prod(ctx, &[lam * z, s * z])?;
        Ok(f.eval(ctx, params, z)? * num / measure_den(ctx, a, &b[..2], z)?)
    };
    integrate(ctx, &ladders, g)
}

/// `K(f)` as the contour integral with three auxiliary points,
/// `λ₁λ₂λ₃ = q a₁a₂a₃`.
pub fn k_contour<R, F>(ctx: &QContext<R>, params: &AsiParams<R>, f: &F, lam: [C<R>; 3]) -> Result<Tracked<R>>
where
    R: Real,
    F: WFunction<R> + ?Sized,
{
    check_lambda(ctx, params, &lam)?;
    let br = sgl_bracket(ctx, params, lam[0], lam[1])?;
    require_nonzero("bracket", br)?;
    let pre = sgl_denominator(ctx, params, lam[0], lam[1])? / br;
    Ok(sgl_integral(ctx, params, f, &lam)?.scale(pre))
}

/// `K(f)` through one of the specialised measures. `lam` is ignored by
/// [`KVariant::Aik`].
pub fn k_contour_special<R, F>(
    ctx: &QContext<R>,
    params: &AsiParams<R>,
    f: &F,
    variant: KVariant,
    lam: C<R>,
) -> Result<Tracked<R>>
where
    R: Real,
    F: WFunction<R> + ?Sized,
{
    let (a, b) = (params.a(), params.b());
    let q = ctx.q();
    match variant {
        KVariant::Gk => {
            let th = theta_prod(ctx, &[b[0] * lam, b[1] * lam])?;
            require_nonzero("theta(b1 lambda, b2 lambda)", th)?;
            let mut pre = qpoch_inf(ctx, q)? / th;
            for &aj in a {
                pre = pre * qpoch_inf_prod(ctx, &[b[0] * aj, b[1] * aj])? / qpoch_inf(ctx, q * inv(b[2] * aj))?;
            }
            Ok(gk_integral(ctx, params, f, lam)?.scale(pre))
        }
        KVariant::Gkb => {
            let th = theta_prod(ctx, &[lam * inv(a[0]), lam * inv(a[1])])?;
            require_nonzero("theta(lambda/a1, lambda/a2)", th)?;
            let mut pre = qpoch_inf(ctx, q)? / th;
            for &bj in b {
                pre = pre * qpoch_inf_prod(ctx, &[a[0] * bj, a[1] * bj])? / qpoch_inf(ctx, q * inv(a[2] * bj))?;
            }
            let ladders = w_ladders(params, f.pole_orders(), Some(variant));
            let s = q * a[0] * a[1] * inv(lam);
            let a3i = inv(a[2]);
            let g = |z: C<R>| {
                let num = qpoch_inf(ctx, q * a3i * inv(z))? * theta_prod(ctx, &[lam * z, s * z])?;
                Ok(f.eval(ctx, params, z)? * num / measure_den(ctx, &a[..2], b, z)?)
            };
            Ok(integrate(ctx, &ladders, g)?.scale(pre))
        }
        KVariant::Aik => {
            let mut den = qpoch_inf(ctx, q * inv(a[2] * b[2]))?;
            for j in 0..2 {
                den = den * qpoch_inf_prod(ctx, &[q * inv(a[2] * b[j]), q * inv(b[2] * a[j])])?;
            }
            let mut num = qpoch_inf(ctx, q)?;
            for &x in &a[..2] {
                for &y in &b[..2] {
                    num = num * qpoch_inf(ctx, x * y)?;
                }
            }
            let ladders = w_ladders(params, f.pole_orders(), Some(variant));
            let s = a[0] * a[1] * b[2];
            let (a3i, b3i) = (inv(a[2]), inv(b[2]));
            let g = |z: C<R>| {
                let m = qpoch_inf_prod(ctx, &[q * z * b3i, q * a3i * inv(z)])? * theta_prod(ctx, &[s * z])?;
                Ok(f.eval(ctx, params, z)? * m / measure_den(ctx, &a[..2], &b[..2], z)?)
            };
            Ok(integrate(ctx, &ladders, g)?.scale(num / den))
        }
    }
}
