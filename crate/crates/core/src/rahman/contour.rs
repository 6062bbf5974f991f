use crate::error::{QsvError, Result};
use crate::numeric::{abs, inv, one, Real, Tracked, C};
use crate::params::RahmanParams;
use crate::qcore::{qpoch_inf, qpoch_inf_prod, rahman_bracket, theta_prod, QContext, CONDITIONING_FLOOR};
use crate::quad::{ladder_integral, plan_contour, Ladder, MIN_NODES};

use super::VFunction;

/// Which pole ladders a contour representation of J has to respect.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VMeasure {
    /// Both ladders `b_j q^{s}` and `q^{−s}/b_j` for every `j`.
    Symmetric,
    /// `λ = b₆`: the `b₆` ladders cancel.
    Rahman,
    /// Only the outward ladders for `j ≤ 4`, both for `j = 5, 6`.
    Brn,
}

/// Pole ladders of `f` times the measure, shifted past the `n_j` poles of `f`.
pub fn v_ladders<R: Real>(b: &[C<R>; 6], n: [i64; 6], measure: VMeasure) -> Vec<Ladder<R>> {
    let mut out = Vec::with_capacity(12);
    for j in 0..6 {
        let (inward, outward) = match measure {
            VMeasure::Symmetric => (true, true),
            VMeasure::Rahman => (j < 5, j < 5),
            VMeasure::Brn => (j >= 4, true),
        };
        if inward {
            out.push(Ladder::inward(b[j], -n[j]));
        }
        if outward {
            out.push(Ladder::outward(inv(b[j]), -n[j]));
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

fn pair_poch<R: Real>(ctx: &QContext<R>, b: &[C<R>], f: impl Fn(C<R>) -> C<R>) -> Result<C<R>> {
    let mut p = one::<R>();
    for i in 0..b.len() {
        for j in i + 1..b.len() {
            p = p * qpoch_inf(ctx, f(b[i] * b[j]))?;
        }
    }
    Ok(p)
}

fn require_nonzero<R: Real>(what: &str, v: C<R>) -> Result<()> {
    if abs(v).to_f64() < CONDITIONING_FLOOR * 1e-4 {
        return Err(QsvError::DegenerateAuxiliary(format!("{what} vanishes ({:e})", abs(v).to_f64())));
    }
    Ok(())
}

/// `(b_j z, b_j/z)_∞` over `j ∈ js`.
fn measure_den<R: Real>(ctx: &QContext<R>, b: &[C<R>], z: C<R>) -> Result<C<R>> {
    let zi = inv(z);
    let mut d = one::<R>();
    for &bj in b {
        d = d * qpoch_inf(ctx, bj * z)? * qpoch_inf(ctx, bj * zi)?;
    }
    Ok(d)
}

/// `J(f)` as the symmetric contour integral with auxiliary point `λ`.
pub fn j_contour<R, F>(ctx: &QContext<R>, params: &RahmanParams<R>, f: &F, lam: C<R>) -> Result<Tracked<R>>
where
    R: Real,
    F: VFunction<R> + ?Sized,
{
    let b = params.b();
    let bracket = rahman_bracket(ctx, b, lam)?;
    require_nonzero("Rahman bracket at lambda", bracket.value)?;
    let pre = qpoch_inf(ctx, ctx.q())? * theta_prod(ctx, &[lam * lam])? * pair_poch(ctx, b, |x| x)?
        / (bracket.value + bracket.value);
    let ladders = v_ladders(b, f.pole_orders(), VMeasure::Symmetric);
    let g = |z: C<R>| {
        let zi = inv(z);
        let num = qpoch_inf_prod(ctx, &[z * z, zi * zi])? * theta_prod(ctx, &[lam * z, lam * zi])?;
        Ok(f.eval(ctx, b, z)? * num / measure_den(ctx, b, z)?)
    };
    Ok(integrate(ctx, &ladders, g)?.scale(pre))
}

/// `J(f)` as the contour integral at `λ = b₆`.
pub fn j_contour_rahman<R, F>(ctx: &QContext<R>, params: &RahmanParams<R>, f: &F) -> Result<Tracked<R>>
where
    R: Real,
    F: VFunction<R> + ?Sized,
{
    let b = params.b();
    let b5 = &b[..5];
    let s = b5.iter().fold(one::<R>(), |a, &x| a * x);
    let mut den = one::<R>() + one::<R>();
    for &bj in b5 {
        den = den * qpoch_inf(ctx, s * inv(bj))?;
    }
    let pre = qpoch_inf(ctx, ctx.q())? * pair_poch(ctx, b5, |x| x)? / den;
    let ladders = v_ladders(b, f.pole_orders(), VMeasure::Rahman);
    let g = |z: C<R>| {
        let zi = inv(z);
        let num = qpoch_inf_prod(ctx, &[z * z, zi * zi, s * z, s * zi])?;
        Ok(f.eval(ctx, b, z)? * num / measure_den(ctx, b5, z)?)
    };
    Ok(integrate(ctx, &ladders, g)?.scale(pre))
}

/// Normalising constant `C` of the non-symmetric representation.
pub fn nsj_constant<R: Real>(ctx: &QContext<R>, params: &RahmanParams<R>, lam: &[C<R>; 6]) -> Result<C<R>> {
    let b = params.b();
    let common = qpoch_inf(ctx, ctx.q())? * pair_poch(ctx, b, |x| x)?;
    let half = |l1: C<R>, l2: C<R>| -> Result<C<R>> {
        let others: Vec<C<R>> = lam[2..].iter().map(|&l| l * l2).collect();
        let num = theta_prod(ctx, &others)? * rahman_bracket(ctx, b, l1)?.value;
        let den = l2 * theta_prod(ctx, &[l1 * l1, l1 * inv(l2)])? * common;
        Ok(num / den)
    };
    Ok(half(lam[0], lam[1])? + half(lam[1], lam[0])?)
}

/// `J(f)` as the non-symmetric contour integral with `λ₁⋯λ₆ = q`.
pub fn j_contour_nonsym<R, F>(ctx: &QContext<R>, params: &RahmanParams<R>, f: &F, lam: [C<R>; 6]) -> Result<Tracked<R>>
where
    R: Real,
    F: VFunction<R> + ?Sized,
{
    let prod = lam.iter().fold(one::<R>(), |a, &x| a * x);
    let dev = abs(prod * inv(ctx.q()) - one::<R>());
    if dev > ctx.constraint_tol() {
        return Err(QsvError::ConstraintViolated(format!(
            "lambda product deviates from q by {:e}",
            dev.to_f64()
        )));
    }
    let b = params.b();
    let c = nsj_constant(ctx, params, &lam)?;
    require_nonzero("normalising constant", c)?;
    let ladders = v_ladders(b, f.pole_orders(), VMeasure::Symmetric);
    let g = |z: C<R>| {
        let zi = inv(z);
        let th: Vec<C<R>> = lam.iter().map(|&l| l * z).collect();
        let w = (z - zi) * zi * zi * theta_prod(ctx, &th)?;
        Ok(f.eval(ctx, b, z)? * w / measure_den(ctx, b, z)?)
    };
    Ok(integrate(ctx, &ladders, g)?.scale(inv(c)))
}

/// `J(f)` as the non-symmetric integral specialised at `λ_j = b_j`, `j ≤ 4`.
pub fn j_contour_brn<R, F>(ctx: &QContext<R>, params: &RahmanParams<R>, f: &F, lam: C<R>) -> Result<Tracked<R>>
where
    R: Real,
    F: VFunction<R> + ?Sized,
{
    let b = params.b();
    let q = ctx.q();
    let (b5, b6) = (b[4], b[5]);
    let th = theta_prod(ctx, &[b5 * lam, b6 * lam])?;
    require_nonzero("theta(b5 lambda, b6 lambda)", th)?;
    let mut num = b5 * b6 * lam * qpoch_inf_prod(ctx, &[q, b5 * b6])?;
    for &bj in &b[..4] {
        num = num * qpoch_inf_prod(ctx, &[bj * b5, bj * b6])?;
    }
    let pre = num / (th * pair_poch(ctx, &b[..4], |x| q * inv(x))?);
    let ladders = v_ladders(b, f.pole_orders(), VMeasure::Brn);
    let shift = inv(b5 * b6 * lam);
    let g = |z: C<R>| {
        let zi = inv(z);
        let mut w = (z - zi) * theta_prod(ctx, &[lam * z, z * shift])? / measure_den(ctx, &b[4..], z)?;
        for &bj in &b[..4] {
            w = w * qpoch_inf(ctx, q * z * inv(bj))? / qpoch_inf(ctx, bj * z)?;
        }
        Ok(f.eval(ctx, b, z)? * w)
    };
    Ok(integrate(ctx, &ladders, g)?.scale(pre))
}
