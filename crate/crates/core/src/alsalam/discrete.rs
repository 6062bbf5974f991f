use rand::Rng;

use crate::error::{QsvError, Result};
use crate::numeric::{abs, inv, one, Real, Tracked, C};
use crate::params::AsiParams;
use crate::qcore::{qpoch_inf, qpoch_inf_prod, theta_prod, QContext, CONDITIONING_FLOOR};
use crate::quad::measure_sum;

use super::WFunction;

const AUX_ATTEMPTS: usize = 20;

fn check_aux<R: Real>(ctx: &QContext<R>, params: &AsiParams<R>, lam: &[C<R>; 3]) -> Result<()> {
    let (a, b) = (params.a(), params.b());
    let mut th = vec![params.t() * lam[0] * lam[1] * lam[2]];
    for i in 0..3 {
        for j in i + 1..3 {
            th.push(lam[i] * inv(lam[j]));
        }
    }
    for x in th {
        let v = abs(theta_prod(ctx, &[x])?).to_f64();
        if v < CONDITIONING_FLOOR {
            return Err(QsvError::DegenerateAuxiliary(format!("theta factor {v:e}")));
        }
    }
    for &l in lam {
        for j in 0..3 {
            if ctx.lattice_distance(a[j] * l) < ctx.genericity_threshold
                || ctx.lattice_distance(l * inv(b[j])) < ctx.genericity_threshold
            {
                return Err(QsvError::DegenerateAuxiliary("lambda on a parameter lattice".into()));
            }
        }
    }
    Ok(())
}

/// Three independent draws on `0.85 ≤ |λ| ≤ 1.15`, retried until every
/// theta denominator of the discrete measure clears the conditioning floor.
pub fn sample_k_aux<R: Real, G: Rng + ?Sized>(
    ctx: &QContext<R>,
    params: &AsiParams<R>,
    rng: &mut G,
) -> Result<[C<R>; 3]> {
    for _ in 0..AUX_ATTEMPTS {
        let lam = [(); 3].map(|_| {
            let r = (0.85f64.powi(2) + (1.15f64.powi(2) - 0.85f64.powi(2)) * rng.gen::<f64>()).sqrt();
            let phi = std::f64::consts::TAU * rng.gen::<f64>();
            C::new(R::from_f64(r * phi.cos()), R::from_f64(r * phi.sin()))
        });
        if check_aux(ctx, params, &lam).is_ok() {
            return Ok(lam);
        }
    }
    Err(QsvError::DegenerateAuxiliary(format!(
        "no conditioned auxiliary triple in {AUX_ATTEMPTS} attempts"
    )))
}

/// `Σ_x q^x ∏_j (a_jλ)_x/(qλ/b_j)_x g(λq^x)`.
fn lambda_sum<R, F>(ctx: &QContext<R>, params: &AsiParams<R>, f: &F, lam: C<R>, two_sided: bool) -> Result<Tracked<R>>
where
    R: Real,
    F: WFunction<R> + ?Sized,
{
    let (a, b) = (*params.a(), *params.b());
    let q = ctx.q();
    let bi = b.map(inv);
    let ratio = move |x: i64| -> C<R> {
        let qx = ctx.qpow(x);
        let mut r = q;
        for j in 0..3 {
            r = r * (one::<R>() - a[j] * lam * qx) / (one::<R>() - q * lam * bi[j] * qx);
        }
        r
    };
    let forward = |x: i64| Ok(ratio(x));
    let backward = |x: i64| {
        let r = ratio(x - 1);
        if r == C::new(R::zero(), R::zero()) {
            return Err(QsvError::DenominatorPole(format!("measure weight at x = {}", x - 1)));
        }
        Ok(inv(r))
    };
    let point = |x: i64| f.eval(ctx, params, lam * ctx.qpow(x));
    if two_sided {
        measure_sum(ctx, forward, Some(backward), point)
    } else {
        measure_sum(ctx, forward, None::<fn(i64) -> Result<C<R>>>, point)
    }
}

/// `X_k` for the cyclic triple `(k, i, j)`:
/// `∏(q/a·λ_k, qλ_k/b)_∞ {(λ_i/λ_j)∏θ(aλ_j, b/λ_i) − (λ_j/λ_i)∏θ(aλ_i, b/λ_j)}`.
fn x_weight<R: Real>(ctx: &QContext<R>, params: &AsiParams<R>, lk: C<R>, li: C<R>, lj: C<R>) -> Result<C<R>> {
    let (a, b) = (params.a(), params.b());
    let q = ctx.q();
    let mut p = one::<R>();
    let mut u = Vec::with_capacity(6);
    let mut v = Vec::with_capacity(6);
    for m in 0..3 {
        p = p * qpoch_inf_prod(ctx, &[q * inv(a[m] * lk), q * lk * inv(b[m])])?;
        u.extend([a[m] * lj, b[m] * inv(li)]);
        v.extend([a[m] * li, b[m] * inv(lj)]);
    }
    let br = li * inv(lj) * theta_prod(ctx, &u)? - lj * inv(li) * theta_prod(ctx, &v)?;
    Ok(p * br)
}

/// `K(f)` as the three-point bilateral discrete measure. No balancing is
/// imposed on the auxiliary points.
pub fn k_discrete<R, F>(ctx: &QContext<R>, params: &AsiParams<R>, f: &F, lam: [C<R>; 3]) -> Result<Tracked<R>>
where
    R: Real,
    F: WFunction<R> + ?Sized,
{
    check_aux(ctx, params, &lam)?;
    let (a, b) = (params.a(), params.b());
    let q = ctx.q();
    let l123 = lam[0] * lam[1] * lam[2];
    let mut den = qpoch_inf(ctx, q)? * theta_prod(ctx, &[params.t() * l123])?;
    for &x in a {
        for &y in b {
            den = den * qpoch_inf(ctx, q * inv(x * y))?;
        }
    }
    for i in 0..3 {
        for j in i + 1..3 {
            den = den * lam[j] * theta_prod(ctx, &[lam[i] * inv(lam[j])])?;
        }
    }
    let c = l123 / den;
    let mut total = Tracked::exact(C::new(R::zero(), R::zero()));
    for (k, i, j) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        let xk = x_weight(ctx, params, lam[k], lam[i], lam[j])?;
        total = total.add(lambda_sum(ctx, params, f, lam[k], true)?.scale(c * xk));
    }
    Ok(total)
}

/// `K(f)` from the one-sided sums at `b₁` and `b₂`. Needs `f` free of poles
/// on the `b₁` and `b₂` ladders.
pub fn k_discrete_special<R, F>(ctx: &QContext<R>, params: &AsiParams<R>, f: &F) -> Result<Tracked<R>>
where
    R: Real,
    F: WFunction<R> + ?Sized,
{
    let poles = f.pole_orders();
    if poles.b[0] != 0 || poles.b[1] != 0 {
        return Err(QsvError::PoleConditionViolated(format!(
            "pole orders at b1, b2: {}, {}",
            poles.b[0], poles.b[1]
        )));
    }
    let (a, b) = (params.a(), params.b());
    let q = ctx.q();
    let mut den = b[0] * theta_prod(ctx, &[b[1] * inv(b[0])])?;
    for &aj in a {
        den = den * qpoch_inf(ctx, q * inv(aj * b[2]))?;
    }
    let half = |u: C<R>, v: C<R>| -> Result<Tracked<R>> {
        let w = u * qpoch_inf_prod(ctx, &[q * u * inv(v), q * u * inv(b[2]), a[0] * v, a[1] * v, a[2] * v])?;
        Ok(lambda_sum(ctx, params, f, u, false)?.scale(w / den))
    };
    Ok(half(b[0], b[1])?.sub(half(b[1], b[0])?))
}
