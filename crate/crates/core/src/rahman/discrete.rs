use rand::Rng;

use crate::error::{QsvError, Result};
use crate::numeric::{abs, inv, one, Real, Tracked, C};
use crate::params::RahmanParams;
use crate::qcore::{qpoch_inf, qpoch_inf_prod, rahman_bracket, theta_prod, QContext, CONDITIONING_FLOOR};
use crate::quad::measure_sum;

use super::{VElement, VFunction};

/// Auxiliary points `λ, μ` of the two-point discrete measure.
#[derive(Clone, Copy, Debug)]
pub struct AuxPair<R: Real> {
    pub lam: C<R>,
    pub mu: C<R>,
}

const AUX_ATTEMPTS: usize = 20;

fn uniform_annulus<R: Real, G: Rng + ?Sized>(rng: &mut G, lo: f64, hi: f64) -> C<R> {
    // uniform in area
    let r = (lo * lo + (hi * hi - lo * lo) * rng.gen::<f64>()).sqrt();
    let phi = std::f64::consts::TAU * rng.gen::<f64>();
    C::new(R::from_f64(r * phi.cos()), R::from_f64(r * phi.sin()))
}

/// Checks everything the discrete measure at `(λ, μ)` divides by.
fn check_aux<R: Real>(ctx: &QContext<R>, b: &[C<R>; 6], lam: C<R>, mu: C<R>) -> Result<()> {
    let t = theta_prod(ctx, &[lam * lam, mu * mu, lam * mu, mu * inv(lam)])?;
    if abs(t).to_f64() < CONDITIONING_FLOOR.powi(4) {
        return Err(QsvError::DegenerateAuxiliary(format!("theta product {:e}", abs(t).to_f64())));
    }
    for (name, x) in [("lam", lam), ("mu", mu)] {
        let th = theta_prod(ctx, &[x * x])?;
        if abs(th).to_f64() < CONDITIONING_FLOOR {
            return Err(QsvError::DegenerateAuxiliary(format!("theta({name}^2) too small")));
        }
        for &bj in b {
            for v in [x * bj, x * inv(bj)] {
                if ctx.lattice_distance(v) < ctx.genericity_threshold {
                    return Err(QsvError::DegenerateAuxiliary(format!("{name} b_j^(+-1) near q^Z")));
                }
            }
        }
    }
    let th = theta_prod(ctx, &[mu * inv(lam)])?;
    if abs(th).to_f64() < CONDITIONING_FLOOR {
        return Err(QsvError::DegenerateAuxiliary("theta(mu/lam) too small".into()));
    }
    Ok(())
}

/// Largest `|A| + |M|` accepted outright for the two halves of the unit
/// measure (which sum to 1); above it the halves cancel too much.
const AUX_CANCELLATION: f64 = 64.0;

/// Draws `λ, μ` uniformly on `0.85 ≤ |·| ≤ 1.15`, retrying up to 20 times
/// until every theta denominator clears the conditioning floor and the
/// halves of the measure do not cancel badly. Falls back to the
/// best-conditioned admissible pair seen.
pub fn sample_aux<R: Real, G: Rng + ?Sized>(
    ctx: &QContext<R>,
    params: &RahmanParams<R>,
    rng: &mut G,
) -> Result<AuxPair<R>> {
    let b = params.b();
    let unit = VElement::<R>::one();
    let mut best: Option<(f64, AuxPair<R>)> = None;
    for _ in 0..AUX_ATTEMPTS {
        let lam = uniform_annulus(rng, 0.85, 1.15);
        let mu = uniform_annulus(rng, 0.85, 1.15);
        if check_aux(ctx, b, lam, mu).is_err() {
            continue;
        }
        let half = |u, v| -> Result<f64> {
            Ok(abs(half_prefactor(ctx, b, u, v)?.mul(lambda_sum(ctx, b, &unit, u, true)?).value).to_f64())
        };
        let spread = match (half(lam, mu), half(mu, lam)) {
            (Ok(x), Ok(y)) => x + y,
            _ => continue,
        };
        let pair = AuxPair { lam, mu };
        if spread <= AUX_CANCELLATION {
            return Ok(pair);
        }
        if best.as_ref().map_or(true, |(s, _)| spread < *s) {
            best = Some((spread, pair));
        }
    }
    best.map(|(_, p)| p).ok_or_else(|| {
        QsvError::DegenerateAuxiliary(format!("no conditioned auxiliary pair in {AUX_ATTEMPTS} attempts"))
    })
}

/// `(1−λ²)B(μ)∏_j(qλ^±/b_j)_∞ / ((q)_∞ θ(λ², μ², λμ, μ/λ) ∏_{i<j}(q/b_ib_j)_∞)`.
fn half_prefactor<R: Real>(ctx: &QContext<R>, b: &[C<R>; 6], lam: C<R>, mu: C<R>) -> Result<Tracked<R>> {
    let q = ctx.q();
    let li = inv(lam);
    let mut num = one::<R>() - lam * lam;
    for &bj in b {
        num = num * qpoch_inf(ctx, q * lam * inv(bj))? * qpoch_inf(ctx, q * li * inv(bj))?;
    }
    let mut den = qpoch_inf(ctx, q)? * theta_prod(ctx, &[lam * lam, mu * mu, lam * mu, mu * li])?;
    for i in 0..6 {
        for j in i + 1..6 {
            den = den * qpoch_inf(ctx, q * inv(b[i] * b[j]))?;
        }
    }
    Ok(rahman_bracket(ctx, b, mu)?.scale(num * inv(den)))
}

/// `Σ_x (1−λ²q^{2x})/(1−λ²) q^x ∏_j (λb_j)_x/(qλ/b_j)_x f(λq^x)`.
fn lambda_sum<R, F>(ctx: &QContext<R>, b: &[C<R>; 6], f: &F, lam: C<R>, two_sided: bool) -> Result<Tracked<R>>
where
    R: Real,
    F: VFunction<R> + ?Sized,
{
    let q = ctx.q();
    let l2 = lam * lam;
    let bi = b.map(inv);
    // w(x+1)/w(x)
    let ratio = move |x: i64| -> C<R> {
        let qx = ctx.qpow(x);
        let mut r = q * (one::<R>() - l2 * qx * qx * q * q) / (one::<R>() - l2 * qx * qx);
        for j in 0..6 {
            r = r * (one::<R>() - lam * b[j] * qx) / (one::<R>() - q * lam * bi[j] * qx);
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
    let point = |x: i64| f.eval(ctx, b, lam * ctx.qpow(x));
    if two_sided {
        measure_sum(ctx, forward, Some(backward), point)
    } else {
        measure_sum(ctx, forward, None::<fn(i64) -> Result<C<R>>>, point)
    }
}

/// `J(f)` as the two-point bilateral discrete measure at `(λ, μ)`. Valid on
/// all of V for generic auxiliary points.
pub fn j_discrete<R, F>(ctx: &QContext<R>, params: &RahmanParams<R>, f: &F, lam: C<R>, mu: C<R>) -> Result<Tracked<R>>
where
    R: Real,
    F: VFunction<R> + ?Sized,
{
    let b = params.b();
    check_aux(ctx, b, lam, mu)?;
    let a = half_prefactor(ctx, b, lam, mu)?.mul(lambda_sum(ctx, b, f, lam, true)?);
    let m = half_prefactor(ctx, b, mu, lam)?.mul(lambda_sum(ctx, b, f, mu, true)?);
    Ok(a.add(m))
}

/// `J(f)` from the one-sided sums at `λ = b₅`, `μ = b₆`. Needs `f` free of
/// poles on the `b₅` and `b₆` ladders.
pub fn j_discrete_special<R, F>(ctx: &QContext<R>, params: &RahmanParams<R>, f: &F) -> Result<Tracked<R>>
where
    R: Real,
    F: VFunction<R> + ?Sized,
{
    let n = f.pole_orders();
    if n[4] != 0 || n[5] != 0 {
        return Err(QsvError::PoleConditionViolated(format!(
            "pole orders n5 = {}, n6 = {}",
            n[4], n[5]
        )));
    }
    let b = params.b();
    let q = ctx.q();
    let half = |u: C<R>, v: C<R>| -> Result<Tracked<R>> {
        let mut num = one::<R>();
        for &bj in &b[..4] {
            num = num * qpoch_inf_prod(ctx, &[q * u * inv(bj), bj * v])?;
        }
        let mut den = qpoch_inf_prod(ctx, &[q * u * u, v * inv(u)])?;
        for i in 0..4 {
            for j in i + 1..4 {
                den = den * qpoch_inf(ctx, q * inv(b[i] * b[j]))?;
            }
        }
        Ok(lambda_sum(ctx, b, f, u, false)?.scale(num * inv(den)))
    };
    Ok(half(b[4], b[5])?.add(half(b[5], b[4])?))
}

#[cfg(test)]
mod tests {
    use super::super::tests::draw;
    use super::super::{j_exact, BasisIndexV, VElement};
    use super::*;
    use crate::numeric::cx;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn unit_and_basis() {
        let ctx = QContext::new(cx(0.3, 0.1)).unwrap();
        let p = draw(&ctx);
        let (lam, mu) = (cx(0.9, 0.35), cx(-0.3, 1.05));
        let v = j_discrete(&ctx, &p, &VElement::one(), lam, mu).unwrap();
        assert!((v.value - one()).norm() < 1e-11, "{:?}", v);
        for k in [[1, -1, 0, 0, 0, 0], [2, 0, -1, 0, 0, -1], [0, 1, 1, -2, 1, -1]] {
            let f = VElement::basis(BasisIndexV::new(k).unwrap());
            let d = j_discrete(&ctx, &p, &f, lam, mu).unwrap().value;
            let e = j_exact(&ctx, &p, &f).unwrap().value;
            assert!((d - e).norm() < 1e-9 * e.norm(), "{k:?}: {d} vs {e}");
            let s = j_discrete(&ctx, &p, &f, mu, lam).unwrap().value;
            assert!((d - s).norm() < 1e-12 * e.norm());
        }
    }

    #[test]
    fn special_points() {
        let ctx = QContext::new(cx(0.3, 0.1)).unwrap();
        let p = draw(&ctx);
        assert!((j_discrete_special(&ctx, &p, &VElement::one()).unwrap().value - one()).norm() < 1e-11);
        let f = VElement::basis(BasisIndexV::new([1, -2, 0, -1, 1, 1]).unwrap());
        let d = j_discrete_special(&ctx, &p, &f).unwrap().value;
        let e = j_exact(&ctx, &p, &f).unwrap().value;
        assert!((d - e).norm() < 1e-9 * e.norm(), "{d} vs {e}");
        let bad = VElement::basis(BasisIndexV::new([1, 0, 0, 0, -1, 0]).unwrap());
        assert!(matches!(
            j_discrete_special(&ctx, &p, &bad),
            Err(QsvError::PoleConditionViolated(_))
        ));
    }

    #[test]
    fn sampled_aux_is_conditioned() {
        let ctx = QContext::new(cx(0.3, 0.1)).unwrap();
        let p = draw(&ctx);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = sample_aux(&ctx, &p, &mut rng).unwrap();
        let r = abs(a.lam);
        assert!((0.85..=1.15).contains(&r));
        let v = j_discrete(&ctx, &p, &VElement::one(), a.lam, a.mu).unwrap();
        assert!((v.value - one()).norm() < 1e-11);
    }
}
