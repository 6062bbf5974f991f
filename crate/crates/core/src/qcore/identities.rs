use crate::error::{QsvError, Result};
use crate::numeric::{abs, binom2, inv, powi, Real, Tracked, C};
use crate::params::RahmanParams;
use crate::report::{Comparison, VerificationReport};

use super::{theta, theta_prod, QContext};

/// Below this |θ| an auxiliary theta denominator counts as degenerate.
pub const CONDITIONING_FLOOR: f64 = 1e-4;

/// `θ(x q^k) = (−1)^k q^{−C(k,2)} x^{−k} θ(x)`.
pub fn verify_theta_quasiperiodicity<R: Real>(
    ctx: &QContext<R>,
    x: C<R>,
    k: i64,
) -> Result<VerificationReport> {
    let lhs = theta(ctx, x * ctx.qpow(k))?;
    let sign = if k % 2 == 0 { R::one() } else { -R::one() };
    let factor = ctx.qpow(-binom2(k)) * powi(x, -k);
    let rhs = factor * theta(ctx, x)? * sign;
    Ok(Comparison::new("theta_quasiperiodicity", Tracked::exact(lhs), Tracked::exact(rhs))
        .param("x", x)
        .int_param("k", k)
        .finish(ctx.verify_tol))
}

/// `t1 − c·t2` with the magnitude of both terms recorded.
pub(crate) fn difference<R: Real>(t1: C<R>, c: C<R>, t2: C<R>) -> Tracked<R> {
    let s = c * t2;
    Tracked {
        value: t1 - s,
        magnitude: abs(t1) + abs(s),
    }
}

/// `θ(μb₁,…,μb₆) − (q/μ²) θ(μ/b₁,…,μ/b₆)`, the bracket shared by the
/// bilateral Jackson sum, the Rahman integral and its discrete forms.
pub fn rahman_bracket<R: Real>(ctx: &QContext<R>, b: &[C<R>; 6], mu: C<R>) -> Result<Tracked<R>> {
    let mi = inv(mu);
    let t1 = theta_prod(ctx, &b.map(|x| mu * x))?;
    let t2 = theta_prod(ctx, &b.map(|x| mu * inv(x)))?;
    Ok(difference(t1, ctx.q() * mi * mi, t2))
}

/// The theta-function identity reducing the bilateral Jackson sum to
/// Jackson's transformation:
/// `θ(b₁b₂,…,b₁b₅,μb₆^±) − (b₁/b₆)θ(b₂b₆,…,b₅b₆,μb₁^±)
///  = θ(b₁/b₆)/θ(μ²) · {θ(μb₁,…,μb₆) − qμ⁻²θ(μ/b₁,…,μ/b₆)}`.
pub fn verify_ftt<R: Real>(
    ctx: &QContext<R>,
    params: &RahmanParams<R>,
    mu: C<R>,
) -> Result<VerificationReport> {
    let b = params.b();
    let t_mu2 = theta(ctx, mu * mu)?;
    if abs(t_mu2).to_f64() < CONDITIONING_FLOOR {
        return Err(QsvError::DegenerateDraw(format!(
            "theta(mu^2) = {:e}",
            abs(t_mu2).to_f64()
        )));
    }
    let b1 = b[0];
    let b6 = b[5];
    let t1 = theta_prod(
        ctx,
        &[b1 * b[1], b1 * b[2], b1 * b[3], b1 * b[4], mu * b6, mu * inv(b6)],
    )?;
    let t2 = theta_prod(
        ctx,
        &[b[1] * b6, b[2] * b6, b[3] * b6, b[4] * b6, mu * b1, mu * inv(b1)],
    )?;
    let lhs = difference(t1, b1 * inv(b6), t2);
    let bracket = rahman_bracket(ctx, b, mu)?;
    let rhs = bracket.scale(theta(ctx, b1 * inv(b6))? * inv(t_mu2));
    Ok(Comparison::new("ftt", lhs, rhs)
        .params("b", b)
        .param("mu", mu)
        .finish(ctx.verify_tol))
}

/// Weierstrass' three-term relation as used for the specialised constant
/// of the non-symmetric J integral:
/// `θ(b₂λ₅,b₂λ₆,b₁b₅,b₁b₆) − θ(b₁λ₅,b₁λ₆,b₂b₅,b₂b₆)
///  = −b₂λ₆ θ(b₁/b₂, b₃b₄, λ₅/b₅, λ₅/b₆)`
/// given `b₅b₆ = λ₅λ₆` and `b₁⋯b₆ = q`.
#[allow(clippy::too_many_arguments)]
pub fn verify_weierstrass_bracket<R: Real>(
    ctx: &QContext<R>,
    b1: C<R>,
    b2: C<R>,
    b3: C<R>,
    b4: C<R>,
    lam5: C<R>,
    lam6: C<R>,
    b5: C<R>,
    b6: C<R>,
) -> Result<VerificationReport> {
    let tol = ctx.constraint_tol();
    let p = b5 * b6;
    if abs(p - lam5 * lam6) > tol * abs(p) {
        return Err(QsvError::ConstraintViolated("b5 b6 != lam5 lam6".into()));
    }
    let all = b1 * b2 * b3 * b4 * b5 * b6;
    if abs(all - ctx.q()) > tol * abs(ctx.q()) {
        return Err(QsvError::ConstraintViolated("b1...b6 != q".into()));
    }
    let t1 = theta_prod(ctx, &[b2 * lam5, b2 * lam6, b1 * b5, b1 * b6])?;
    let t2 = theta_prod(ctx, &[b1 * lam5, b1 * lam6, b2 * b5, b2 * b6])?;
    let lhs = Tracked {
        value: t1 - t2,
        magnitude: abs(t1) + abs(t2),
    };
    let rhs = -b2 * lam6 * theta_prod(ctx, &[b1 * inv(b2), b3 * b4, lam5 * inv(b5), lam5 * inv(b6)])?;
    Ok(Comparison::new("weierstrass_bracket", lhs, Tracked::exact(rhs))
        .params("b", &[b1, b2, b3, b4, b5, b6])
        .param("lam5", lam5)
        .param("lam6", lam6)
        .finish(ctx.verify_tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{cx, one, DoubleDouble};

    fn params(ctx: &QContext<f64>) -> RahmanParams<f64> {
        RahmanParams::completing(
            ctx,
            [cx(0.78, 0.2), cx(-0.55, 0.6), cx(0.3, -0.8), cx(0.7, 0.45), cx(-0.62, -0.5)],
        )
        .unwrap()
    }

    #[test]
    fn quasiperiodicity_k_zero_is_exact() {
        let ctx = QContext::<f64>::new(cx(0.3, 0.0)).unwrap();
        let r = verify_theta_quasiperiodicity(&ctx, cx(0.7, 0.2), 0).unwrap();
        assert_eq!(r.rel_residual, 0.0);
    }

    #[test]
    fn quasiperiodicity_negative_shift() {
        let ctx = QContext::<f64>::new(cx(0.3, 0.0)).unwrap();
        let r = verify_theta_quasiperiodicity(&ctx, cx(0.7, 0.2), -3).unwrap();
        assert!(r.rel_residual <= 1e-10, "{r:?}");
        let r = verify_theta_quasiperiodicity(&ctx, cx(0.7, 0.2), 1).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn ftt_at_random_and_special_mu() {
        let ctx = QContext::<f64>::new(cx(0.32, 0.08)).unwrap();
        let p = params(&ctx);
        let r = verify_ftt(&ctx, &p, cx(0.9, 0.4)).unwrap();
        assert!(r.rel_residual <= 1e-9, "{r:?}");
        let r = verify_ftt(&ctx, &p, p.b()[5]).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn ftt_rejects_degenerate_mu() {
        let ctx = QContext::<f64>::new(cx(0.32, 0.0)).unwrap();
        let p = params(&ctx);
        assert!(matches!(verify_ftt(&ctx, &p, one()), Err(QsvError::DegenerateDraw(_))));
    }

    #[test]
    fn weierstrass_generic_and_degenerate() {
        let ctx = QContext::<f64>::new(cx(0.3, 0.1)).unwrap();
        let p = params(&ctx);
        let b = *p.b();
        let lam5 = cx(0.9, -0.3);
        let lam6 = b[4] * b[5] / lam5;
        let r = verify_weierstrass_bracket(&ctx, b[0], b[1], b[2], b[3], lam5, lam6, b[4], b[5])
            .unwrap();
        assert!(r.rel_residual <= 1e-9, "{r:?}");
        let r = verify_weierstrass_bracket(&ctx, b[0], b[1], b[2], b[3], b[4], b[5], b[4], b[5])
            .unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn extended_precision_ftt() {
        let ctx = QContext::<DoubleDouble>::new(cx(0.32, 0.08)).unwrap();
        let b: [C<DoubleDouble>; 5] =
            [cx(0.78, 0.2), cx(-0.55, 0.6), cx(0.3, -0.8), cx(0.7, 0.45), cx(-0.62, -0.5)];
        let p = RahmanParams::completing(&ctx, b).unwrap();
        let r = verify_ftt(&ctx, &p, cx(0.9, 0.4)).unwrap();
        assert!(r.rel_residual <= 1e-20, "{r:?}");
    }
}
