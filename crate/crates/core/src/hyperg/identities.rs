use crate::error::{QsvError, Result};
use crate::numeric::{abs, inv, one, Real, Tracked, C};
use crate::params::{RahmanParams, SaalschutzParams};
use crate::qcore::{
    qpoch_inf, qpoch_inf_prod, rahman_bracket, theta, theta_prod, QContext,
    CONDITIONING_FLOOR,
};
use crate::report::{Comparison, VerificationReport};

use super::series::{phi_tracked, psi_tracked, w_tracked};

fn require_conditioned<R: Real>(what: &str, v: C<R>) -> Result<()> {
    if abs(v).to_f64() < CONDITIONING_FLOOR {
        return Err(QsvError::DegenerateDraw(format!("{what} = {:e}", abs(v).to_f64())));
    }
    Ok(())
}

/// The ₈ψ₈ of the bilateral Jackson summation,
/// `8ψ8(λq,−λq,λb₁…λb₆; λ,−λ,λq/b₁…λq/b₆; z)`.
pub fn jackson_psi<R: Real>(
    ctx: &QContext<R>,
    b: &[C<R>; 6],
    lam: C<R>,
    z: C<R>,
) -> Result<Tracked<R>> {
    let q = ctx.q();
    let mut upper = vec![lam * q, -lam * q];
    let mut lower = vec![lam, -lam];
    for &bj in b {
        upper.push(lam * bj);
        lower.push(lam * q * inv(bj));
    }
    psi_tracked(ctx, &upper, &lower, z)
}

/// `∏_j (qλ/b_j, q/(λb_j))_∞`.
fn lambda_pm_product<R: Real>(ctx: &QContext<R>, b: &[C<R>], lam: C<R>) -> Result<C<R>> {
    let q = ctx.q();
    let li = inv(lam);
    let mut p = one();
    for &bj in b {
        let bi = inv(bj);
        p = p * qpoch_inf(ctx, q * lam * bi)? * qpoch_inf(ctx, q * li * bi)?;
    }
    Ok(p)
}

/// `∏_{i<j} (c·x_i x_j)_∞` over the given index set.
fn pair_product<R: Real>(ctx: &QContext<R>, x: &[C<R>], c: C<R>, inverse: bool) -> Result<C<R>> {
    let mut p = one();
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let v = if inverse {
                c * inv(x[i] * x[j])
            } else {
                c * x[i] * x[j]
            };
            p = p * qpoch_inf(ctx, v)?;
        }
    }
    Ok(p)
}

/// One side of the bilateral Jackson sum:
/// `{θ(μb) − qμ⁻²θ(μ/b)}·(1−λ²)∏(qλ^±/b_j)_∞/θ(μ/λ) · 8ψ8(λ)`.
fn jackson_half<R: Real>(
    ctx: &QContext<R>,
    b: &[C<R>; 6],
    lam: C<R>,
    mu: C<R>,
) -> Result<Tracked<R>> {
    let bracket = rahman_bracket(ctx, b, mu)?;
    let psi = jackson_psi(ctx, b, lam, ctx.q())?;
    let t = theta(ctx, mu * inv(lam))?;
    let coef = (one::<R>() - lam * lam) * lambda_pm_product(ctx, b, lam)? * inv(t);
    Ok(bracket.mul(psi).scale(coef))
}

/// Bilateral Jackson summation: the λ-term plus idem(λ;μ) equals
/// `(q)_∞ θ(λ², μ², λμ) ∏_{i<j}(q/b_ib_j)_∞`.
pub fn verify_bilateral_jackson<R: Real>(
    ctx: &QContext<R>,
    params: &RahmanParams<R>,
    lam: C<R>,
    mu: C<R>,
) -> Result<VerificationReport> {
    let b = params.b();
    let t = theta(ctx, mu * inv(lam))?;
    require_conditioned("theta(mu/lam)", t)?;
    let lhs = jackson_half(ctx, b, lam, mu)?.add(jackson_half(ctx, b, mu, lam)?);
    let q = ctx.q();
    let rhs = qpoch_inf(ctx, q)?
        * theta_prod(ctx, &[lam * lam, mu * mu, lam * mu])?
        * pair_product(ctx, b, q, true)?;
    Ok(Comparison::new("bilateral_jackson", lhs, Tracked::exact(rhs))
        .params("b", b)
        .param("lam", lam)
        .param("mu", mu)
        .finish(ctx.verify_tol))
}

/// Nonterminating Jackson summation (two ₈W₇ series).
pub fn verify_nonterminating_jackson<R: Real>(
    ctx: &QContext<R>,
    b: &[C<R>; 6],
) -> Result<VerificationReport> {
    let q = ctx.q();
    let prod = b.iter().fold(one::<R>(), |p, &x| p * x);
    if abs(prod - q) > ctx.constraint_tol() * abs(q) {
        return Err(QsvError::ConstraintViolated("b1...b6 != q".into()));
    }
    let (b1, b6) = (b[0], b[5]);
    let w1 = w_tracked(ctx, b6 * b6, &[b1 * b6, b[1] * b6, b[2] * b6, b[3] * b6, b[4] * b6], q)?;
    let w2 = w_tracked(ctx, b1 * b1, &[b1 * b[1], b1 * b[2], b1 * b[3], b1 * b[4], b1 * b6], q)?;
    let mut c = b1 * inv(b6) * qpoch_inf_prod(ctx, &[q * b6 * b6, q * b1 * inv(b6)])?
        * inv(qpoch_inf_prod(ctx, &[q * b1 * b1, q * b6 * inv(b1)])?);
    for &bj in &b[1..5] {
        c = c * qpoch_inf_prod(ctx, &[q * b1 * inv(bj), b6 * bj])?
            * inv(qpoch_inf_prod(ctx, &[q * b6 * inv(bj), b1 * bj])?);
    }
    let lhs = w1.sub(w2.scale(c));
    let mut rhs = qpoch_inf_prod(ctx, &[q * b6 * b6, b1 * inv(b6)])? * pair_product(ctx, &b[1..5], q, true)?;
    for &bj in &b[1..5] {
        rhs = rhs * inv(qpoch_inf_prod(ctx, &[q * b6 * inv(bj), b1 * bj])?);
    }
    Ok(Comparison::new("nonterminating_jackson", lhs, Tracked::exact(rhs))
        .params("b", b)
        .finish(ctx.verify_tol))
}

/// Jackson's ₈ψ₈ transformation at `a = b₆`:
/// `(q)_∞∏_{j≤5}(qb₆^±/b_j)_∞/(qb₆²)_∞ · 8W7(b₆²; b₁b₆…b₅b₆; q)`
/// against the λ-term plus idem(λ;μ).
pub fn verify_jackson_transformation<R: Real>(
    ctx: &QContext<R>,
    params: &RahmanParams<R>,
    lam: C<R>,
    mu: C<R>,
) -> Result<VerificationReport> {
    let b = params.b();
    let q = ctx.q();
    let b6 = b[5];
    require_conditioned("theta(mu/lam)", theta(ctx, mu * inv(lam))?)?;
    // argument q²/(b₁⋯b₆), equal to q under balancing
    let z = q * q * inv(b.iter().fold(one::<R>(), |p, &x| p * x));
    let w = w_tracked(ctx, b6 * b6, &[b[0] * b6, b[1] * b6, b[2] * b6, b[3] * b6, b[4] * b6], z)?;
    let pre = qpoch_inf(ctx, q)? * lambda_pm_product(ctx, &b[..5], b6)? * inv(qpoch_inf(ctx, q * b6 * b6)?);
    let lhs = w.scale(pre);
    let half = |l: C<R>, m: C<R>| -> Result<Tracked<R>> {
        let li = inv(l);
        let num = theta_prod(ctx, &[m * b6, m * inv(b6)])? * lambda_pm_product(ctx, b, l)?;
        let den = theta_prod(ctx, &[m * l, m * li])? * qpoch_inf_prod(ctx, &[q * l * l, q * li * li])?;
        Ok(jackson_psi(ctx, b, l, z)?.scale(num * inv(den)))
    };
    let rhs = half(lam, mu)?.add(half(mu, lam)?);
    Ok(Comparison::new("jackson_transformation", lhs, rhs)
        .params("b", b)
        .param("lam", lam)
        .param("mu", mu)
        .finish(ctx.verify_tol))
}

/// `f₁, f₂, f₃` of the bilateral q-Saalschütz determinant at `λ`.
pub fn saalschutz_row<R: Real>(
    ctx: &QContext<R>,
    params: &SaalschutzParams<R>,
    lam: C<R>,
) -> Result<[Tracked<R>; 3]> {
    let (a, b) = (params.a(), params.b());
    let q = ctx.q();
    let li = inv(lam);
    let f1 = lam * theta_prod(ctx, &[b[0] * li, b[1] * li, b[2] * li])?;
    let f2 = li * theta_prod(ctx, &[a[0] * lam, a[1] * lam, a[2] * lam])?;
    let mut pre = one::<R>();
    for j in 0..3 {
        pre = pre * qpoch_inf(ctx, q * inv(a[j]) * li)? * qpoch_inf(ctx, q * lam * inv(b[j]))?;
    }
    let upper = [a[0] * lam, a[1] * lam, a[2] * lam];
    let lower = [q * lam * inv(b[0]), q * lam * inv(b[1]), q * lam * inv(b[2])];
    let f3 = if pre == C::new(R::zero(), R::zero()) {
        Tracked::exact(pre)
    } else {
        psi_tracked(ctx, &upper, &lower, q)?.scale(pre)
    };
    Ok([Tracked::exact(f1), Tracked::exact(f2), f3])
}

/// `det₃` by cofactor expansion, keeping the magnitude of the six products.
fn det3<R: Real>(m: &[[Tracked<R>; 3]; 3]) -> Tracked<R> {
    let mut value = C::new(R::zero(), R::zero());
    let mut magnitude = R::zero();
    for (p, sign) in [
        ([0, 1, 2], 1),
        ([1, 2, 0], 1),
        ([2, 0, 1], 1),
        ([0, 2, 1], -1),
        ([2, 1, 0], -1),
        ([1, 0, 2], -1),
    ] {
        let t = m[0][p[0]].mul(m[1][p[1]]).mul(m[2][p[2]]);
        if sign > 0 {
            value = value + t.value;
        } else {
            value = value - t.value;
        }
        magnitude += t.magnitude;
    }
    Tracked { value, magnitude }
}

/// Bilateral q-Saalschütz summation as a 3×3 determinant evaluation.
pub fn verify_bilateral_saalschutz<R: Real>(
    ctx: &QContext<R>,
    params: &SaalschutzParams<R>,
    lam: [C<R>; 3],
) -> Result<VerificationReport> {
    let rows = [
        saalschutz_row(ctx, params, lam[0])?,
        saalschutz_row(ctx, params, lam[1])?,
        saalschutz_row(ctx, params, lam[2])?,
    ];
    let lhs = det3(&rows);
    let (a, b) = (params.a(), params.b());
    let q = ctx.q();
    let l123 = lam[0] * lam[1] * lam[2];
    let mut rhs = qpoch_inf(ctx, q)? * theta(ctx, params.t() * l123)? * inv(l123);
    for ai in a {
        for bj in b {
            rhs = rhs * qpoch_inf(ctx, q * inv(*ai * *bj))?;
        }
    }
    for i in 0..3 {
        for j in i + 1..3 {
            rhs = rhs * lam[j] * theta(ctx, lam[i] * inv(lam[j]))?;
        }
    }
    Ok(Comparison::new("bilateral_saalschutz", lhs, Tracked::exact(rhs))
        .params("a", a)
        .params("b", b)
        .params("lam", &lam)
        .scale(lhs.magnitude * R::epsilon())
        .finish(ctx.verify_tol))
}

/// Nonterminating q-Saalschütz summation (two ₃φ₂ series).
pub fn verify_nonterminating_saalschutz<R: Real>(
    ctx: &QContext<R>,
    params: &SaalschutzParams<R>,
) -> Result<VerificationReport> {
    let (a, b) = (params.a(), params.b());
    let q = ctx.q();
    let half = |x: C<R>, y: C<R>| -> Result<Tracked<R>> {
        // x (a₁y,a₂y,a₃y, xq/b₁, xq/y)_∞ ₃φ₂(a₁x,a₂x,a₃x; xq/b₁, xq/y; q)
        let pre = x * qpoch_inf_prod(
            ctx,
            &[a[0] * y, a[1] * y, a[2] * y, x * q * inv(b[0]), x * q * inv(y)],
        )?;
        if pre == C::new(R::zero(), R::zero()) {
            return Ok(Tracked::exact(pre));
        }
        let phi = phi_tracked(
            ctx,
            &[a[0] * x, a[1] * x, a[2] * x],
            &[x * q * inv(b[0]), x * q * inv(y)],
            q,
        )?;
        Ok(phi.scale(pre))
    };
    let lhs = half(b[2], b[1])?.sub(half(b[1], b[2])?);
    let rhs = b[2]
        * theta(ctx, b[1] * inv(b[2]))?
        * qpoch_inf_prod(ctx, &[q * inv(b[0] * a[0]), q * inv(b[0] * a[1]), q * inv(b[0] * a[2])])?;
    Ok(Comparison::new("nonterminating_saalschutz", lhs, Tracked::exact(rhs))
        .params("a", a)
        .params("b", b)
        .finish(ctx.verify_tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{cx, DoubleDouble};

    fn rahman(ctx: &QContext<f64>) -> RahmanParams<f64> {
        RahmanParams::completing(
            ctx,
            [cx(0.62, 0.2), cx(-0.45, 0.5), cx(0.3, -0.6), cx(0.55, 0.35), cx(-0.5, -0.4)],
        )
        .unwrap()
    }

    fn saal(ctx: &QContext<f64>) -> SaalschutzParams<f64> {
        SaalschutzParams::completing(
            ctx,
            [cx(0.6, 0.1), cx(0.5, -0.3), cx(-0.7, 0.2)],
            [cx(0.4, 0.4), cx(0.55, -0.1)],
        )
        .unwrap()
    }

    #[test]
    fn bilateral_jackson_generic() {
        let ctx = QContext::new(cx(0.3, 0.1)).unwrap();
        let p = rahman(&ctx);
        let r = verify_bilateral_jackson(&ctx, &p, cx(0.8, 0.3), cx(-0.4, 0.9)).unwrap();
        assert!(r.rel_residual <= 1e-9, "{r:?}");
    }

    #[test]
    fn bilateral_jackson_is_symmetric_in_lambda_mu() {
        let ctx = QContext::new(cx(0.25, -0.05)).unwrap();
        let p = rahman(&ctx);
        let (l, m) = (cx(0.8, 0.3), cx(-0.4, 0.9));
        let a = verify_bilateral_jackson(&ctx, &p, l, m).unwrap();
        let b = verify_bilateral_jackson(&ctx, &p, m, l).unwrap();
        let d = (a.lhs() - b.lhs()).norm();
        assert!(d <= 1e-10 * a.lhs().norm());
    }

    #[test]
    fn bilateral_jackson_reduces_at_b6_b1() {
        // λ = b₆, μ = b₁ collapses the ₈ψ₈ pair onto two ₈W₇ series
        let ctx = QContext::new(cx(0.3, 0.1)).unwrap();
        let p = rahman(&ctx);
        let b = *p.b();
        let r = verify_bilateral_jackson(&ctx, &p, b[5], b[0]).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = verify_nonterminating_jackson(&ctx, &b).unwrap();
        assert!(r.rel_residual <= 1e-9, "{r:?}");
    }

    #[test]
    fn nonterminating_jackson_extended() {
        let ctx = QContext::<DoubleDouble>::new(cx(0.3, 0.1)).unwrap();
        let b5: [C<DoubleDouble>; 5] =
            [cx(0.62, 0.2), cx(-0.45, 0.5), cx(0.3, -0.6), cx(0.55, 0.35), cx(-0.5, -0.4)];
        let p = RahmanParams::completing(&ctx, b5).unwrap();
        let r = verify_nonterminating_jackson(&ctx, p.b()).unwrap();
        assert!(r.rel_residual <= 1e-20, "{r:?}");
    }

    #[test]
    fn jackson_transformation_generic() {
        let ctx = QContext::new(cx(0.28, 0.12)).unwrap();
        let p = rahman(&ctx);
        let r = verify_jackson_transformation(&ctx, &p, cx(0.7, -0.5), cx(0.2, 0.95)).unwrap();
        assert!(r.rel_residual <= 1e-9, "{r:?}");
    }

    #[test]
    fn bilateral_saalschutz_generic() {
        let ctx = QContext::new(cx(0.3, 0.05)).unwrap();
        let p = saal(&ctx);
        let lam = [cx(0.9, 0.2), cx(-0.5, 0.7), cx(0.3, -1.1)];
        let r = verify_bilateral_saalschutz(&ctx, &p, lam).unwrap();
        assert!(r.rel_residual <= 1e-9, "{r:?}");
    }

    #[test]
    fn bilateral_saalschutz_collapses_at_b2_b3() {
        let ctx = QContext::new(cx(0.3, 0.05)).unwrap();
        let p = saal(&ctx);
        let b = p.b();
        let r = verify_bilateral_saalschutz(&ctx, &p, [cx(0.9, 0.2), b[1], b[2]]).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn determinant_is_antisymmetric() {
        let ctx = QContext::new(cx(0.3, 0.05)).unwrap();
        let p = saal(&ctx);
        let lam = [cx(0.9, 0.2), cx(-0.5, 0.7), cx(0.3, -1.1)];
        let rows = |l: [C<f64>; 3]| {
            [
                saalschutz_row(&ctx, &p, l[0]).unwrap(),
                saalschutz_row(&ctx, &p, l[1]).unwrap(),
                saalschutz_row(&ctx, &p, l[2]).unwrap(),
            ]
        };
        let d = det3(&rows(lam)).value;
        let e = det3(&rows([lam[1], lam[0], lam[2]])).value;
        assert!(abs(d + e) <= 1e-12 * abs(d));
        let z = det3(&rows([lam[0], lam[0], lam[2]]));
        assert!(abs(z.value) <= 1e-14 * z.magnitude);
    }

    #[test]
    fn nonterminating_saalschutz_generic() {
        let ctx = QContext::new(cx(0.35, -0.1)).unwrap();
        let p = saal(&ctx);
        let r = verify_nonterminating_saalschutz(&ctx, &p).unwrap();
        assert!(r.rel_residual <= 1e-9, "{r:?}");
    }
}
