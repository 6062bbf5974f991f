use crate::error::{QsvError, Result};
use crate::numeric::{inv, one, to_c64, zero, Real, ScaledProduct, C};

use super::QContext;

/// Minimum number of factors taken before the truncation test is trusted.
const MIN_FACTORS: usize = 8;

/// `(a;q)_k` for any integer `k`.
pub fn qpoch<R: Real>(ctx: &QContext<R>, a: C<R>, k: i64) -> Result<C<R>> {
    if k == 0 {
        return Ok(one());
    }
    let q = ctx.q();
    if let Some(e) = ctx.lattice_exponent(a) {
        // factor 1 - a q^i vanishes exactly when e + i = 0
        if k > 0 && (-(k - 1)..=0).contains(&e) {
            return Ok(zero());
        }
        if k < 0 && (1..=-k).contains(&e) {
            return Err(QsvError::DivisionByVanishingFactor {
                a: format!("{}", to_c64(a)),
                k,
            });
        }
    }
    let mut p = one::<R>();
    if k > 0 {
        let mut aq = a;
        for _ in 0..k {
            p = p * (one::<R>() - aq);
            aq = aq * q;
        }
        Ok(p)
    } else {
        let qi = inv(q);
        let mut aq = a * qi;
        for _ in 0..(-k) {
            p = p * (one::<R>() - aq);
            aq = aq * qi;
        }
        if p == zero() {
            return Err(QsvError::DivisionByVanishingFactor {
                a: format!("{}", to_c64(a)),
                k,
            });
        }
        Ok(inv(p))
    }
}

/// `∏ (a_i;q)_k`.
pub fn qpoch_prod<R: Real>(ctx: &QContext<R>, a: &[C<R>], k: i64) -> Result<C<R>> {
    let mut p = one();
    for &ai in a {
        p = p * qpoch(ctx, ai, k)?;
    }
    Ok(p)
}

/// `(a;q)_∞` kept in scaled form, for arguments of very large modulus.
pub fn qpoch_inf_scaled<R: Real>(ctx: &QContext<R>, a: C<R>) -> Result<ScaledProduct<R>> {
    let mut p = ScaledProduct::one();
    if let Some(e) = ctx.lattice_exponent(a) {
        if e <= 0 {
            p.mul(zero());
            return Ok(p);
        }
    }
    let q = ctx.q();
    let tol = ctx.series_tol;
    let tol2 = tol * tol;
    let mut aq = a;
    for j in 0..ctx.max_terms {
        let m2 = aq.re * aq.re + aq.im * aq.im;
        if j >= MIN_FACTORS && m2 < tol2 {
            return Ok(p);
        }
        p.mul(one::<R>() - aq);
        aq = aq * q;
    }
    Err(QsvError::MaxTermsExceeded {
        what: "infinite product",
        max_terms: ctx.max_terms,
    })
}

/// `(a;q)_∞ = ∏_{j≥0}(1 − a q^j)`.
pub fn qpoch_inf<R: Real>(ctx: &QContext<R>, a: C<R>) -> Result<C<R>> {
    if let Some(e) = ctx.lattice_exponent(a) {
        if e <= 0 {
            return Ok(zero());
        }
    }
    let q = ctx.q();
    let tol = ctx.series_tol;
    let tol2 = tol * tol;
    let big = R::from_f64(1e100);
    let mut p = one::<R>();
    let mut aq = a;
    for j in 0..ctx.max_terms {
        let m2 = aq.re * aq.re + aq.im * aq.im;
        if j >= MIN_FACTORS && m2 < tol2 {
            return Ok(p);
        }
        p = p * (one::<R>() - aq);
        if p.re.abs() > big || p.im.abs() > big {
            return qpoch_inf_scaled(ctx, a).map(|s| s.value());
        }
        aq = aq * q;
    }
    Err(QsvError::MaxTermsExceeded {
        what: "infinite product",
        max_terms: ctx.max_terms,
    })
}

/// `∏ (a_i;q)_∞`.
pub fn qpoch_inf_prod<R: Real>(ctx: &QContext<R>, a: &[C<R>]) -> Result<C<R>> {
    let mut p = one();
    for &ai in a {
        p = p * qpoch_inf(ctx, ai)?;
    }
    Ok(p)
}

/// `θ(x) = (x;q)_∞ (q/x;q)_∞`.
pub fn theta<R: Real>(ctx: &QContext<R>, x: C<R>) -> Result<C<R>> {
    if x == zero() {
        return Err(QsvError::ZeroArgument);
    }
    Ok(qpoch_inf(ctx, x)? * qpoch_inf(ctx, ctx.q() * inv(x))?)
}

pub fn theta_scaled<R: Real>(ctx: &QContext<R>, x: C<R>) -> Result<ScaledProduct<R>> {
    if x == zero() {
        return Err(QsvError::ZeroArgument);
    }
    let mut p = qpoch_inf_scaled(ctx, x)?;
    p.mul_scaled(&qpoch_inf_scaled(ctx, ctx.q() * inv(x))?);
    Ok(p)
}

/// `θ(x_1, …, x_n) = ∏ θ(x_i)`.
pub fn theta_prod<R: Real>(ctx: &QContext<R>, x: &[C<R>]) -> Result<C<R>> {
    let mut p = one();
    for &xi in x {
        p = p * theta(ctx, xi)?;
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{abs, cx, powi, real, DoubleDouble};

    fn ctx(re: f64, im: f64) -> QContext<f64> {
        QContext::new(cx(re, im)).unwrap()
    }

    #[test]
    fn finite_orders() {
        let c = ctx(0.25, 0.0);
        assert_eq!(qpoch(&c, cx(0.7, 0.1), 0).unwrap(), one());
        let v = qpoch(&c, real(0.5), 2).unwrap();
        assert!((v.re - 0.4375).abs() < 1e-16 && v.im == 0.0);
        let a = cx(0.3, -0.4);
        let v = qpoch(&c, a, -1).unwrap();
        let expect = inv(one::<f64>() - a / c.q());
        assert!(abs(v - expect) < 1e-15);
    }

    #[test]
    fn lattice_factors_are_exact() {
        let c = ctx(0.3, 0.2);
        let q = c.q();
        // (q^{-2})_3 contains 1 - q^{-2} q^2
        assert_eq!(qpoch(&c, powi(q, -2), 3).unwrap(), zero());
        assert_ne!(qpoch(&c, powi(q, -2), 2).unwrap(), zero());
        // (q^2)_{-2} contains 1/(1 - q^2 q^{-2})
        assert!(matches!(
            qpoch(&c, q * q, -2),
            Err(QsvError::DivisionByVanishingFactor { .. })
        ));
        assert!(qpoch(&c, q * q, -1).is_ok());
        assert_eq!(qpoch_inf(&c, one()).unwrap(), zero());
        assert_eq!(qpoch_inf(&c, powi(q, -4)).unwrap(), zero());
        assert_eq!(theta(&c, q).unwrap(), zero());
    }

    #[test]
    fn infinite_product_matches_long_product() {
        let c = ctx(0.5, 0.0);
        let mut p = 1.0f64;
        let mut aq = 0.5f64;
        for _ in 0..500 {
            p *= 1.0 - aq;
            aq *= 0.5;
        }
        let v = qpoch_inf(&c, real(0.5)).unwrap();
        assert!((v.re - p).abs() < 1e-14);
        assert_eq!(qpoch_inf(&c, zero()).unwrap(), one());
    }

    #[test]
    fn theta_matches_truncated_product() {
        let c = ctx(0.2, 0.0);
        let (mut a, mut b) = (1.0f64, 1.0f64);
        let (mut x, mut y) = (0.3f64, 0.2 / 0.3);
        for _ in 0..200 {
            a *= 1.0 - x;
            b *= 1.0 - y;
            x *= 0.2;
            y *= 0.2;
        }
        let v = theta(&c, real(0.3)).unwrap();
        assert!((v.re - a * b).abs() < 1e-13);
        assert!(matches!(theta(&c, zero()), Err(QsvError::ZeroArgument)));
    }

    #[test]
    fn theta_reflection() {
        let c = ctx(0.35, -0.1);
        let x = cx(0.8, 0.45);
        let l = theta(&c, x).unwrap();
        let r = theta(&c, c.q() / x).unwrap();
        assert!(abs(l - r) < 1e-14 * abs(l));
    }

    #[test]
    fn large_arguments_do_not_overflow() {
        let c = ctx(0.5, 0.0);
        // (3·10^120)_∞ is far outside the double range; only its log is checked
        let s = qpoch_inf_scaled(&c, real(3e120)).unwrap();
        assert!(s.log2_abs().is_finite() && s.log2_abs() > 1e4);
    }

    #[test]
    fn extended_precision_product() {
        let c = QContext::<DoubleDouble>::new(cx(0.3, 0.1)).unwrap();
        let a: C<DoubleDouble> = cx(0.4, -0.2);
        let l = qpoch_inf(&c, a).unwrap();
        let r = (one::<DoubleDouble>() - a) * qpoch_inf(&c, a * c.q()).unwrap();
        assert!(abs::<DoubleDouble>(l - r).to_f64() < 1e-29);
    }

    #[test]
    fn product_helpers() {
        let c = ctx(0.3, 0.0);
        let a = [cx(0.1, 0.2), cx(-0.4, 0.3)];
        let p = qpoch_prod(&c, &a, 3).unwrap();
        let e = qpoch(&c, a[0], 3).unwrap() * qpoch(&c, a[1], 3).unwrap();
        assert!(abs(p - e) < 1e-15);
        let t = theta_prod(&c, &a).unwrap();
        let e = theta(&c, a[0]).unwrap() * theta(&c, a[1]).unwrap();
        assert!(abs(t - e) < 1e-15 * abs(e));
        let i = qpoch_inf_prod(&c, &a).unwrap();
        let e = qpoch_inf(&c, a[0]).unwrap() * qpoch_inf(&c, a[1]).unwrap();
        assert!(abs(i - e) < 1e-15);
    }
}
