use crate::error::{QsvError, Result};
use crate::hyperg::phi_tracked;
use crate::numeric::{abs, inv, one, powi, Real, Tracked, C};
use crate::params::AsiParams;
use crate::qcore::{qpoch, qpoch_prod, QContext};
use crate::rahman::max_degree;
use crate::report::{Comparison, VerificationReport};

use super::discrete::k_discrete;
use super::{WFunction, WPoles};

/// The three biorthogonal pairs on W.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KFamily {
    /// `(q_m, r_n)`, poles on the `a₂` and `a₃` ladders.
    Qr,
    /// `(q̃_m, r̃_n)`, poles on the `b₂` and `b₃` ladders.
    QtRt,
    /// `(s_m, t_n)`, poles on the `a₃` and `b₃` ladders.
    St,
}

fn check_degree<R: Real>(n: usize) -> Result<()> {
    if n > max_degree::<R>() {
        return Err(QsvError::InvalidIndex(format!("degree {n} exceeds {}", max_degree::<R>())));
    }
    Ok(())
}

fn pole(e: QsvError) -> QsvError {
    QsvError::DenominatorPole(e.to_string())
}

/// `pre · ₄φ₃(q^{−n}, u₁, u₂, u₃; l₁, l₂, l₃; q, q)`.
fn phi43<R: Real>(ctx: &QContext<R>, n: usize, pre: C<R>, u: [C<R>; 3], l: [C<R>; 3]) -> Result<Tracked<R>> {
    let upper = [ctx.qpow(-(n as i64)), u[0], u[1], u[2]];
    Ok(phi_tracked(ctx, &upper, &l, ctx.q())?.scale(pre))
}

fn q_core<R: Real>(ctx: &QContext<R>, a: &[C<R>; 3], b: &[C<R>; 3], n: usize, z: C<R>) -> Result<Tracked<R>> {
    let q = ctx.q();
    let k = n as i64;
    let pre = qpoch_prod(ctx, &[a[0] * b[0], inv(a[2] * b[0])], k).map_err(pole)?;
    phi43(
        ctx,
        n,
        pre,
        [q * inv(a[1] * b[1]), q * inv(a[1] * b[2]), b[0] * inv(z)],
        [a[0] * b[0], ctx.qpow(1 - k) * a[2] * b[0], q * inv(a[1] * z)],
    )
}

fn qt_core<R: Real>(ctx: &QContext<R>, a: &[C<R>; 3], b: &[C<R>; 3], n: usize, z: C<R>) -> Result<Tracked<R>> {
    let q = ctx.q();
    let k = n as i64;
    let pre = qpoch_prod(ctx, &[a[0] * b[0], inv(a[0] * b[2])], k).map_err(pole)?;
    phi43(
        ctx,
        n,
        pre,
        [q * inv(a[1] * b[1]), q * inv(a[2] * b[1]), a[0] * z],
        [a[0] * b[0], ctx.qpow(1 - k) * a[0] * b[2], q * z * inv(b[1])],
    )
}

fn s_core<R: Real>(ctx: &QContext<R>, a: &[C<R>; 3], b: &[C<R>; 3], n: usize, z: C<R>) -> Result<Tracked<R>> {
    let q = ctx.q();
    let k = n as i64;
    let pre = qpoch_prod(ctx, &[a[0] * b[0], a[1] * b[0]], k).map_err(pole)? * powi(inv(b[0] * b[2]), k);
    phi43(
        ctx,
        n,
        pre,
        [q * inv(a[2] * b[1]), ctx.qpow(k) * inv(a[2] * b[2]), b[0] * inv(z)],
        [a[0] * b[0], a[1] * b[0], q * inv(a[2] * z)],
    )
}

fn t_core<R: Real>(ctx: &QContext<R>, a: &[C<R>; 3], b: &[C<R>; 3], n: usize, z: C<R>) -> Result<Tracked<R>> {
    let q = ctx.q();
    let k = n as i64;
    let pre = powi(a[1] * b[2] * inv(q), k) * qpoch_prod(ctx, &[a[0] * b[0], a[0] * b[1]], k).map_err(pole)?;
    phi43(
        ctx,
        n,
        pre,
        [q * inv(a[1] * b[2]), ctx.qpow(k) * inv(a[2] * b[2]), a[0] * z],
        [a[0] * b[0], a[0] * b[1], q * z * inv(b[2])],
    )
}

fn swap<R: Real>(x: &[C<R>; 3]) -> [C<R>; 3] {
    [x[0], x[2], x[1]]
}

/// `q_n(z) = (a₁b₁, 1/a₃b₁)_n ₄φ₃(q^{−n}, q/a₂b₂, q/a₂b₃, b₁/z; a₁b₁, q^{1−n}a₃b₁, q/a₂z; q, q)`.
pub fn family_q<R: Real>(ctx: &QContext<R>, params: &AsiParams<R>, n: usize, z: C<R>) -> Result<C<R>> {
    check_degree::<R>(n)?;
    Ok(q_core(ctx, params.a(), params.b(), n, z)?.value)
}

/// `r_n`: `q_n` with `a₂` and `a₃` exchanged.
pub fn family_r<R: Real>(ctx: &QContext<R>, params: &AsiParams<R>, n: usize, z: C<R>) -> Result<C<R>> {
    check_degree::<R>(n)?;
    Ok(q_core(ctx, &swap(params.a()), params.b(), n, z)?.value)
}

/// `q̃_n(z) = (a₁b₁, 1/a₁b₃)_n ₄φ₃(q^{−n}, q/a₂b₂, q/a₃b₂, a₁z; a₁b₁, q^{1−n}a₁b₃, qz/b₂; q, q)`.
pub fn family_qt<R: Real>(ctx: &QContext<R>, params: &AsiParams<R>, n: usize, z: C<R>) -> Result<C<R>> {
    check_degree::<R>(n)?;
    Ok(qt_core(ctx, params.a(), params.b(), n, z)?.value)
}

/// `r̃_n`: `q̃_n` with `b₂` and `b₃` exchanged.
pub fn family_rt<R: Real>(ctx: &QContext<R>, params: &AsiParams<R>, n: usize, z: C<R>) -> Result<C<R>> {
    check_degree::<R>(n)?;
    Ok(qt_core(ctx, params.a(), &swap(params.b()), n, z)?.value)
}

/// `s_n(z) = (a₁b₁, a₂b₁)_n (b₁b₃)^{−n} ₄φ₃(q^{−n}, q/a₃b₂, qⁿ/a₃b₃, b₁/z; a₁b₁, a₂b₁, q/a₃z; q, q)`.
pub fn family_s<R: Real>(ctx: &QContext<R>, params: &AsiParams<R>, n: usize, z: C<R>) -> Result<C<R>> {
    check_degree::<R>(n)?;
    Ok(s_core(ctx, params.a(), params.b(), n, z)?.value)
}

/// `t_n(z) = (a₂b₃/q)ⁿ (a₁b₁, a₁b₂)_n ₄φ₃(q^{−n}, q/a₂b₃, qⁿ/a₃b₃, a₁z; a₁b₁, a₁b₂, qz/b₃; q, q)`.
pub fn family_t<R: Real>(ctx: &QContext<R>, params: &AsiParams<R>, n: usize, z: C<R>) -> Result<C<R>> {
    check_degree::<R>(n)?;
    Ok(t_core(ctx, params.a(), params.b(), n, z)?.value)
}

/// The product of the `m`-th left and `n`-th right member of a family.
#[derive(Clone, Copy, Debug)]
pub struct FamilyPair {
    pub family: KFamily,
    pub m: usize,
    pub n: usize,
}

impl<R: Real> WFunction<R> for FamilyPair {
    fn eval(&self, ctx: &QContext<R>, params: &AsiParams<R>, z: C<R>) -> Result<C<R>> {
        let (a, b) = (params.a(), params.b());
        let (l, r) = match self.family {
            KFamily::Qr => (q_core(ctx, a, b, self.m, z)?, q_core(ctx, &swap(a), b, self.n, z)?),
            KFamily::QtRt => (qt_core(ctx, a, b, self.m, z)?, qt_core(ctx, a, &swap(b), self.n, z)?),
            KFamily::St => (s_core(ctx, a, b, self.m, z)?, t_core(ctx, a, b, self.n, z)?),
        };
        Ok(l.value * r.value)
    }

    fn pole_orders(&self) -> WPoles {
        let (m, n) = (self.m as i64, self.n as i64);
        match self.family {
            KFamily::Qr => WPoles {
                a: [0, m, n],
                b: [0; 3],
            },
            KFamily::QtRt => WPoles {
                a: [0; 3],
                b: [0, m, n],
            },
            KFamily::St => WPoles {
                a: [0, 0, m],
                b: [0, 0, n],
            },
        }
    }
}

/// The diagonal value `K(left_n · right_n)`.
pub fn family_norm<R: Real>(ctx: &QContext<R>, params: &AsiParams<R>, family: KFamily, n: usize) -> Result<C<R>> {
    let (a, b) = (params.a(), params.b());
    let q = ctx.q();
    let k = n as i64;
    match family {
        KFamily::Qr => Ok(ctx.qpow(-k) * qpoch_prod(ctx, &[q, a[0] * b[0], a[0] * b[1], a[0] * b[2]], k).map_err(pole)?),
        KFamily::QtRt => {
            Ok(ctx.qpow(-k) * qpoch_prod(ctx, &[q, a[0] * b[0], a[1] * b[0], a[2] * b[0]], k).map_err(pole)?)
        }
        KFamily::St => {
            let p = a[0] * a[1] * b[0] * b[1];
            let pq = p * inv(q);
            let num = powi(a[0] * a[1] * inv(q), k)
                * (one::<R>() - pq)
                * qpoch(ctx, q, k).map_err(pole)?
                * qpoch_prod(ctx, &[a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]], k).map_err(pole)?;
            let den = (one::<R>() - ctx.qpow(2 * k - 1) * p) * qpoch(ctx, pq, k).map_err(pole)?;
            if abs(den).to_f64() == 0.0 {
                return Err(QsvError::DenominatorPole("norm denominator".into()));
            }
            Ok(num / den)
        }
    }
}

/// `K(left_m · right_n)` through the discrete measure at `lam` against
/// `δ_{mn}` times the family's norm.
pub fn verify_k_biorthogonality<R: Real>(
    ctx: &QContext<R>,
    params: &AsiParams<R>,
    family: KFamily,
    m: usize,
    n: usize,
    lam: [C<R>; 3],
) -> Result<VerificationReport> {
    check_degree::<R>(m.max(n))?;
    let lhs = k_discrete(ctx, params, &FamilyPair { family, m, n }, lam)?;
    let hm = family_norm(ctx, params, family, m)?;
    let hn = family_norm(ctx, params, family, n)?;
    let rhs = if m == n { hn } else { C::new(R::zero(), R::zero()) };
    let name = match family {
        KFamily::Qr => "k_biorthogonality_qr",
        KFamily::QtRt => "k_biorthogonality_qtrt",
        KFamily::St => "k_biorthogonality_st",
    };
    Ok(Comparison::new(name, lhs, Tracked::exact(rhs))
        .params("a", params.a())
        .params("b", params.b())
        .params("lam", &lam)
        .int_param("m", m as i64)
        .int_param("n", n as i64)
        .scale(abs(hm).max(abs(hn)))
        .finish(ctx.verify_tol))
}
