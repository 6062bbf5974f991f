use crate::error::{QsvError, Result};
use crate::hyperg::w_tracked;
use crate::numeric::{abs, inv, one, Real, Tracked, C};
use crate::params::RahmanParams;
use crate::qcore::{qpoch, qpoch_prod, QContext};
use crate::report::{Comparison, VerificationReport};

use super::discrete::{j_discrete, AuxPair};
use super::VFunction;

/// Largest degree accepted: 12 in double precision, 24 in extended.
pub fn max_degree<R: Real>() -> usize {
    if R::epsilon().to_f64() < 1e-20 {
        24
    } else {
        12
    }
}

fn check_degree<R: Real>(n: usize) -> Result<()> {
    if n > max_degree::<R>() {
        return Err(QsvError::InvalidIndex(format!(
            "degree {n} exceeds {}",
            max_degree::<R>()
        )));
    }
    Ok(())
}

fn q_tracked<R: Real>(ctx: &QContext<R>, b: &[C<R>; 6], n: usize, z: C<R>) -> Result<Tracked<R>> {
    let q = ctx.q();
    let [b1, b2, b3, b4, b5, b6] = *b;
    let k = n as i64;
    let pole = |e: QsvError| QsvError::DenominatorPole(e.to_string());
    let num = qpoch_prod(ctx, &[b1 * b2, b1 * b3, b1 * b4, inv(b1 * b6)], k).map_err(pole)?;
    let den = qpoch(ctx, q * b1 * inv(b5), k).map_err(pole)?;
    let w = w_tracked(
        ctx,
        b1 * inv(b5),
        &[
            b1 * z,
            b1 * inv(z),
            q * inv(b2 * b5),
            q * inv(b3 * b5),
            q * inv(b4 * b5),
            ctx.qpow(k) * inv(b5 * b6),
            ctx.qpow(-k),
        ],
        q,
    )?;
    Ok(w.scale(num * inv(den)))
}

/// Rahman's `Q_n` at `z`: a prefactor times a terminating ₁₀W₉.
pub fn rahman_q<R: Real>(ctx: &QContext<R>, params: &RahmanParams<R>, n: usize, z: C<R>) -> Result<C<R>> {
    check_degree::<R>(n)?;
    Ok(q_tracked(ctx, params.b(), n, z)?.value)
}

/// `R_n`: `Q_n` with `b₅` and `b₆` exchanged.
pub fn rahman_r<R: Real>(ctx: &QContext<R>, params: &RahmanParams<R>, n: usize, z: C<R>) -> Result<C<R>> {
    check_degree::<R>(n)?;
    Ok(q_tracked(ctx, &swap56(params.b()), n, z)?.value)
}

fn swap56<R: Real>(b: &[C<R>; 6]) -> [C<R>; 6] {
    let mut s = *b;
    s.swap(4, 5);
    s
}

/// The product `Q_m R_n` as an element of V.
#[derive(Clone, Copy, Debug)]
pub struct RahmanPair {
    pub m: usize,
    pub n: usize,
}

impl<R: Real> VFunction<R> for RahmanPair {
    fn eval(&self, ctx: &QContext<R>, b: &[C<R>; 6], z: C<R>) -> Result<C<R>> {
        let qm = q_tracked(ctx, b, self.m, z)?.value;
        let rn = q_tracked(ctx, &swap56(b), self.n, z)?.value;
        Ok(qm * rn)
    }

    fn pole_orders(&self) -> [i64; 6] {
        [0, 0, 0, 0, self.m as i64, self.n as i64]
    }
}

/// `J(Q_n R_n) = (1−B/q)/(1−q^{2n−1}B) · (q)_n ∏_{i<j≤4}(b_ib_j)_n / (qⁿ(B/q)_n)`
/// with `B = b₁b₂b₃b₄`.
pub fn rahman_norm<R: Real>(ctx: &QContext<R>, params: &RahmanParams<R>, n: usize) -> Result<C<R>> {
    let b = params.b();
    let q = ctx.q();
    let k = n as i64;
    let bb = b[0] * b[1] * b[2] * b[3];
    let bq = bb * inv(q);
    let mut pairs = Vec::with_capacity(6);
    for i in 0..4 {
        for j in i + 1..4 {
            pairs.push(b[i] * b[j]);
        }
    }
    let pole = |e: QsvError| QsvError::DenominatorPole(e.to_string());
    let num = (one::<R>() - bq) * qpoch(ctx, q, k).map_err(pole)? * qpoch_prod(ctx, &pairs, k).map_err(pole)?;
    let den = (one::<R>() - ctx.qpow(2 * k - 1) * bb) * ctx.qpow(k) * qpoch(ctx, bq, k).map_err(pole)?;
    if abs(den).to_f64() == 0.0 {
        return Err(QsvError::DenominatorPole("norm denominator".into()));
    }
    Ok(num / den)
}

/// `J(Q_m R_n)` through the discrete measure at `aux` against `δ_{mn}` times
/// the norm. Off-diagonal entries are judged against the larger of the two
/// diagonal norms.
pub fn verify_rahman_biorthogonality<R: Real>(
    ctx: &QContext<R>,
    params: &RahmanParams<R>,
    m: usize,
    n: usize,
    aux: &AuxPair<R>,
) -> Result<VerificationReport> {
    check_degree::<R>(m.max(n))?;
    let lhs = j_discrete(ctx, params, &RahmanPair { m, n }, aux.lam, aux.mu)?;
    let hm = rahman_norm(ctx, params, m)?;
    let hn = rahman_norm(ctx, params, n)?;
    let rhs = if m == n { hn } else { C::new(R::zero(), R::zero()) };
    Ok(Comparison::new("rahman_biorthogonality", lhs, Tracked::exact(rhs))
        .params("b", params.b())
        .param("lam", aux.lam)
        .param("mu", aux.mu)
        .int_param("m", m as i64)
        .int_param("n", n as i64)
        .scale(abs(hm).max(abs(hn)))
        .finish(ctx.verify_tol))
}

#[cfg(test)]
mod tests {
    use super::super::tests::draw;
    use super::*;
    use crate::numeric::cx;

    #[test]
    fn degree_zero_is_one() {
        let ctx = QContext::new(cx(0.3, 0.1)).unwrap();
        let p = draw(&ctx);
        assert!((rahman_q(&ctx, &p, 0, cx(0.7, 0.2)).unwrap() - one()).norm() < 1e-15);
        assert!(rahman_q(&ctx, &p, 13, cx(0.7, 0.2)).is_err());
    }

    #[test]
    fn inversion_and_permutation_symmetry() {
        let ctx = QContext::new(cx(0.3, 0.1)).unwrap();
        let p = draw(&ctx);
        let z = cx(0.8, -0.45);
        for n in 1..5 {
            let v = rahman_q(&ctx, &p, n, z).unwrap();
            assert!((v - rahman_q(&ctx, &p, n, inv(z)).unwrap()).norm() < 1e-12 * v.norm());
            for perm in [[1, 0, 2, 3, 4, 5], [0, 2, 1, 3, 4, 5], [3, 1, 2, 0, 4, 5]] {
                let s = rahman_q(&ctx, &p.permuted(&ctx, perm).unwrap(), n, z).unwrap();
                assert!((v - s).norm() < 1e-10 * v.norm(), "n={n} {perm:?}: {v} vs {s}");
            }
        }
    }

    #[test]
    fn small_biorthogonality_matrix() {
        let ctx = QContext::new(cx(0.3, 0.1)).unwrap();
        let p = draw(&ctx);
        let aux = AuxPair {
            lam: cx(0.9, 0.35),
            mu: cx(-0.3, 1.05),
        };
        for m in 0..3 {
            for n in 0..3 {
                let r = verify_rahman_biorthogonality(&ctx, &p, m, n, &aux).unwrap();
                assert!(r.passed(), "({m},{n}): {r:?}");
            }
        }
    }
}
