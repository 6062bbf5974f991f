use crate::alsalam::{family_norm, FamilyPair, KFamily};
use crate::error::{QsvError, Result};
use crate::numeric::{abs, Real, Tracked, C};
use crate::qcore::QContext;
use crate::rahman::{rahman_norm, RahmanPair};
use crate::report::{Comparison, VerificationReport};

use super::{gi_rhs, sp_rhs, sum_integral_v, sum_integral_w, IndexParamsGi, IndexParamsSp};

const MAX_INDEX_V: usize = 4;
const MAX_INDEX_W: usize = 3;

fn check_indices(idx: &[usize], max: usize) -> Result<()> {
    if idx.iter().any(|&k| k > max) {
        return Err(QsvError::InvalidIndex(format!("indices {idx:?} exceed {max}")));
    }
    Ok(())
}

fn delta<R: Real>(a: usize, b: usize, v: C<R>) -> C<R> {
    if a == b {
        v
    } else {
        C::new(R::zero(), R::zero())
    }
}

/// Sum-integral of `Q_{n₁}R_{m₁}` on `b` against `Q_{n₂}R_{m₂}` on the
/// permuted shifted parameters `c_j = (b q^N)_{perm(j)}`.
pub fn verify_two_index_biorthogonality<R: Real>(
    ctx: &QContext<R>,
    p: &IndexParamsGi<R>,
    perm: [usize; 6],
    n1: usize,
    m1: usize,
    n2: usize,
    m2: usize,
) -> Result<VerificationReport> {
    check_indices(&[n1, m1, n2, m2], MAX_INDEX_V)?;
    let c = p.shifted(ctx)?.permuted(ctx, perm)?;
    let f = RahmanPair { m: n1, n: m1 };
    let g = RahmanPair { m: n2, n: m2 };
    let lhs = sum_integral_v(ctx, p, &f, &g, &c)?;
    let pre = gi_rhs(ctx, p)?;
    let (hn1, hm1) = (rahman_norm(ctx, p.b(), n1)?, rahman_norm(ctx, p.b(), m1)?);
    let (hn2, hm2) = (rahman_norm(ctx, &c, n2)?, rahman_norm(ctx, &c, m2)?);
    let rhs = delta(n1, m1, delta(n2, m2, pre * hn1 * hn2));
    let scale = abs(pre) * abs(hn1).max(abs(hm1)) * abs(hn2).max(abs(hm2));
    Ok(Comparison::new("two_index_v", lhs, Tracked::exact(rhs))
        .params("b", p.b().b())
        .params("N", &p.n().map(|k| C::new(R::from_i64(k), R::zero())))
        .params("perm", &perm.map(|k| C::new(R::from_i64(k as i64), R::zero())))
        .int_param("n1", n1 as i64)
        .int_param("m1", m1 as i64)
        .int_param("n2", n2 as i64)
        .int_param("m2", m2 as i64)
        .scale(scale)
        .finish(ctx.verify_tol))
}

/// Sum-integral of the pair `family_f(m₁, n₁)` on `(a, b)` against
/// `family_g(m₂, n₂)` on `(aq^M, bq^N)`.
#[allow(clippy::too_many_arguments)]
pub fn verify_two_index_biorthogonality_w<R: Real>(
    ctx: &QContext<R>,
    p: &IndexParamsSp<R>,
    family_f: KFamily,
    family_g: KFamily,
    m1: usize,
    n1: usize,
    m2: usize,
    n2: usize,
) -> Result<VerificationReport> {
    check_indices(&[m1, n1, m2, n2], MAX_INDEX_W)?;
    let primed = p.shifted(ctx)?;
    let f = FamilyPair { family: family_f, m: m1, n: n1 };
    let g = FamilyPair { family: family_g, m: m2, n: n2 };
    let lhs = sum_integral_w(ctx, p, &f, &g, &primed)?;
    let pre = sp_rhs(ctx, p)?;
    let (hm1, hn1) = (family_norm(ctx, p.params(), family_f, m1)?, family_norm(ctx, p.params(), family_f, n1)?);
    let (hm2, hn2) = (family_norm(ctx, &primed, family_g, m2)?, family_norm(ctx, &primed, family_g, n2)?);
    let rhs = delta(m1, n1, delta(m2, n2, pre * hn1 * hn2));
    let scale = abs(pre) * abs(hm1).max(abs(hn1)) * abs(hm2).max(abs(hn2));
    Ok(super::sp_comparison("two_index_w", p, lhs, Tracked::exact(rhs))
        .int_param("m1", m1 as i64)
        .int_param("n1", n1 as i64)
        .int_param("m2", m2 as i64)
        .int_param("n2", n2 as i64)
        .scale(scale)
        .finish(ctx.verify_tol))
}

#[cfg(test)]
mod tests {
    use super::super::tests::{gi_draw, sp_draw};
    use super::*;
    use crate::numeric::cx;

    #[test]
    fn v_level_systems() {
        let ctx = QContext::new(cx(0.3, 0.1)).unwrap();
        let p = gi_draw(&ctx, [1, 0, 0, -1, 0, 0]);
        // c5, c6 kept, one swapped in, both swapped in
        for perm in [[0, 1, 2, 3, 4, 5], [0, 1, 2, 5, 4, 3], [4, 5, 2, 3, 0, 1]] {
            for (n1, m1, n2, m2) in [(0, 0, 0, 0), (1, 0, 0, 0), (1, 1, 0, 1), (1, 1, 1, 1)] {
                let r = verify_two_index_biorthogonality(&ctx, &p, perm, n1, m1, n2, m2).unwrap();
                assert!(r.passed() && r.rel_residual < 1e-7, "{perm:?} {n1}{m1}{n2}{m2}: {r:?}");
            }
        }
    }

    #[test]
    fn w_level_systems() {
        let ctx = QContext::new(cx(0.3, 0.1)).unwrap();
        let p = sp_draw(&ctx, [1, -1, 0], [0, 1, -1]);
        for (ff, fg, idx) in [
            (KFamily::Qr, KFamily::Qr, (0, 0, 0, 0)),
            (KFamily::St, KFamily::Qr, (1, 1, 0, 0)),
            (KFamily::QtRt, KFamily::St, (1, 0, 1, 1)),
            (KFamily::St, KFamily::QtRt, (1, 1, 1, 1)),
        ] {
            let r = verify_two_index_biorthogonality_w(&ctx, &p, ff, fg, idx.0, idx.1, idx.2, idx.3).unwrap();
            assert!(r.passed() && r.rel_residual < 1e-7, "{ff:?} {fg:?} {idx:?}: {r:?}");
        }
        assert!(matches!(
            verify_two_index_biorthogonality_w(&ctx, &p, KFamily::Qr, KFamily::Qr, 4, 0, 0, 0),
            Err(QsvError::InvalidIndex(_))
        ));
    }
}
