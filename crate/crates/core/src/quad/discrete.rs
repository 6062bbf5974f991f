use crate::error::{QsvError, Result};
use crate::numeric::{abs, one, zero, CompensatedSum, Real, Tracked, C};
use crate::qcore::QContext;

/// Consecutive negligible terms that end one direction of a measure sum.
const CERTIFY_RUN: usize = 8;

/// `Σ_x w(x) f(x)` for a discrete measure given through its weight ratios,
/// with `w(0) = 1`.
///
/// `forward(x)` is `w(x+1)/w(x)`; `backward(x)` is `w(x−1)/w(x)` and is
/// skipped for one-sided sums. A direction stops when eight consecutive
/// terms fall below `series_tol` times the largest term, or when the weight
/// vanishes identically.
pub fn measure_sum<R, Fw, Bw, F>(
    ctx: &QContext<R>,
    forward: Fw,
    backward: Option<Bw>,
    f: F,
) -> Result<Tracked<R>>
where
    R: Real,
    Fw: Fn(i64) -> Result<C<R>>,
    Bw: Fn(i64) -> Result<C<R>>,
    F: Fn(i64) -> Result<C<R>>,
{
    let tol = ctx.series_tol;
    let mut acc = CompensatedSum::new();
    let t0 = f(0)?;
    acc.add(t0);
    let mut big = abs(t0);
    let walk = |step: &dyn Fn(i64) -> Result<C<R>>, dir: i64, acc: &mut CompensatedSum<R>, big: &mut R| -> Result<()> {
        let mut w = one::<R>();
        let mut run = 0;
        let mut x = 0i64;
        for _ in 0..ctx.max_terms {
            w = w * step(x)?;
            x += dir;
            if w == zero() {
                return Ok(());
            }
            let t = w * f(x)?;
            acc.add(t);
            let m = abs(t);
            if m > *big {
                *big = m;
            }
            if m <= tol * *big {
                run += 1;
                if run >= CERTIFY_RUN {
                    return Ok(());
                }
            } else {
                run = 0;
            }
        }
        Err(QsvError::BilateralSumNonconvergent(x))
    };
    walk(&forward, 1, &mut acc, &mut big)?;
    if let Some(b) = backward {
        walk(&b, -1, &mut acc, &mut big)?;
    }
    Ok(acc.tracked())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::cx;

    #[test]
    fn two_sided_geometric_measure() {
        let ctx = QContext::new(cx(0.4, 0.0)).unwrap();
        let r = cx(0.5, 0.2);
        let s = measure_sum(&ctx, |_| Ok(r), Some(|_| Ok(r)), |_| Ok(one())).unwrap();
        let expect = (one::<f64>() + r) / (one::<f64>() - r);
        assert!(abs(s.value - expect) < 1e-14);
    }

    #[test]
    fn vanishing_weight_terminates() {
        let ctx = QContext::new(cx(0.4, 0.0)).unwrap();
        let s = measure_sum(
            &ctx,
            |x| Ok(if x == 2 { zero() } else { cx(2.0, 0.0) }),
            None::<fn(i64) -> Result<C<f64>>>,
            |_| Ok(one()),
        )
        .unwrap();
        assert_eq!(s.value, cx(7.0, 0.0));
    }

    #[test]
    fn growth_is_reported() {
        let ctx = QContext::new(cx(0.4, 0.0)).unwrap().with_max_terms(100).unwrap();
        let r = measure_sum(&ctx, |_| Ok(cx(1.1, 0.0)), None::<fn(i64) -> Result<C<f64>>>, |_| Ok(one()));
        assert!(matches!(r, Err(QsvError::BilateralSumNonconvergent(_))));
    }
}
