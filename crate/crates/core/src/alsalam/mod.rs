//! The space W of rational functions with simple poles on `a_j⁻¹q^{ℤ>0}` and
//! `b_j q^{ℤ<0}`, the Al-Salam–Ismail functional K on it, and the three
//! biorthogonal families that live there.

mod contour;
mod discrete;
mod families;

pub use contour::{k_contour, k_contour_special, verify_gasper, verify_sgl, w_ladders, KVariant};
pub use discrete::{k_discrete, k_discrete_special, sample_k_aux};
pub use families::{
    family_norm, family_q, family_qt, family_r, family_rt, family_s, family_t, verify_k_biorthogonality,
    FamilyPair, KFamily,
};

use crate::error::{QsvError, Result};
use crate::numeric::{abs, binom2, inv, one, powi, zero, Real, Tracked, C};
use crate::params::{AsiParams, RahmanParams};
use crate::qcore::{qpoch, QContext};
use crate::rahman::{j_basis, BasisIndexV};
use crate::report::{Comparison, VerificationReport};

/// Exponents `(k, l)` with `k₁+k₂+k₃ = T = −(l₁+l₂+l₃)`, labelling
/// `g(z) = z^{−T} ∏_j (a_j z)_{k_j} (b_j/z)_{l_j}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisIndexW {
    k: [i64; 3],
    l: [i64; 3],
}

impl BasisIndexW {
    pub fn new(k: [i64; 3], l: [i64; 3]) -> Result<Self> {
        let t: i64 = k.iter().sum();
        if t != -l.iter().sum::<i64>() {
            return Err(QsvError::InvalidIndex(format!("k = {k:?} and l = {l:?} do not balance")));
        }
        Ok(Self { k, l })
    }

    pub fn zero() -> Self {
        Self { k: [0; 3], l: [0; 3] }
    }

    pub fn k(&self) -> [i64; 3] {
        self.k
    }

    pub fn l(&self) -> [i64; 3] {
        self.l
    }

    pub fn t(&self) -> i64 {
        self.k.iter().sum()
    }

    /// The index of `g(1/z)` once the roles of `a` and `b` are exchanged.
    pub fn reflected(&self) -> Self {
        Self { k: self.l, l: self.k }
    }
}

/// Pole orders on the W ladders: `a[j]` poles at `z = a_j⁻¹q^i`,
/// `b[j]` poles at `z = b_j q^{−i}`, for `1 ≤ i ≤` the order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WPoles {
    pub a: [i64; 3],
    pub b: [i64; 3],
}

/// Anything in W that can be evaluated pointwise.
pub trait WFunction<R: Real>: Sync {
    fn eval(&self, ctx: &QContext<R>, params: &AsiParams<R>, z: C<R>) -> Result<C<R>>;
    fn pole_orders(&self) -> WPoles;
}

/// A finite linear combination of spanning functions of W.
#[derive(Clone, Debug)]
pub struct WElement<R: Real> {
    terms: Vec<(C<R>, BasisIndexW)>,
}

impl<R: Real> WElement<R> {
    pub fn one() -> Self {
        Self::basis(BasisIndexW::zero())
    }

    pub fn basis(idx: BasisIndexW) -> Self {
        Self {
            terms: vec![(one(), idx)],
        }
    }

    pub fn from_terms(terms: Vec<(C<R>, BasisIndexW)>) -> Self {
        Self { terms }
    }

    pub fn terms(&self) -> &[(C<R>, BasisIndexW)] {
        &self.terms
    }

    pub fn scaled(&self, c: C<R>) -> Self {
        Self {
            terms: self.terms.iter().map(|&(a, i)| (a * c, i)).collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self { terms }
    }

    /// `z ↦ self(1/z)` as an element of W with `a` and `b` exchanged.
    pub fn reflected(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|&(c, i)| (c, i.reflected())).collect(),
        }
    }
}

impl<R: Real> WFunction<R> for WElement<R> {
    fn eval(&self, ctx: &QContext<R>, params: &AsiParams<R>, z: C<R>) -> Result<C<R>> {
        let mut s = zero::<R>();
        for (c, idx) in &self.terms {
            s = s + *c * eval_basis_w(ctx, params, idx, z)?;
        }
        Ok(s)
    }

    fn pole_orders(&self) -> WPoles {
        let mut p = WPoles::default();
        for (_, idx) in &self.terms {
            for j in 0..3 {
                p.a[j] = p.a[j].max(-idx.k[j]);
                p.b[j] = p.b[j].max(-idx.l[j]);
            }
        }
        p
    }
}

/// `z^{−T} ∏_j (a_j z)_{k_j} (b_j/z)_{l_j}`.
pub fn eval_basis_w<R: Real>(ctx: &QContext<R>, params: &AsiParams<R>, idx: &BasisIndexW, z: C<R>) -> Result<C<R>> {
    let (a, b) = (params.a(), params.b());
    let zi = inv(z);
    let mut p = powi(z, -idx.t());
    for j in 0..3 {
        let f = qpoch(ctx, a[j] * z, idx.k[j]).and_then(|u| Ok(u * qpoch(ctx, b[j] * zi, idx.l[j])?));
        p = p * f.map_err(|_| QsvError::PoleHit(format!("basis factor j={} at z={:?}", j + 1, z)))?;
    }
    Ok(p)
}

/// `K` on one spanning function:
/// `(−t)^T q^{C(T,2)} ∏_{i,j}(a_ib_j)_{k_i+l_j} / ∏_j q^{C(k_j,2)+C(l_j,2)} a_j^{k_j} b_j^{l_j}`.
pub fn k_basis<R: Real>(ctx: &QContext<R>, params: &AsiParams<R>, idx: &BasisIndexW) -> Result<C<R>> {
    let (a, b) = (params.a(), params.b());
    let t = idx.t();
    let mut num = powi(-params.t(), t) * ctx.qpow(binom2(t));
    for i in 0..3 {
        for j in 0..3 {
            num = num
                * qpoch(ctx, a[i] * b[j], idx.k[i] + idx.l[j]).map_err(|e| QsvError::DenominatorPole(e.to_string()))?;
        }
    }
    let mut den = one::<R>();
    for j in 0..3 {
        den = den * ctx.qpow(binom2(idx.k[j]) + binom2(idx.l[j])) * powi(a[j], idx.k[j]) * powi(b[j], idx.l[j]);
    }
    Ok(num / den)
}

/// `K(f)` from its closed form on the spanning functions.
pub fn k_exact<R: Real>(ctx: &QContext<R>, params: &AsiParams<R>, f: &WElement<R>) -> Result<Tracked<R>> {
    let mut value = zero::<R>();
    let mut magnitude = R::zero();
    for (c, idx) in &f.terms {
        let t = *c * k_basis(ctx, params, idx)?;
        value = value + t;
        magnitude += abs(t);
    }
    Ok(Tracked { value, magnitude })
}

/// `K̃(g̃) = K(g)`, where `g̃(z) = g(1/z)` and `K̃` exchanges `a` and `b`.
pub fn verify_kis_symmetry<R: Real>(
    ctx: &QContext<R>,
    params: &AsiParams<R>,
    f: &WElement<R>,
) -> Result<VerificationReport> {
    let lhs = k_exact(ctx, &params.swapped(), &f.reflected())?;
    let rhs = k_exact(ctx, params, f)?;
    Ok(Comparison::new("kis_symmetry", lhs, rhs)
        .params("a", params.a())
        .params("b", params.b())
        .finish(ctx.verify_tol))
}

/// `c^{2T} J(f_c) / ((−1)^T ∏_j q^{C(k_j,2)} a_j^{k_j})` with
/// `b = (a₁/c, a₂/c, a₃/c, b₁c, b₂c, b₃c)` and `f_c` the spanning function
/// of V with exponents `(k, l)`.
pub fn scaled_rahman_value<R: Real>(ctx: &QContext<R>, params: &AsiParams<R>, idx: &BasisIndexW, c: R) -> Result<C<R>> {
    let (a, b) = (params.a(), params.b());
    let cc = C::new(c, R::zero());
    let ci = inv(cc);
    let rb = [a[0] * ci, a[1] * ci, a[2] * ci, b[0] * cc, b[1] * cc, b[2] * cc];
    let rp = RahmanParams::balanced(ctx, rb)?;
    let v = BasisIndexV::new([idx.k[0], idx.k[1], idx.k[2], idx.l[0], idx.l[1], idx.l[2]])?;
    let j = j_basis(ctx, rp.b(), &v)?;
    let t = idx.t();
    let mut norm = powi(-one::<R>(), t);
    for i in 0..3 {
        norm = norm * ctx.qpow(binom2(idx.k[i])) * powi(a[i], idx.k[i]);
    }
    Ok(j * powi(cc, 2 * t) / norm)
}

/// The J→K degeneration on one spanning function. Passes when the last gap
/// to `K(g)` is within twice what an `O(c²)` rate predicts from the first
/// gap (or already below the verification tolerance).
pub fn verify_limit_j_to_k<R: Real>(
    ctx: &QContext<R>,
    params: &AsiParams<R>,
    idx: &BasisIndexW,
    c_sequence: &[f64],
) -> Result<VerificationReport> {
    if c_sequence.len() < 2 || c_sequence.windows(2).any(|w| !(w[1] < w[0] && w[1] > 0.0)) {
        return Err(QsvError::Config("c values must be positive and decreasing".into()));
    }
    let k = k_basis(ctx, params, idx)?;
    let vals = c_sequence
        .iter()
        .map(|&c| scaled_rahman_value(ctx, params, idx, R::from_f64(c)))
        .collect::<Result<Vec<_>>>()?;
    let gaps: Vec<f64> = vals.iter().map(|&v| abs(v - k).to_f64()).collect();
    let (c0, c1) = (c_sequence[0], *c_sequence.last().unwrap());
    let kmag = abs(k).to_f64();
    let predicted = 2.0 * gaps[0] * (c1 / c0).powi(2) / kmag.max(f64::MIN_POSITIVE);
    let tol = predicted.max(ctx.verify_tol);
    let rate = if gaps.len() >= 2 && gaps[gaps.len() - 2] > 0.0 && *gaps.last().unwrap() > 0.0 {
        let n = gaps.len();
        (gaps[n - 2] / gaps[n - 1]).ln() / (c_sequence[n - 2] / c_sequence[n - 1]).ln()
    } else {
        f64::INFINITY
    };
    let last = *vals.last().unwrap();
    Ok(Comparison::new("limit_j_to_k", Tracked::exact(last), Tracked::exact(k))
        .params("a", params.a())
        .params("b", params.b())
        .param("c", C::new(R::from_f64(c1), R::zero()))
        .finish(tol)
        .with_note(format!("observed rate {rate:.3}")))
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::numeric::cx;

    pub(crate) fn draw(ctx: &QContext<f64>) -> AsiParams<f64> {
        AsiParams::completing(
            ctx,
            [cx(0.55, 0.3), cx(-0.4, 0.6), cx(0.65, -0.2)],
            [cx(0.5, -0.45), cx(-0.6, -0.3)],
        )
        .unwrap()
    }

    #[test]
    fn basis_values() {
        let ctx = QContext::new(cx(0.3, 0.1)).unwrap();
        let p = draw(&ctx);
        let z = cx(0.7, 0.4);
        assert_eq!(eval_basis_w(&ctx, &p, &BasisIndexW::zero(), z).unwrap(), one());
        let idx = BasisIndexW::new([1, 0, 0], [-1, 0, 0]).unwrap();
        let v = eval_basis_w(&ctx, &p, &idx, z).unwrap();
        let (a, b, q) = (p.a(), p.b(), ctx.q());
        let direct = (one::<f64>() - a[0] * z) / (z * (one::<f64>() - b[0] / (z * q)));
        assert!((v - direct).norm() < 1e-14 * direct.norm());
        // reflection: g(1/z) under a ↔ b
        let r = eval_basis_w(&ctx, &p.swapped(), &idx.reflected(), inv(z)).unwrap();
        assert!((r - v).norm() < 1e-14 * v.norm());
        assert!(BasisIndexW::new([1, 0, 0], [0, 0, 0]).is_err());
    }

    #[test]
    fn exact_values() {
        let ctx = QContext::new(cx(0.3, 0.1)).unwrap();
        let p = draw(&ctx);
        let (a, b, q) = (*p.a(), *p.b(), ctx.q());
        assert_eq!(k_exact(&ctx, &p, &WElement::one()).unwrap().value, one());
        let idx = BasisIndexW::new([1, 0, 0], [-1, 0, 0]).unwrap();
        let v = k_exact(&ctx, &p, &WElement::basis(idx)).unwrap().value;
        // (−t)(a₁b₂)₁(a₁b₃)₁(a₂b₁)₋₁(a₃b₁)₋₁ / (q b₁⁻¹ a₁) with C(−1,2) = 1
        let o = one::<f64>();
        let e = -p.t() * (o - a[0] * b[1]) * (o - a[0] * b[2])
            / ((o - a[1] * b[0] / q) * (o - a[2] * b[0] / q))
            * b[0]
            / (q * a[0]);
        assert!((v - e).norm() < 1e-13 * e.norm(), "{v} vs {e}");
        let g = WElement::basis(BasisIndexW::new([0, 2, -1], [-1, 1, -1]).unwrap());
        let f = WElement::basis(idx).scaled(cx(0.5, 1.0)).plus(&g.scaled(cx(-1.0, 0.2)));
        let lhs = k_exact(&ctx, &p, &f).unwrap().value;
        let rhs = v * cx(0.5, 1.0) + k_exact(&ctx, &p, &g).unwrap().value * cx(-1.0, 0.2);
        assert!((lhs - rhs).norm() < 1e-13 * rhs.norm());
    }

    #[test]
    fn kis_symmetry_holds() {
        let ctx = QContext::new(cx(0.3, 0.1)).unwrap();
        let p = draw(&ctx);
        let f = WElement::basis(BasisIndexW::new([1, -2, 0], [0, 1, 0]).unwrap())
            .plus(&WElement::basis(BasisIndexW::new([0, 1, 1], [-1, -1, 0]).unwrap()).scaled(cx(0.3, 0.7)));
        let r = verify_kis_symmetry(&ctx, &p, &f).unwrap();
        assert!(r.passed() && r.rel_residual < 1e-10, "{r:?}");
        let r = verify_kis_symmetry(&ctx, &p, &WElement::one()).unwrap();
        assert_eq!(r.abs_residual, 0.0);
    }

    #[test]
    fn degeneration_from_rahman() {
        let ctx = QContext::new(cx(0.3, 0.1)).unwrap();
        let p = draw(&ctx);
        let cs = [0.1, 0.05, 0.025];
        let r = verify_limit_j_to_k(&ctx, &p, &BasisIndexW::zero(), &cs).unwrap();
        assert!(r.passed() && r.abs_residual < 1e-14, "{r:?}");
        let idx = BasisIndexW::new([1, -1, 1], [0, -2, 1]).unwrap();
        let r = verify_limit_j_to_k(&ctx, &p, &idx, &cs).unwrap();
        assert!(r.passed(), "{r:?}");
        // halving c quarters the gap; the c² coefficient grows like 1/|a_ia_j|,
        // so the absolute check uses unit-scale a's
        let p = AsiParams::completing(
            &ctx,
            [cx(0.9, 0.2), cx(-0.7, 0.6), cx(0.8, -0.5)],
            [cx(0.5, -0.45), cx(-0.6, -0.3)],
        )
        .unwrap();
        let idx = BasisIndexW::new([1, 0, 0], [-1, 0, 0]).unwrap();
        let k = k_basis(&ctx, &p, &idx).unwrap();
        let g1 = (scaled_rahman_value(&ctx, &p, &idx, 0.05).unwrap() - k).norm();
        let g2 = (scaled_rahman_value(&ctx, &p, &idx, 0.025).unwrap() - k).norm();
        assert!(g1 < 1e-2 * k.norm(), "{}", g1 / k.norm());
        assert!((g2 / g1 - 0.25).abs() < 0.05, "{}", g2 / g1);
    }

    #[test]
    fn scaling_invariance() {
        // (z, a, b) → (cz, a/c, bc) leaves K unchanged
        let ctx = QContext::new(cx(0.3, 0.1)).unwrap();
        let p = draw(&ctx);
        let s = p.scaled(cx(1.3, -0.4));
        let f = WElement::basis(BasisIndexW::new([2, -1, 0], [0, -1, 0]).unwrap());
        let c = cx::<f64>(1.3, -0.4);
        // the rescaled spanning function at cz is c^{−T} times the original
        let t = 1;
        let lhs = k_exact(&ctx, &s, &f).unwrap().value * powi(c, t);
        let rhs = k_exact(&ctx, &p, &f).unwrap().value;
        assert!((lhs - rhs).norm() < 1e-10 * rhs.norm(), "{lhs} vs {rhs}");
        let z = cx(0.6, 0.5);
        let g1 = eval_basis_w(&ctx, &s, &f.terms()[0].1, c * z).unwrap() * powi(c, t);
        let g0 = eval_basis_w(&ctx, &p, &f.terms()[0].1, z).unwrap();
        assert!((g1 - g0).norm() < 1e-13 * g0.norm());
    }
}
