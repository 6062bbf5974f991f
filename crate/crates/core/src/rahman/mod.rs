//! The space V of symmetric rational functions with poles on the ladders
//! `z^± ∈ b_j q^{−1}, b_j q^{−2}, …`, Rahman's functional J on it, and
//! Rahman's biorthogonal rational functions.

mod contour;
mod discrete;
mod families;

pub use contour::{VMeasure, j_contour, j_contour_brn, j_contour_nonsym, j_contour_rahman, nsj_constant, v_ladders};
pub use discrete::{j_discrete, j_discrete_special, sample_aux, AuxPair};
pub use families::{max_degree, rahman_norm, rahman_q, rahman_r, verify_rahman_biorthogonality, RahmanPair};

use crate::error::{QsvError, Result};
use crate::numeric::{abs, binom2, one, powi, zero, Real, Tracked, C};
use crate::params::RahmanParams;
use crate::qcore::{qpoch, QContext};

/// Exponents `k₁, …, k₆` with `Σ k_j = 0`, labelling the spanning function
/// `∏_j (b_j z^±)_{k_j}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct BasisIndexV {
    k: [i64; 6],
}

impl BasisIndexV {
    pub fn new(k: [i64; 6]) -> Result<Self> {
        if k.iter().sum::<i64>() != 0 {
            return Err(QsvError::InvalidIndex(format!("{k:?} does not sum to zero")));
        }
        Ok(Self { k })
    }

    pub fn zero() -> Self {
        Self { k: [0; 6] }
    }

    pub fn k(&self) -> [i64; 6] {
        self.k
    }
}

/// Anything in V that can be evaluated pointwise and reports, for each
/// `j`, the largest `m` with a pole at `z = b_j q^{−m}`.
pub trait VFunction<R: Real>: Sync {
    /// Value at `z`, a function of `(z + 1/z)/2`.
    fn eval(&self, ctx: &QContext<R>, b: &[C<R>; 6], z: C<R>) -> Result<C<R>>;
    fn pole_orders(&self) -> [i64; 6];
}

/// A finite linear combination of spanning functions.
#[derive(Clone, Debug)]
pub struct VElement<R: Real> {
    terms: Vec<(C<R>, BasisIndexV)>,
}

impl<R: Real> VElement<R> {
    pub fn one() -> Self {
        Self::basis(BasisIndexV::zero())
    }

    pub fn basis(idx: BasisIndexV) -> Self {
        Self {
            terms: vec![(one(), idx)],
        }
    }

    pub fn from_terms(terms: Vec<(C<R>, BasisIndexV)>) -> Self {
        Self { terms }
    }

    pub fn terms(&self) -> &[(C<R>, BasisIndexV)] {
        &self.terms
    }

    /// `c·self`.
    pub fn scaled(&self, c: C<R>) -> Self {
        Self {
            terms: self.terms.iter().map(|&(a, i)| (a * c, i)).collect(),
        }
    }

    /// `self + other`.
    pub fn plus(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Self { terms }
    }
}

impl<R: Real> VFunction<R> for VElement<R> {
    fn eval(&self, ctx: &QContext<R>, b: &[C<R>; 6], z: C<R>) -> Result<C<R>> {
        let mut s = zero::<R>();
        for (c, idx) in &self.terms {
            s = s + *c * basis_value(ctx, b, idx, z)?;
        }
        Ok(s)
    }

    /// `n_j = max(0, −min_terms k_j)`.
    fn pole_orders(&self) -> [i64; 6] {
        let mut n = [0i64; 6];
        for (_, idx) in &self.terms {
            for j in 0..6 {
                n[j] = n[j].max(-idx.k[j]);
            }
        }
        n
    }
}

fn basis_value<R: Real>(ctx: &QContext<R>, b: &[C<R>; 6], idx: &BasisIndexV, z: C<R>) -> Result<C<R>> {
    let zi = one::<R>() / z;
    let mut p = one::<R>();
    for j in 0..6 {
        let k = idx.k[j];
        let f = qpoch(ctx, b[j] * z, k).and_then(|u| Ok(u * qpoch(ctx, b[j] * zi, k)?));
        p = p * f.map_err(|_| QsvError::PoleHit(format!("basis factor j={} at z={:?}", j + 1, z)))?;
    }
    Ok(p)
}

/// `∏_j (b_j z)_{k_j} (b_j/z)_{k_j}`.
pub fn eval_basis_v<R: Real>(
    ctx: &QContext<R>,
    params: &RahmanParams<R>,
    idx: &BasisIndexV,
    z: C<R>,
) -> Result<C<R>> {
    basis_value(ctx, params.b(), idx, z)
}

/// `J` on one spanning function:
/// `∏_{i<j}(b_ib_j)_{k_i+k_j} / ∏_j q^{C(k_j,2)} b_j^{k_j}`.
pub fn j_basis<R: Real>(ctx: &QContext<R>, b: &[C<R>; 6], idx: &BasisIndexV) -> Result<C<R>> {
    let k = idx.k;
    let mut num = one::<R>();
    for i in 0..6 {
        for j in i + 1..6 {
            num = num
                * qpoch(ctx, b[i] * b[j], k[i] + k[j])
                    .map_err(|e| QsvError::DenominatorPole(e.to_string()))?;
        }
    }
    let mut den = one::<R>();
    for j in 0..6 {
        den = den * ctx.qpow(binom2(k[j])) * powi(b[j], k[j]);
    }
    Ok(num / den)
}

/// `J(f)` from its closed form on the spanning functions.
pub fn j_exact<R: Real>(ctx: &QContext<R>, params: &RahmanParams<R>, f: &VElement<R>) -> Result<Tracked<R>> {
    let mut value = zero::<R>();
    let mut magnitude = R::zero();
    for (c, idx) in &f.terms {
        let t = *c * j_basis(ctx, params.b(), idx)?;
        value = value + t;
        magnitude += abs(t);
    }
    Ok(Tracked { value, magnitude })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{cx, inv};

    pub(crate) fn draw(ctx: &QContext<f64>) -> RahmanParams<f64> {
        RahmanParams::completing(
            ctx,
            [cx(0.62, 0.2), cx(-0.45, 0.5), cx(0.3, -0.6), cx(0.55, 0.35), cx(-0.5, -0.4)],
        )
        .unwrap()
    }

    #[test]
    fn basis_values() {
        let ctx = QContext::new(cx(0.3, 0.1)).unwrap();
        let p = draw(&ctx);
        let z = cx(0.8, 0.5);
        assert_eq!(eval_basis_v(&ctx, &p, &BasisIndexV::zero(), z).unwrap(), one());
        let idx = BasisIndexV::new([1, -1, 0, 0, 0, 0]).unwrap();
        let v = eval_basis_v(&ctx, &p, &idx, z).unwrap();
        assert!((v - eval_basis_v(&ctx, &p, &idx, inv(z)).unwrap()).norm() < 1e-14 * v.norm());
        let b = p.b();
        let q = ctx.q();
        let direct = (one::<f64>() - b[0] * z) * (one::<f64>() - b[0] / z)
            / ((one::<f64>() - b[1] * z / q) * (one::<f64>() - b[1] / (z * q)));
        assert!((v - direct).norm() < 1e-14 * direct.norm());
        assert!(BasisIndexV::new([1, 0, 0, 0, 0, 0]).is_err());
    }

    #[test]
    fn exact_values() {
        let ctx = QContext::new(cx(0.3, 0.1)).unwrap();
        let p = draw(&ctx);
        let b = *p.b();
        let q = ctx.q();
        assert_eq!(j_exact(&ctx, &p, &VElement::one()).unwrap().value, one());
        let idx = BasisIndexV::new([1, -1, 0, 0, 0, 0]).unwrap();
        let v = j_exact(&ctx, &p, &VElement::basis(idx)).unwrap().value;
        let mut e = b[1] / (q * b[0]);
        for j in 2..6 {
            e = e * (one::<f64>() - b[0] * b[j]) / (one::<f64>() - b[1] * b[j] / q);
        }
        assert!((v - e).norm() < 1e-13 * e.norm());
        // linearity
        let g = VElement::basis(BasisIndexV::new([0, 2, -1, 0, -1, 0]).unwrap());
        let f = VElement::basis(idx).scaled(cx(0.3, -1.0)).plus(&g.scaled(cx(2.0, 0.5)));
        let lhs = j_exact(&ctx, &p, &f).unwrap().value;
        let rhs = v * cx(0.3, -1.0) + j_exact(&ctx, &p, &g).unwrap().value * cx(2.0, 0.5);
        assert!((lhs - rhs).norm() < 1e-13 * rhs.norm());
    }

    #[test]
    fn pole_orders_follow_negative_exponents() {
        let f = VElement::<f64>::basis(BasisIndexV::new([1, -2, 0, 0, 1, 0]).unwrap())
            .plus(&VElement::basis(BasisIndexV::new([-1, 0, 0, 0, 1, 0]).unwrap()));
        assert_eq!(f.pole_orders(), [1, 2, 0, 0, 0, 0]);
    }

    /// `2{θ(λb)−qλ⁻²θ(λ/b)} / ((q)_∞ θ(λ²) ∏_{i<j}(b_ib_j)_∞)`.
    fn rahman_integral_value(ctx: &QContext<f64>, b: &[C<f64>; 6], lam: C<f64>) -> C<f64> {
        use crate::qcore::{qpoch_inf, rahman_bracket, theta};
        let mut den = qpoch_inf(ctx, ctx.q()).unwrap() * theta(ctx, lam * lam).unwrap();
        for i in 0..6 {
            for j in i + 1..6 {
                den = den * qpoch_inf(ctx, b[i] * b[j]).unwrap();
            }
        }
        rahman_bracket(ctx, b, lam).unwrap().value * 2.0 / den
    }

    #[test]
    fn shifted_parameters_restate_the_closed_form() {
        // the integral of a spanning function at b is the plain integral at
        // b_j q^{k_j}, so the closed form times J(basis) must match it
        let ctx = QContext::new(cx(0.3, 0.1)).unwrap();
        let p = draw(&ctx);
        let k = [2, -1, 0, 1, -1, -1];
        let s = p.shifted(&ctx, k).unwrap();
        let lam = cx(0.7, 0.6);
        let idx = BasisIndexV::new(k).unwrap();
        let j = j_exact(&ctx, &p, &VElement::basis(idx)).unwrap().value;
        let lhs = rahman_integral_value(&ctx, p.b(), lam) * j;
        let rhs = rahman_integral_value(&ctx, s.b(), lam);
        assert!((lhs - rhs).norm() < 1e-12 * rhs.norm(), "{lhs} vs {rhs}");
    }
}
