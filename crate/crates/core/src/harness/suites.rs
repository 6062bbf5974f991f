use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::alsalam::{
    k_contour, k_contour_special, k_discrete, k_discrete_special, k_exact, sample_k_aux, verify_gasper,
    verify_k_biorthogonality, verify_kis_symmetry, verify_limit_j_to_k, verify_sgl, BasisIndexW, KFamily, KVariant,
    WElement, WFunction,
};
use crate::error::{QsvError, Result};
use crate::hyperg::{
    verify_bilateral_jackson, verify_bilateral_saalschutz, verify_jackson_transformation,
    verify_nonterminating_jackson, verify_nonterminating_saalschutz,
};
use crate::indexkit::{
    sum_integral_v, sum_integral_w, verify_decoupling_v, verify_decoupling_w, verify_gi, verify_sp,
    verify_two_index_biorthogonality, verify_two_index_biorthogonality_w, IndexParamsGi, IndexParamsSp,
};
use crate::numeric::{inv, powi, Real, Tracked, C};
use crate::qcore::{verify_ftt, verify_theta_quasiperiodicity, verify_weierstrass_bracket, QContext};
use crate::rahman::{
    j_contour, j_contour_brn, j_contour_nonsym, j_contour_rahman, j_discrete, j_discrete_special, j_exact,
    sample_aux, verify_rahman_biorthogonality, BasisIndexV, VElement, VFunction,
};
use crate::report::{Comparison, VerificationReport};

use super::config::QSpec;
use super::error_report;
use super::sampling::{sample_point, sample_sextuple_with, sample_triplepair_with, Band};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Suite {
    ThetaQuasiperiodicity,
    Ftt,
    WeierstrassBracket,
    BilateralJackson,
    JacksonReduction,
    JacksonTransformation,
    BilateralSaalschutz,
    SaalschutzReduction,
    RahmanCoherence,
    RahmanBiorthogonality,
    KisSymmetry,
    KScaling,
    KCoherence,
    LimitJToK,
    KBiorthogonality(KFamily),
    Gasper,
    Sgl,
    GasperReduction,
    Gi,
    Sp,
    DecouplingV,
    DecouplingW,
    FactorizationV,
    FactorizationW,
    TwoIndexV,
    TwoIndexW,
}

/// A named suite and what one draw checks.
#[derive(Clone, Copy, Debug)]
pub struct SuiteInfo {
    pub id: &'static str,
    pub summary: &'static str,
    pub(crate) suite: Suite,
}

const fn info(id: &'static str, summary: &'static str, suite: Suite) -> SuiteInfo {
    SuiteInfo { id, summary, suite }
}

pub const SUITES: &[SuiteInfo] = &[
    info("theta_quasiperiodicity", "theta(xq^k) against its quasi-periodicity factor, |k| <= 6", Suite::ThetaQuasiperiodicity),
    info("ftt", "theta identity linking the bilateral Jackson sum to Jackson's transformation", Suite::Ftt),
    info("weierstrass_bracket", "Weierstrass three-term theta relation", Suite::WeierstrassBracket),
    info("bilateral_jackson", "bilateral 8psi8 pair summation at random lambda, mu", Suite::BilateralJackson),
    info("jackson_reduction", "bilateral Jackson at lambda = b6, mu = b1 and nonterminating Jackson", Suite::JacksonReduction),
    info("jackson_transformation", "Jackson's 8W7 transformation from the bilateral pair", Suite::JacksonTransformation),
    info("bilateral_saalschutz", "3x3 determinant form of the bilateral q-Saalschutz sum", Suite::BilateralSaalschutz),
    info("saalschutz_reduction", "bilateral q-Saalschutz at lambda2 = b2, lambda3 = b3 and nonterminating q-Saalschutz", Suite::SaalschutzReduction),
    info("rahman_coherence", "every representation of J against its closed form on a random element", Suite::RahmanCoherence),
    info("rahman_biorthogonality", "matrix of J(Q_m R_n) against the diagonal closed form", Suite::RahmanBiorthogonality),
    info("kis_symmetry", "K under the reflection z -> 1/z with a and b exchanged", Suite::KisSymmetry),
    info("k_scaling", "K under (z, a, b) -> (cz, a/c, bc)", Suite::KScaling),
    info("k_coherence", "every representation of K against its closed form on a random element", Suite::KCoherence),
    info("limit_j_to_k", "O(c^2) degeneration of the scaled Rahman functional to K", Suite::LimitJToK),
    info("k_biorthogonality_qr", "matrix of K(q_m r_n)", Suite::KBiorthogonality(KFamily::Qr)),
    info("k_biorthogonality_qtrt", "matrix of K(q~_m r~_n)", Suite::KBiorthogonality(KFamily::QtRt)),
    info("k_biorthogonality_st", "matrix of K(s_m t_n)", Suite::KBiorthogonality(KFamily::St)),
    info("gasper", "Gasper's contour integral evaluation", Suite::Gasper),
    info("sgl", "one-parameter extension of Gasper's integral", Suite::Sgl),
    info("gasper_reduction", "extension at lambda1 = q/b3 against Gasper's integrand", Suite::GasperReduction),
    info("gi", "sum-integral evaluation on the sextuple level", Suite::Gi),
    info("sp", "sum-integral evaluation on the triple-pair level", Suite::Sp),
    info("decoupling_v", "sum-integral of f g against J(f) J'(g)", Suite::DecouplingV),
    info("decoupling_w", "sum-integral of f g against K(f) K'(g)", Suite::DecouplingW),
    info("factorization_v", "LHS(f,g) LHS(1,1) against LHS(f,1) LHS(1,g), sextuple level", Suite::FactorizationV),
    info("factorization_w", "LHS(f,g) LHS(1,1) against LHS(f,1) LHS(1,g), triple-pair level", Suite::FactorizationW),
    info("two_index_v", "two-index biorthogonality on the sextuple level, cycling permutation classes", Suite::TwoIndexV),
    info("two_index_w", "two-index biorthogonality on the triple-pair level, cycling family pairings", Suite::TwoIndexW),
];

pub fn lookup(id: &str) -> Result<&'static SuiteInfo> {
    SUITES
        .iter()
        .find(|s| s.id == id)
        .ok_or_else(|| QsvError::Config(format!("unknown suite `{id}` (see --list-suites)")))
}

impl Suite {
    fn is_index(self) -> bool {
        matches!(
            self,
            Suite::Gi
                | Suite::Sp
                | Suite::DecouplingV
                | Suite::DecouplingW
                | Suite::FactorizationV
                | Suite::FactorizationW
                | Suite::TwoIndexV
                | Suite::TwoIndexW
        )
    }

    pub(crate) fn default_q(self) -> QSpec {
        if self.is_index() {
            QSpec::range(0.25, 0.4)
        } else {
            QSpec::range(0.2, 0.5)
        }
    }

    fn default_max_index(self) -> usize {
        match self {
            Suite::TwoIndexV | Suite::TwoIndexW => 2,
            _ => 3,
        }
    }
}

/// Parameter-level knobs shared by every draw of a run.
pub(crate) struct DrawSpec {
    pub suite: Suite,
    pub index: u64,
    pub max_index: Option<usize>,
}

const AUX: Band = Band { lo: 0.85, hi: 1.15 };
const COEFF: Band = Band { lo: 0.5, hi: 1.5 };

fn param_band<R: Real>(ctx: &QContext<R>, suite: Suite) -> Band {
    if suite.is_index() {
        Band::sixth_root_pm(ctx.abs_q(), 0.05)
    } else {
        Band::around_sixth_root(ctx.abs_q(), 0.1)
    }
}

/// Integers in `[−w, w]` summing to zero, by drawing all but the last.
fn zero_sum<const N: usize>(rng: &mut ChaCha8Rng, w: i64) -> [i64; N] {
    loop {
        let mut k = [0i64; N];
        for x in k.iter_mut().take(N - 1) {
            *x = rng.gen_range(-w..=w);
        }
        k[N - 1] = -k[..N - 1].iter().sum::<i64>();
        if k[N - 1].abs() <= w {
            return k;
        }
    }
}

fn nontrivial_zero_sum<const N: usize>(rng: &mut ChaCha8Rng, w: i64) -> [i64; N] {
    loop {
        let k = zero_sum::<N>(rng, w);
        if k.iter().any(|&x| x != 0) {
            return k;
        }
    }
}

fn v_index(rng: &mut ChaCha8Rng, w: i64) -> BasisIndexV {
    BasisIndexV::new(nontrivial_zero_sum::<6>(rng, w)).expect("zero-sum index")
}

fn w_index(rng: &mut ChaCha8Rng, w: i64) -> BasisIndexW {
    let kl = nontrivial_zero_sum::<6>(rng, w);
    BasisIndexW::new([kl[0], kl[1], kl[2]], [kl[3], kl[4], kl[5]]).expect("balanced index")
}

fn v_element<R: Real>(rng: &mut ChaCha8Rng) -> VElement<R> {
    let n = rng.gen_range(1..=2);
    VElement::from_terms((0..n).map(|_| (sample_point(rng, COEFF), v_index(rng, 2))).collect())
}

fn w_element<R: Real>(rng: &mut ChaCha8Rng) -> WElement<R> {
    let n = rng.gen_range(1..=2);
    WElement::from_terms((0..n).map(|_| (sample_point(rng, COEFF), w_index(rng, 2))).collect())
}

/// A report comparing one representation against the closed form, or the
/// classified failure of that representation.
fn versus<R: Real>(ctx: &QContext<R>, id: &str, exact: &Tracked<R>, other: Result<Tracked<R>>) -> Result<VerificationReport> {
    match other {
        Ok(v) => Ok(Comparison::new(id, v, *exact).finish(ctx.verify_tol)),
        Err(e) => error_report(id, e),
    }
}

fn echo_v<R: Real>(r: VerificationReport, b: &[C<R>; 6]) -> VerificationReport {
    r.with_params("b", b)
}

fn echo_w<R: Real>(r: VerificationReport, a: &[C<R>; 3], b: &[C<R>; 3]) -> VerificationReport {
    r.with_params("a", a).with_params("b", b)
}

pub(crate) fn run_draw<R: Real>(
    ctx: &QContext<R>,
    rng: &mut ChaCha8Rng,
    spec: &DrawSpec,
) -> Result<Vec<VerificationReport>> {
    let suite = spec.suite;
    let band = param_band(ctx, suite);
    let max_index = spec.max_index.unwrap_or(suite.default_max_index());
    let q = ctx.q();
    let one_report = |r: Result<VerificationReport>| r.map(|r| vec![r]);
    match suite {
        Suite::ThetaQuasiperiodicity => {
            let x = sample_point(rng, Band { lo: 0.5, hi: 2.0 });
            let k = rng.gen_range(-6..=6);
            one_report(verify_theta_quasiperiodicity(ctx, x, k).map(|r| r.with_note(format!("k = {k}"))))
        }
        Suite::Ftt => {
            let p = sample_sextuple_with(ctx, rng, band)?;
            one_report(verify_ftt(ctx, &p, sample_point(rng, AUX)))
        }
        Suite::WeierstrassBracket => {
            let p = sample_sextuple_with(ctx, rng, band)?;
            let b = p.b();
            let l5 = sample_point(rng, AUX);
            let l6 = b[4] * b[5] * inv(l5);
            one_report(verify_weierstrass_bracket(ctx, b[0], b[1], b[2], b[3], l5, l6, b[4], b[5]))
        }
        Suite::BilateralJackson | Suite::JacksonTransformation => {
            let p = sample_sextuple_with(ctx, rng, band)?;
            let aux = sample_aux(ctx, &p, rng)?;
            if suite == Suite::BilateralJackson {
                one_report(verify_bilateral_jackson(ctx, &p, aux.lam, aux.mu))
            } else {
                one_report(verify_jackson_transformation(ctx, &p, aux.lam, aux.mu))
            }
        }
        Suite::JacksonReduction => {
            let p = sample_sextuple_with(ctx, rng, band)?;
            let b = p.b();
            Ok(vec![
                verify_bilateral_jackson(ctx, &p, b[5], b[0])?,
                verify_nonterminating_jackson(ctx, b)?,
            ])
        }
        Suite::BilateralSaalschutz => {
            let p = sample_triplepair_with(ctx, rng, band)?;
            let lam = sample_k_aux(ctx, &p, rng)?;
            one_report(verify_bilateral_saalschutz(ctx, &p, lam))
        }
        Suite::SaalschutzReduction => {
            let p = sample_triplepair_with(ctx, rng, band)?;
            let b = p.b();
            let l1 = sample_point(rng, AUX);
            Ok(vec![
                verify_bilateral_saalschutz(ctx, &p, [l1, b[1], b[2]])?,
                verify_nonterminating_saalschutz(ctx, &p)?,
            ])
        }
        Suite::RahmanCoherence => {
            let p = sample_sextuple_with(ctx, rng, band)?;
            let f = v_element::<R>(rng);
            let exact = j_exact(ctx, &p, &f)?;
            let aux = sample_aux(ctx, &p, rng)?;
            let lam = sample_point(rng, AUX);
            let free: [C<R>; 5] = std::array::from_fn(|_| sample_point(rng, AUX));
            let s = free.iter().fold(C::new(R::one(), R::zero()), |a, &x| a * x);
            let lam6 = [free[0], free[1], free[2], free[3], free[4], q * inv(s)];
            let lam_brn = sample_point(rng, AUX);
            let mut out = vec![
                versus(ctx, "rahman_coherence:j_discrete", &exact, j_discrete(ctx, &p, &f, aux.lam, aux.mu))?,
                versus(ctx, "rahman_coherence:j_contour", &exact, j_contour(ctx, &p, &f, lam))?,
                versus(ctx, "rahman_coherence:j_contour_rahman", &exact, j_contour_rahman(ctx, &p, &f))?,
                versus(ctx, "rahman_coherence:j_contour_nonsym", &exact, j_contour_nonsym(ctx, &p, &f, lam6))?,
                versus(ctx, "rahman_coherence:j_contour_brn", &exact, j_contour_brn(ctx, &p, &f, lam_brn))?,
            ];
            let poles = f.pole_orders();
            if poles[4] == 0 && poles[5] == 0 {
                out.push(versus(ctx, "rahman_coherence:j_discrete_special", &exact, j_discrete_special(ctx, &p, &f))?);
            }
            Ok(out.into_iter().map(|r| echo_v(r, p.b())).collect())
        }
        Suite::RahmanBiorthogonality => {
            let p = sample_sextuple_with(ctx, rng, band)?;
            let aux = sample_aux(ctx, &p, rng)?;
            let mut out = Vec::new();
            for m in 0..=max_index {
                for n in 0..=max_index {
                    out.push(verify_rahman_biorthogonality(ctx, &p, m, n, &aux)?);
                }
            }
            Ok(out)
        }
        Suite::KisSymmetry => {
            let p = sample_triplepair_with(ctx, rng, band)?;
            one_report(verify_kis_symmetry(ctx, &p, &w_element(rng)))
        }
        Suite::KScaling => {
            let p = sample_triplepair_with(ctx, rng, band)?;
            let c = sample_point(rng, Band { lo: 0.7, hi: 1.4 });
            let idx = w_index(rng, 2);
            let f = WElement::basis(idx);
            let lhs = k_exact(ctx, &p.scaled(c), &f)?.scale(powi(c, idx.t()));
            let rhs = k_exact(ctx, &p, &f)?;
            let r = Comparison::new("k_scaling", lhs, rhs).param("c", c).int_param("T", idx.t()).finish(ctx.verify_tol);
            Ok(vec![echo_w(r, p.a(), p.b())])
        }
        Suite::KCoherence => {
            let p = sample_triplepair_with(ctx, rng, band)?;
            let f = w_element::<R>(rng);
            let exact = k_exact(ctx, &p, &f)?;
            let lam3 = sample_k_aux(ctx, &p, rng)?;
            let (l1, l2) = (sample_point(rng, AUX), sample_point(rng, AUX));
            let lam_ki = [l1, l2, q * p.t() * inv(l1 * l2)];
            let lam = sample_point(rng, AUX);
            let mut out = vec![
                versus(ctx, "k_coherence:k_discrete", &exact, k_discrete(ctx, &p, &f, lam3))?,
                versus(ctx, "k_coherence:k_contour", &exact, k_contour(ctx, &p, &f, lam_ki))?,
            ];
            for (name, v) in [("gk", KVariant::Gk), ("gkb", KVariant::Gkb), ("aik", KVariant::Aik)] {
                let id = format!("k_coherence:k_contour_{name}");
                out.push(versus(ctx, &id, &exact, k_contour_special(ctx, &p, &f, v, lam))?);
            }
            let poles = f.pole_orders();
            if poles.b[0] == 0 && poles.b[1] == 0 {
                out.push(versus(ctx, "k_coherence:k_discrete_special", &exact, k_discrete_special(ctx, &p, &f))?);
            }
            Ok(out.into_iter().map(|r| echo_w(r, p.a(), p.b())).collect())
        }
        Suite::LimitJToK => {
            let p = sample_triplepair_with(ctx, rng, band)?;
            one_report(verify_limit_j_to_k(ctx, &p, &w_index(rng, 1), &[0.1, 0.05, 0.025]))
        }
        Suite::KBiorthogonality(family) => {
            let p = sample_triplepair_with(ctx, rng, band)?;
            let lam = sample_k_aux(ctx, &p, rng)?;
            let mut out = Vec::new();
            for m in 0..=max_index {
                for n in 0..=max_index {
                    out.push(verify_k_biorthogonality(ctx, &p, family, m, n, lam)?);
                }
            }
            Ok(out)
        }
        Suite::Gasper => {
            let p = sample_triplepair_with(ctx, rng, band)?;
            one_report(verify_gasper(ctx, &p, sample_point(rng, AUX)))
        }
        Suite::Sgl => {
            let p = sample_triplepair_with(ctx, rng, band)?;
            let (l1, l2) = (sample_point(rng, AUX), sample_point(rng, AUX));
            one_report(verify_sgl(ctx, &p, [l1, l2, q * p.t() * inv(l1 * l2)]))
        }
        Suite::GasperReduction => {
            let p = sample_triplepair_with(ctx, rng, band)?;
            let l1 = q * inv(p.b()[2]);
            let l2 = sample_point(rng, AUX);
            let ext = verify_sgl(ctx, &p, [l1, l2, q * p.t() * inv(l1 * l2)])?;
            let gas = verify_gasper(ctx, &p, l2)?;
            let lift = |z: num_complex::Complex<f64>| Tracked::exact(z);
            let tol = ctx.verify_tol.max(64.0 * f64::EPSILON);
            let r = Comparison::<f64>::new("gasper_reduction", lift(ext.lhs()), lift(gas.lhs()))
                .param("lam", crate::numeric::to_c64(l2))
                .finish(tol);
            Ok(vec![echo_w(r, p.a(), p.b())])
        }
        Suite::Gi | Suite::DecouplingV | Suite::FactorizationV | Suite::TwoIndexV => {
            let p = IndexParamsGi::new(sample_sextuple_with(ctx, rng, band)?, zero_sum::<6>(rng, 1))?;
            match suite {
                Suite::Gi => one_report(verify_gi(ctx, &p)),
                Suite::DecouplingV => {
                    let (f, g) = (VElement::basis(v_index(rng, 1)), VElement::basis(v_index(rng, 1)));
                    one_report(verify_decoupling_v(ctx, &p, &f, &g))
                }
                Suite::FactorizationV => {
                    let (f, g) = (VElement::basis(v_index(rng, 1)), VElement::basis(v_index(rng, 1)));
                    let one = VElement::one();
                    let c = p.shifted(ctx)?;
                    let s = |f: &VElement<R>, g: &VElement<R>| sum_integral_v(ctx, &p, f, g, &c);
                    let lhs = s(&f, &g)?.mul(s(&one, &one)?);
                    let rhs = s(&f, &one)?.mul(s(&one, &g)?);
                    let r = Comparison::new("factorization_v", lhs, rhs).finish(ctx.verify_tol);
                    Ok(vec![echo_v(r, p.b().b())])
                }
                _ => {
                    const PERMS: [[usize; 6]; 3] = [[0, 1, 2, 3, 4, 5], [0, 1, 2, 5, 4, 3], [4, 5, 2, 3, 0, 1]];
                    let perm = PERMS[(spec.index % 3) as usize];
                    let mut k = [0usize; 4];
                    for x in &mut k {
                        *x = rng.gen_range(0..=max_index);
                    }
                    one_report(verify_two_index_biorthogonality(ctx, &p, perm, k[0], k[1], k[2], k[3]))
                }
            }
        }
        Suite::Sp | Suite::DecouplingW | Suite::FactorizationW | Suite::TwoIndexW => {
            let t = sample_triplepair_with(ctx, rng, band)?;
            let p = IndexParamsSp::new(t, zero_sum::<3>(rng, 1), zero_sum::<3>(rng, 1))?;
            match suite {
                Suite::Sp => one_report(verify_sp(ctx, &p)),
                Suite::DecouplingW => {
                    let (f, g) = (WElement::basis(w_index(rng, 1)), WElement::basis(w_index(rng, 1)));
                    one_report(verify_decoupling_w(ctx, &p, &f, &g))
                }
                Suite::FactorizationW => {
                    let (f, g) = (WElement::basis(w_index(rng, 1)), WElement::basis(w_index(rng, 1)));
                    let one = WElement::one();
                    let primed = p.shifted(ctx)?;
                    let s = |f: &WElement<R>, g: &WElement<R>| sum_integral_w(ctx, &p, f, g, &primed);
                    let lhs = s(&f, &g)?.mul(s(&one, &one)?);
                    let rhs = s(&f, &one)?.mul(s(&one, &g)?);
                    let r = Comparison::new("factorization_w", lhs, rhs).finish(ctx.verify_tol);
                    Ok(vec![echo_w(r, p.params().a(), p.params().b())])
                }
                _ => {
                    const PAIRS: [(KFamily, KFamily); 3] =
                        [(KFamily::Qr, KFamily::Qr), (KFamily::St, KFamily::Qr), (KFamily::QtRt, KFamily::St)];
                    let (ff, fg) = PAIRS[(spec.index % 3) as usize];
                    let mut k = [0usize; 4];
                    for x in &mut k {
                        *x = rng.gen_range(0..=max_index);
                    }
                    one_report(verify_two_index_biorthogonality_w(ctx, &p, ff, fg, k[0], k[1], k[2], k[3]))
                }
            }
        }
    }
}
