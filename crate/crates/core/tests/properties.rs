use num_complex::Complex;
use proptest::prelude::*;

use qsv_core::alsalam::{verify_kis_symmetry, BasisIndexW, WElement};
use qsv_core::harness::{
    draw_rng, draw_seed, sample_balanced_sextuple, sample_balanced_triplepair, splitmix64, Band,
    QSpec,
};
use qsv_core::numeric::{one, C};
use qsv_core::qcore::{qpoch, qpoch_inf, verify_theta_quasiperiodicity, QContext};

fn nome() -> impl Strategy<Value = Complex<f64>> {
    (0.1f64..0.5, -3.1f64..3.1).prop_map(|(r, t)| Complex::from_polar(r, t))
}

fn point(lo: f64, hi: f64) -> impl Strategy<Value = C<f64>> {
    (lo..hi, -3.1f64..3.1).prop_map(|(r, t)| Complex::from_polar(r, t))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theta_is_quasi_periodic(q in nome(), x in point(0.4, 2.5), k in -6i64..=6) {
        let ctx = QContext::<f64>::from_c64(q).unwrap();
        let r = verify_theta_quasiperiodicity(&ctx, x, k).unwrap();
        prop_assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn pochhammer_splits(q in nome(), a in point(0.2, 1.5), n in -5i64..=5, m in -5i64..=5) {
        let ctx = QContext::<f64>::from_c64(q).unwrap();
        let whole = qpoch(&ctx, a, n + m).unwrap();
        let parts = qpoch(&ctx, a, n).unwrap() * qpoch(&ctx, a * ctx.qpow(n), m).unwrap();
        prop_assert!((whole - parts).norm() <= 1e-12 * whole.norm().max(parts.norm()));
        let inf = qpoch_inf(&ctx, a).unwrap();
        let split = qpoch(&ctx, a, n).unwrap() * qpoch_inf(&ctx, a * ctx.qpow(n)).unwrap();
        prop_assert!((inf - split).norm() <= 1e-12 * inf.norm().max(split.norm()));
    }

    #[test]
    fn sextuples_are_balanced(q in nome(), seed in any::<u64>()) {
        let ctx = QContext::<f64>::from_c64(q).unwrap();
        let band = Band::around_sixth_root(ctx.abs_q(), 0.1);
        let p = sample_balanced_sextuple(&ctx, seed, band).unwrap();
        let prod = p.b().iter().fold(one::<f64>(), |a, &x| a * x);
        prop_assert!((prod - ctx.q()).norm() < 1e-14);
        prop_assert!(p.b().iter().all(|x| band.contains(x.norm())));
        prop_assert!(p.certificate().is_generic(ctx.genericity_threshold));
        let again = sample_balanced_sextuple(&ctx, seed, band).unwrap();
        prop_assert_eq!(p.b(), again.b());
    }

    #[test]
    fn triple_pairs_are_balanced(q in nome(), seed in any::<u64>()) {
        let ctx = QContext::<f64>::from_c64(q).unwrap();
        let band = Band::around_sixth_root(ctx.abs_q(), 0.1);
        let p = sample_balanced_triplepair(&ctx, seed, band).unwrap();
        let prod = p.a().iter().chain(p.b()).fold(one::<f64>(), |a, &x| a * x);
        prop_assert!((prod - ctx.q()).norm() < 1e-14);
        prop_assert!(p.certificate().is_generic(ctx.genericity_threshold));
    }

    #[test]
    fn k_reflection_symmetry(q in nome(), seed in any::<u64>(), kl in prop::array::uniform5(-2i64..=2)) {
        let ctx = QContext::<f64>::from_c64(q).unwrap();
        let band = Band::around_sixth_root(ctx.abs_q(), 0.1);
        let p = sample_balanced_triplepair(&ctx, seed, band).unwrap();
        let last = -kl.iter().sum::<i64>();
        let idx = BasisIndexW::new([kl[0], kl[1], kl[2]], [kl[3], kl[4], last]).unwrap();
        let r = verify_kis_symmetry(&ctx, &p, &WElement::basis(idx)).unwrap();
        prop_assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn draw_seeds_follow_the_mixer(s in any::<u64>(), i in 0u64..1000) {
        prop_assert_eq!(draw_seed(s, i), splitmix64(s.wrapping_add(i)));
        prop_assert_ne!(draw_seed(s, i), draw_seed(s, i + 1));
    }

    #[test]
    fn q_ranges_parse(lo in 0.05f64..0.5, w in 0.0f64..0.4) {
        let hi = lo + w;
        let spec: QSpec = format!("{lo}..{hi}").parse().unwrap();
        prop_assert_eq!(spec.modulus, [lo, hi]);
    }
}

/// At |q| = 0.3 the default bands never exhaust the sampler or produce a
/// non-generic draw.
#[test]
fn sampling_audit() {
    let mut failures = 0;
    for seed in 0..100u64 {
        let mut rng = draw_rng(seed);
        let q = qsv_core::harness::sample_q(&mut rng, [0.3, 0.3], [-std::f64::consts::PI, std::f64::consts::PI]);
        let ctx = QContext::<f64>::from_c64(q).unwrap();
        for band in [Band::around_sixth_root(0.3, 0.1), Band::sixth_root_pm(0.3, 0.05)] {
            match sample_balanced_sextuple(&ctx, seed, band) {
                Ok(p) if p.certificate().is_generic(ctx.genericity_threshold) => {}
                _ => failures += 1,
            }
            match sample_balanced_triplepair(&ctx, seed, band) {
                Ok(p) if p.certificate().is_generic(ctx.genericity_threshold) => {}
                _ => failures += 1,
            }
        }
    }
    assert_eq!(failures, 0);
}
