//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Built with `harness = false` so the lines appear in plain `cargo test`
//! output. Exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use qsv_core::alsalam::{k_basis, sample_k_aux, scaled_rahman_value, BasisIndexW, WElement};
use qsv_core::harness::{
    draw_rng, run_suite, sample_point, sample_q, sample_sextuple_with, sample_triplepair_with, Band, Precision,
    SuiteConfig, SuiteOutcome,
};
use qsv_core::hyperg::{eval_psi, saalschutz_row, SeriesSpec};
use qsv_core::indexkit::{sum_integral_v_with, sum_integral_w_with, IndexParamsGi, IndexParamsSp, SumOptions};
use qsv_core::numeric::{inv, one, CompensatedSum, Tracked, C};
use qsv_core::qcore::{qpoch, qpoch_inf, qpoch_inf_prod, theta, QContext};
use qsv_core::quad::{circle_integral, circle_integral_fixed, ContourSpec};
use qsv_core::rahman::{j_contour, j_contour_brn, j_contour_rahman, j_discrete, sample_aux, VElement};
use qsv_core::QsvError;

type R = f64;

struct Line {
    ok: bool,
    detail: String,
}

impl Line {
    fn new() -> Self {
        Line { ok: true, detail: String::new() }
    }

    fn check(&mut self, ok: bool, what: impl AsRef<str>) {
        self.ok &= ok;
        if !self.detail.is_empty() {
            self.detail.push_str("; ");
        }
        self.detail.push_str(what.as_ref());
        if !ok {
            self.detail.push_str(" [FAILED]");
        }
    }

    /// Every evaluated report passed, none failed to converge, and the
    /// largest residual is within `tol`.
    fn suite(&mut self, label: &str, o: &SuiteOutcome, tol: f64) {
        let s = &o.summary;
        let ok = s.fail == 0 && s.nonconvergent == 0 && s.rejected == 0 && s.pass > 0 && s.max_rel_residual <= tol;
        self.check(
            ok,
            format!(
                "{label}: {}/{} pass, {} rejected, max rel {:.1e}",
                s.pass, s.reports, s.rejected, s.max_rel_residual
            ),
        );
    }

    fn runtime(&mut self, label: &str, t: Duration, limit: Duration) {
        self.check(t <= limit, format!("{label} {:.1}s (limit {}s)", t.as_secs_f64(), limit.as_secs()));
    }
}

fn suite(id: &str, draws: usize, seed: u64, tol: f64, max_index: Option<usize>, precision: Precision) -> SuiteOutcome {
    let mut c = SuiteConfig::new(id);
    c.draws = draws;
    c.seed = seed;
    c.tol = Some(tol);
    c.max_index = max_index;
    c.precision = precision;
    run_suite(&c).unwrap_or_else(|e| panic!("{id}: {e}"))
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn rel(a: C<R>, b: C<R>) -> f64 {
    (a - b).norm() / b.norm().max(f64::MIN_POSITIVE)
}

fn ctx_for(seed: u64, modulus: [f64; 2]) -> (QContext<R>, rand_chacha::ChaCha8Rng) {
    let mut rng = draw_rng(seed);
    let q = sample_q(&mut rng, modulus, [-std::f64::consts::PI, std::f64::consts::PI]);
    (QContext::from_c64(q).unwrap(), rng)
}

fn kernel() -> Line {
    let mut line = Line::new();
    let ((o, worst), t) = timed(|| {
        let o = suite("theta_quasiperiodicity", 200, 11, 1e-10, None, Precision::Double);
        // recurrences and splitting on 200 further random cases
        let mut worst = 0.0f64;
        for i in 0..200u64 {
            let (ctx, mut rng) = ctx_for(1000 + i, [0.2, 0.5]);
            let q = ctx.q();
            let a: C<R> = sample_point(&mut rng, Band::new(0.3, 1.8).unwrap());
            let n = (i % 7) as i64 + 1;
            let step = qpoch(&ctx, a, n).unwrap() * (one::<R>() - a * ctx.qpow(n));
            worst = worst.max(rel(qpoch(&ctx, a, n + 1).unwrap(), step));
            let neg = inv(qpoch(&ctx, a * ctx.qpow(-n), n).unwrap());
            worst = worst.max(rel(qpoch(&ctx, a, -n).unwrap(), neg));
            let split = qpoch(&ctx, a, n).unwrap() * qpoch_inf(&ctx, a * ctx.qpow(n)).unwrap();
            worst = worst.max(rel(qpoch_inf(&ctx, a).unwrap(), split));
            let th = qpoch_inf(&ctx, a).unwrap() * qpoch_inf(&ctx, q * inv(a)).unwrap();
            worst = worst.max(rel(theta(&ctx, a).unwrap(), th));
        }
        (o, worst)
    });
    line.suite("quasi-periodicity x200", &o, 1e-10);
    line.check(worst <= 1e-10, format!("recurrence/splitting x200 max rel {worst:.1e}"));
    line.runtime("runtime", t, Duration::from_secs(1));
    line
}

fn bilateral_jackson() -> Line {
    let mut line = Line::new();
    let ((a, b), t) = timed(|| {
        (
            suite("bilateral_jackson", 20, 21, 1e-8, None, Precision::Double),
            suite("jackson_reduction", 20, 22, 1e-8, None, Precision::Double),
        )
    });
    line.suite("bilateral sum", &a, 1e-8);
    line.suite("reduction to nonterminating sum", &b, 1e-8);
    line.runtime("runtime", t, Duration::from_secs(30));
    line
}

/// `det₃` expanded along the 2×2 minors of the first two rows, so that
/// swapping those rows negates every operation exactly.
fn det3(m: &[[Tracked<R>; 3]; 3]) -> C<R> {
    let v = |i: usize, j: usize| m[i][j].value;
    let mut acc = C::new(0.0, 0.0);
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        acc = acc + v(2, k) * (v(0, i) * v(1, j) - v(0, j) * v(1, i));
    }
    acc
}

fn bilateral_saalschutz() -> Line {
    let mut line = Line::new();
    let ((a, b, flips), t) = timed(|| {
        let a = suite("bilateral_saalschutz", 20, 31, 1e-8, None, Precision::Double);
        let b = suite("saalschutz_reduction", 20, 32, 1e-8, None, Precision::Double);
        let mut flips = 0;
        for i in 0..20u64 {
            let (ctx, mut rng) = ctx_for(3300 + i, [0.2, 0.5]);
            let band = Band::around_sixth_root(ctx.abs_q(), 0.1);
            let p = sample_triplepair_with(&ctx, &mut rng, band).unwrap();
            let lam = sample_k_aux(&ctx, &p, &mut rng).unwrap();
            let row = |l| saalschutz_row(&ctx, &p, l).unwrap();
            let d = det3(&[row(lam[0]), row(lam[1]), row(lam[2])]);
            let s = det3(&[row(lam[1]), row(lam[0]), row(lam[2])]);
            if s == -d && d != C::new(0.0, 0.0) {
                flips += 1;
            }
        }
        (a, b, flips)
    });
    line.suite("determinant evaluation", &a, 1e-8);
    line.suite("collapse to nonterminating sum", &b, 1e-8);
    line.check(flips == 20, format!("row swap negates det exactly {flips}/20"));
    line.runtime("runtime", t, Duration::from_secs(30));
    line
}

fn rahman_coherence() -> Line {
    let mut line = Line::new();
    let d = suite("rahman_coherence", 20, 41, 1e-8, None, Precision::Double);
    line.suite("double", &d, 1e-8);
    let e = suite("rahman_coherence", 20, 41, 1e-18, None, Precision::Extended);
    line.suite("extended", &e, 1e-18);
    let mut worst = 0.0f64;
    for i in 0..5u64 {
        let (ctx, mut rng) = ctx_for(4100 + i, [0.2, 0.5]);
        let band = Band::around_sixth_root(ctx.abs_q(), 0.1);
        let p = sample_sextuple_with(&ctx, &mut rng, band).unwrap();
        let aux = sample_aux(&ctx, &p, &mut rng).unwrap();
        let lam = sample_point(&mut rng, Band::new(0.85, 1.15).unwrap());
        let f = VElement::<R>::one();
        for v in [
            j_discrete(&ctx, &p, &f, aux.lam, aux.mu),
            j_contour(&ctx, &p, &f, lam),
            j_contour_rahman(&ctx, &p, &f),
            j_contour_brn(&ctx, &p, &f, lam),
        ] {
            worst = worst.max(rel(v.unwrap().value, one()));
        }
    }
    line.check(worst <= 1e-12, format!("J(1) = 1 max rel {worst:.1e}"));
    line
}

fn rahman_biorthogonality() -> Line {
    let mut line = Line::new();
    let (o, t) = timed(|| suite("rahman_biorthogonality", 5, 51, 1e-8, Some(4), Precision::Double));
    line.suite("5x5 matrices", &o, 1e-8);
    line.check(o.summary.reports == 5 * 25, format!("{} entries", o.summary.reports));
    line.runtime("runtime", t, Duration::from_secs(120));
    line
}

fn k_coherence() -> Line {
    let mut line = Line::new();
    line.suite("representations", &suite("k_coherence", 20, 61, 1e-8, None, Precision::Double), 1e-8);
    line.suite("reflection symmetry", &suite("kis_symmetry", 20, 62, 1e-10, None, Precision::Double), 1e-10);
    line.suite("scaling invariance", &suite("k_scaling", 20, 63, 1e-10, None, Precision::Double), 1e-10);
    // empirical order of the J -> K degeneration
    let cs = [0.1, 0.05, 0.025];
    let mut rates = Vec::new();
    for i in 0..20u64 {
        let (ctx, mut rng) = ctx_for(6400 + i, [0.2, 0.5]);
        let band = Band::around_sixth_root(ctx.abs_q(), 0.1);
        let p = sample_triplepair_with(&ctx, &mut rng, band).unwrap();
        let idx = BasisIndexW::new([1, 0, -1], [0, -1, 1]).unwrap();
        let k = k_basis(&ctx, &p, &idx).unwrap();
        let gaps: Vec<f64> = cs
            .iter()
            .map(|&c| (scaled_rahman_value(&ctx, &p, &idx, c).unwrap() - k).norm())
            .collect();
        for w in 0..2 {
            rates.push((gaps[w] / gaps[w + 1]).log2());
        }
    }
    let (lo, hi) = rates.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    line.check(lo >= 1.7 && hi <= 2.3, format!("J->K observed order in [{lo:.2}, {hi:.2}]"));
    line
}

fn k_biorthogonality() -> Line {
    let mut line = Line::new();
    for (i, id) in ["k_biorthogonality_qr", "k_biorthogonality_qtrt", "k_biorthogonality_st"].iter().enumerate() {
        let o = suite(id, 5, 71 + i as u64, 1e-8, Some(3), Precision::Double);
        line.suite(&format!("{id} 4x4"), &o, 1e-8);
    }
    line
}

fn gasper() -> Line {
    let mut line = Line::new();
    line.suite("gasper", &suite("gasper", 10, 81, 1e-8, None, Precision::Double), 1e-8);
    line.suite("extension", &suite("sgl", 10, 82, 1e-8, None, Precision::Double), 1e-8);
    line.suite("reduction", &suite("gasper_reduction", 10, 83, 1e-9, None, Precision::Double), 1e-9);
    line
}

fn index_identities() -> Line {
    let mut line = Line::new();
    for (id, seed) in [("gi", 91), ("sp", 92)] {
        let (o, t) = timed(|| suite(id, 10, seed, 1e-7, None, Precision::Double));
        line.suite(id, &o, 1e-7);
        line.runtime(&format!("{id} runtime"), t, Duration::from_secs(300));
    }
    line
}

fn decoupling() -> Line {
    let mut line = Line::new();
    line.suite("V level", &suite("decoupling_v", 5, 101, 1e-7, None, Precision::Double), 1e-7);
    line.suite("W level", &suite("decoupling_w", 5, 102, 1e-7, None, Precision::Double), 1e-7);
    line.suite("V factorization", &suite("factorization_v", 5, 103, 1e-6, None, Precision::Double), 1e-6);
    line.suite("W factorization", &suite("factorization_w", 5, 104, 1e-6, None, Precision::Double), 1e-6);
    line
}

fn two_index() -> Line {
    let mut line = Line::new();
    // draw i uses permutation class (or family pairing) i mod 3
    let ((v, w), t) = timed(|| {
        (
            suite("two_index_v", 3, 111, 1e-7, Some(2), Precision::Double),
            suite("two_index_w", 3, 112, 1e-7, Some(2), Precision::Double),
        )
    });
    line.suite("V level, 3 classes", &v, 1e-7);
    line.suite("W level, 3 pairings", &w, 1e-7);
    line.runtime("runtime", t, Duration::from_secs(600));
    line
}

/// Rahman weight `(z², z⁻², sz, s/z)_∞ / ∏_{j≤5}(b_j z, b_j/z)_∞`.
fn rahman_weight(ctx: &QContext<R>, b: &[C<R>; 6], z: C<R>) -> Result<C<R>, QsvError> {
    let zi = inv(z);
    let s = b[..5].iter().fold(one::<R>(), |a, &x| a * x);
    let num = qpoch_inf_prod(ctx, &[z * z, zi * zi, s * z, s * zi])?;
    let mut den = one::<R>();
    for &x in &b[..5] {
        den = den * qpoch_inf(ctx, x * z)? * qpoch_inf(ctx, x * zi)?;
    }
    Ok(num / den)
}

fn robustness() -> Line {
    let mut line = Line::new();
    let (mut nodes, mut radius, mut window, mut psi) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut drift_ok = true;
    for i in 0..5u64 {
        let (ctx, mut rng) = ctx_for(12_000 + i, [0.25, 0.4]);
        let lim = 10.0 * ctx.series_tol;
        let band = Band::around_sixth_root(ctx.abs_q(), 0.1);
        let p = sample_sextuple_with(&ctx, &mut rng, band).unwrap();
        let b = *p.b();
        let f = |z: C<R>| rahman_weight(&ctx, &b, z);
        let base = circle_integral(&ctx, f, &ContourSpec::with_radius(1.0).unwrap()).unwrap();
        let n = base.nodes;
        let v1 = circle_integral_fixed(f, 1.0, n).unwrap().value;
        let v2 = circle_integral_fixed(f, 1.0, 2 * n).unwrap().value;
        let d = rel(v2, v1);
        nodes = nodes.max(d);
        drift_ok &= d < lim;
        for rho in [0.98, 1.02] {
            let v = circle_integral(&ctx, f, &ContourSpec::with_radius(rho).unwrap()).unwrap().integral.value;
            let d = rel(v, base.integral.value);
            radius = radius.max(d);
            drift_ok &= d < lim;
        }

        // sum-integrals: window +4 per tail and a perturbed contour radius
        let band = Band::sixth_root_pm(ctx.abs_q(), 0.05);
        let gi = IndexParamsGi::new(sample_sextuple_with(&ctx, &mut rng, band).unwrap(), [1, 0, -1, 0, 0, 0]).unwrap();
        let c = gi.shifted(&ctx).unwrap();
        let one_v = VElement::<R>::one();
        let sv = |o: SumOptions| sum_integral_v_with(&ctx, &gi, &one_v, &one_v, &c, &o).unwrap().value;
        let sp = IndexParamsSp::new(sample_triplepair_with(&ctx, &mut rng, band).unwrap(), [0, 1, -1], [1, -1, 0]).unwrap();
        let primed = sp.shifted(&ctx).unwrap();
        let one_w = WElement::<R>::one();
        let sw = |o: SumOptions| sum_integral_w_with(&ctx, &sp, &one_w, &one_w, &primed, &o).unwrap().value;
        let pad = SumOptions { pad: 4, rho_scale: 1.0 };
        let moved = SumOptions { pad: 0, rho_scale: 1.05 };
        for s in [&sv as &dyn Fn(SumOptions) -> C<R>, &sw] {
            let b0 = s(SumOptions::default());
            let dw = rel(s(pad), b0);
            let dr = rel(s(moved), b0);
            window = window.max(dw);
            radius = radius.max(dr);
            drift_ok &= dw < lim && dr < lim;
        }

        // bilateral series: direct partial sums over the settled window + 4
        // 1psi1 converges for |b/a| < |z| < 1
        let a: C<R> = sample_point(&mut rng, Band::new(0.7, 0.9).unwrap());
        let bb: C<R> = sample_point(&mut rng, Band::new(0.1, 0.3).unwrap());
        let z: C<R> = sample_point(&mut rng, Band::new(0.6, 0.8).unwrap());
        // terms by their ratios, to stay clear of overflow in (b;q)_{-k}
        let fwd = |k: i64| (one::<R>() - a * ctx.qpow(k)) / (one::<R>() - bb * ctx.qpow(k)) * z;
        let bwd = |k: i64| (one::<R>() - bb * ctx.qpow(k - 1)) / (one::<R>() - a * ctx.qpow(k - 1)) / z;
        let side = |dir: i64| {
            let (mut t, mut k, mut big) = (one::<R>(), 0i64, 1.0f64);
            let mut out = Vec::new();
            let mut settled_at = None;
            loop {
                t = t * if dir > 0 { fwd(k) } else { bwd(k) };
                k += dir;
                big = big.max(t.norm());
                out.push(t);
                let n = out.len();
                if settled_at.is_none() && n >= 4 && out[n - 4..].iter().all(|x| x.norm() <= ctx.series_tol * big) {
                    settled_at = Some(n);
                }
                if settled_at.map_or(false, |m| n == m + 4) {
                    return out;
                }
            }
        };
        let mut acc = CompensatedSum::new();
        acc.add(one());
        for t in side(1).into_iter().chain(side(-1)) {
            acc.add(t);
        }
        let v = eval_psi(&ctx, &SeriesSpec::psi(vec![a], vec![bb], z)).unwrap();
        let scale = acc.abs_sum() / acc.value().norm();
        let d = rel(v, acc.value()) / scale;
        psi = psi.max(d);
        drift_ok &= d < lim;
    }
    line.check(
        drift_ok,
        format!("relative drift: node doubling {nodes:.1e}, radius {radius:.1e}, x-window +4 {window:.1e}, psi window +4 {psi:.1e} (limit 10 x series_tol)"),
    );
    line
}

fn main() {
    let criteria: [(&str, fn() -> Line); 12] = [
        ("theta/Pochhammer kernel", kernel),
        ("bilateral Jackson", bilateral_jackson),
        ("bilateral q-Saalschutz", bilateral_saalschutz),
        ("Rahman functional coherence", rahman_coherence),
        ("Rahman biorthogonality", rahman_biorthogonality),
        ("K functional coherence", k_coherence),
        ("degenerate biorthogonality", k_biorthogonality),
        ("Gasper integral and extension", gasper),
        ("index identities", index_identities),
        ("decoupling", decoupling),
        ("two-index biorthogonality", two_index),
        ("robustness", robustness),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (line, t) = timed(run);
        let verdict = if line.ok { "PASS" } else { "FAIL" };
        if !line.ok {
            failed += 1;
        }
        println!("criterion {:>2} {verdict} {name} ({:.1}s): {}", i + 1, t.as_secs_f64(), line.detail);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
