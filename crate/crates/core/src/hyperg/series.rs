use crate::error::{QsvError, Result};
use crate::numeric::{abs_f64, one, to_c64, CompensatedSum, Real, Tracked, C};
use crate::qcore::QContext;

/// Consecutive term ratios below [`RATIO_CEILING`] required in each
/// direction before a bilateral tail bound is trusted.
const CERTIFY_RUN: usize = 8;
const RATIO_CEILING: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SeriesKind {
    Unilateral,
    Bilateral,
    VeryWellPoised,
}

/// A basic hypergeometric series: `r+1φr`, `rψr` or `r+1Wr`.
///
/// For `VeryWellPoised`, `vwp_special` is `a`, `upper` holds `b₁…b_{r−2}`
/// and `lower` is left empty (it is implied: `aq/b_i`).
#[derive(Clone, Debug)]
pub struct SeriesSpec<R: Real> {
    pub upper: Vec<C<R>>,
    pub lower: Vec<C<R>>,
    pub argument: C<R>,
    pub kind: SeriesKind,
    pub vwp_special: Option<C<R>>,
}

impl<R: Real> SeriesSpec<R> {
    pub fn phi(upper: Vec<C<R>>, lower: Vec<C<R>>, argument: C<R>) -> Self {
        Self {
            upper,
            lower,
            argument,
            kind: SeriesKind::Unilateral,
            vwp_special: None,
        }
    }

    pub fn psi(upper: Vec<C<R>>, lower: Vec<C<R>>, argument: C<R>) -> Self {
        Self {
            upper,
            lower,
            argument,
            kind: SeriesKind::Bilateral,
            vwp_special: None,
        }
    }

    pub fn vwp(a: C<R>, b: Vec<C<R>>, argument: C<R>) -> Self {
        Self {
            upper: b,
            lower: Vec::new(),
            argument,
            kind: SeriesKind::VeryWellPoised,
            vwp_special: Some(a),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match self.kind {
            SeriesKind::Unilateral => self.upper.len() == self.lower.len() + 1,
            SeriesKind::Bilateral => self.upper.len() == self.lower.len(),
            SeriesKind::VeryWellPoised => self.vwp_special.is_some() && self.lower.is_empty(),
        };
        if ok {
            Ok(())
        } else {
            Err(QsvError::InvalidIndex(format!(
                "{:?} series with {} upper and {} lower parameters",
                self.kind,
                self.upper.len(),
                self.lower.len()
            )))
        }
    }

    /// `Some(n)` if an upper parameter is `q^{−n}`, `n ≥ 0` (the smallest such `n`).
    pub fn terminating(&self, ctx: &QContext<R>) -> Option<usize> {
        let mut ups: Vec<C<R>> = self.upper.clone();
        if let Some(a) = self.vwp_special {
            ups.push(a);
        }
        terminating_order(ctx, &ups)
    }
}

fn terminating_order<R: Real>(ctx: &QContext<R>, upper: &[C<R>]) -> Option<usize> {
    upper
        .iter()
        .filter_map(|&a| ctx.lattice_exponent(a))
        .filter(|&e| e <= 0)
        .map(|e| (-e) as usize)
        .min()
}

/// Evaluates any [`SeriesSpec`].
pub fn eval_series<R: Real>(ctx: &QContext<R>, spec: &SeriesSpec<R>) -> Result<Tracked<R>> {
    spec.validate()?;
    match spec.kind {
        SeriesKind::Unilateral => unilateral(ctx, &spec.upper, &spec.lower, spec.argument, None),
        SeriesKind::Bilateral => bilateral(ctx, &spec.upper, &spec.lower, spec.argument),
        SeriesKind::VeryWellPoised => {
            let a = spec.vwp_special.expect("validated");
            vwp(ctx, a, &spec.upper, spec.argument)
        }
    }
}

/// `r+1φr(a; b; z) = Σ_{k≥0} (a₁,…,a_{r+1})_k / (q,b₁,…,b_r)_k z^k`.
pub fn eval_phi<R: Real>(ctx: &QContext<R>, spec: &SeriesSpec<R>) -> Result<C<R>> {
    if spec.kind != SeriesKind::Unilateral {
        return Err(QsvError::InvalidIndex("eval_phi needs a unilateral spec".into()));
    }
    eval_series(ctx, spec).map(|t| t.value)
}

/// `rψr(a; b; z) = Σ_{k∈ℤ} (a₁,…,a_r)_k / (b₁,…,b_r)_k z^k`.
pub fn eval_psi<R: Real>(ctx: &QContext<R>, spec: &SeriesSpec<R>) -> Result<C<R>> {
    if spec.kind != SeriesKind::Bilateral {
        return Err(QsvError::InvalidIndex("eval_psi needs a bilateral spec".into()));
    }
    eval_series(ctx, spec).map(|t| t.value)
}

/// `r+1Wr(a; b₁,…,b_{r−2}; z)`.
pub fn eval_w<R: Real>(ctx: &QContext<R>, a: C<R>, b: &[C<R>], z: C<R>) -> Result<C<R>> {
    vwp(ctx, a, b, z).map(|t| t.value)
}

pub fn phi_tracked<R: Real>(
    ctx: &QContext<R>,
    upper: &[C<R>],
    lower: &[C<R>],
    z: C<R>,
) -> Result<Tracked<R>> {
    if upper.len() != lower.len() + 1 {
        return Err(QsvError::InvalidIndex("phi needs r+1 upper and r lower".into()));
    }
    unilateral(ctx, upper, lower, z, None)
}

pub fn psi_tracked<R: Real>(
    ctx: &QContext<R>,
    upper: &[C<R>],
    lower: &[C<R>],
    z: C<R>,
) -> Result<Tracked<R>> {
    if upper.len() != lower.len() {
        return Err(QsvError::InvalidIndex("psi needs r upper and r lower".into()));
    }
    bilateral(ctx, upper, lower, z)
}

pub fn w_tracked<R: Real>(ctx: &QContext<R>, a: C<R>, b: &[C<R>], z: C<R>) -> Result<Tracked<R>> {
    vwp(ctx, a, b, z)
}

fn vwp<R: Real>(ctx: &QContext<R>, a: C<R>, b: &[C<R>], z: C<R>) -> Result<Tracked<R>> {
    if ctx.lattice_exponent(a) == Some(0) {
        return Err(QsvError::SpecialParameterDegenerate);
    }
    let mut upper = Vec::with_capacity(b.len() + 1);
    upper.push(a);
    upper.extend_from_slice(b);
    let lower: Vec<C<R>> = b.iter().map(|&bi| a * ctx.q() / bi).collect();
    unilateral(ctx, &upper, &lower, z, Some(a))
}

/// Sums `Σ_k base_k · w_k` where `base_k` is the φ term and `w_k` the
/// very-well-poised weight `(1 − a q^{2k})/(1 − a)` when `weight` is set.
fn unilateral<R: Real>(
    ctx: &QContext<R>,
    upper: &[C<R>],
    lower: &[C<R>],
    z: C<R>,
    weight: Option<C<R>>,
) -> Result<Tracked<R>> {
    let n_term = terminating_order(ctx, upper);
    for &b in lower {
        if let Some(e) = ctx.lattice_exponent(b) {
            // (b)_k has the factor 1 - b q^{-e}, first used by term k = 1 - e
            if e <= 0 && n_term.map_or(true, |n| n as i64 > -e) {
                return Err(QsvError::LowerParameterPole(format!("{}", to_c64(b))));
            }
        }
    }
    if n_term.is_none() && abs_f64(z) >= 1.0 {
        return Err(QsvError::NonConvergent(format!("|z| = {} >= 1", abs_f64(z))));
    }

    let q = ctx.q();
    let qabs = abs_f64(q);
    let tol = ctx.series_tol.to_f64();
    let up_abs: Vec<f64> = upper.iter().map(|&x| abs_f64(x)).collect();
    let lo_abs: Vec<f64> = lower.iter().map(|&x| abs_f64(x)).collect();
    let zabs = abs_f64(z);
    let (w0, wabs) = match weight {
        Some(a) => (one::<R>() - a, abs_f64(a)),
        None => (one(), 0.0),
    };
    let weight_at = |q2k: C<R>| -> C<R> {
        match weight {
            Some(a) => (one::<R>() - a * q2k) / w0,
            None => one(),
        }
    };

    let mut sum = CompensatedSum::new();
    sum.add(one());
    let mut base = one::<R>();
    let mut qk = one::<R>();
    let mut q2k = one::<R>();
    let max = ctx.max_terms;
    let mut k = 0usize;
    loop {
        if let Some(n) = n_term {
            if k == n {
                return Ok(sum.tracked());
            }
        }
        if k >= max {
            return Err(QsvError::MaxTermsExceeded {
                what: "unilateral series",
                max_terms: max,
            });
        }
        let mut num = z;
        for &a in upper {
            num = num * (one::<R>() - a * qk);
        }
        let mut den = one::<R>() - qk * q;
        for &b in lower {
            den = den * (one::<R>() - b * qk);
        }
        base = base * num / den;
        qk = qk * q;
        q2k = q2k * q * q;
        k += 1;
        let term = base * weight_at(q2k);
        sum.add(term);

        if n_term.is_none() {
            // ratio bound for every later step j >= k
            let qk_abs = qabs.powi(k as i32);
            let mut rho = zabs / (1.0 - qk_abs * qabs);
            for &u in &up_abs {
                rho *= 1.0 + u * qk_abs;
            }
            let mut ok = true;
            for &l in &lo_abs {
                let d = 1.0 - l * qk_abs;
                ok &= d > 0.0;
                rho /= d;
            }
            if weight.is_some() {
                let d = 1.0 - wabs * qk_abs * qk_abs;
                ok &= d > 0.0;
                rho *= (1.0 + wabs * qk_abs * qk_abs * qabs * qabs) / d;
            }
            if ok && rho < 1.0 {
                let tail = abs_f64(term) * rho / (1.0 - rho);
                if tail <= tol * sum.abs_sum().to_f64() || term == C::new(R::zero(), R::zero()) {
                    return Ok(sum.tracked());
                }
            }
        }
    }
}

fn bilateral<R: Real>(
    ctx: &QContext<R>,
    upper: &[C<R>],
    lower: &[C<R>],
    z: C<R>,
) -> Result<Tracked<R>> {
    let q = ctx.q();
    let qi = one::<R>() / q;
    let qabs = abs_f64(q);
    let tol = ctx.series_tol.to_f64();
    let zero = C::new(R::zero(), R::zero());

    // Exact one-sided terminations and poles from lattice parameters.
    // Forward factor 1 - a q^k (k >= 0) vanishes at k = -e; backward
    // factor 1 - b q^{k-1} (k <= 0) vanishes at k = 1 - e.
    let mut fwd_stop: Option<i64> = None; // last nonzero index
    let mut fwd_pole: Option<i64> = None;
    let mut bwd_stop: Option<i64> = None;
    let mut bwd_pole: Option<i64> = None;
    for &a in upper {
        if let Some(e) = ctx.lattice_exponent(a) {
            if e <= 0 {
                fwd_stop = Some(fwd_stop.map_or(-e, |s: i64| s.min(-e)));
            } else {
                // (a)_k for k <= -e contains 1/(1 - a q^{-e})
                bwd_pole = Some(bwd_pole.map_or(-e, |s: i64| s.max(-e)));
            }
        }
    }
    for &b in lower {
        if let Some(e) = ctx.lattice_exponent(b) {
            if e <= 0 {
                fwd_pole = Some(fwd_pole.map_or(1 - e, |s: i64| s.min(1 - e)));
            } else {
                // 1/(b)_k vanishes for k <= -e
                let last = 1 - e;
                bwd_stop = Some(bwd_stop.map_or(last, |s: i64| s.max(last)));
            }
        }
    }
    if let Some(p) = fwd_pole {
        if fwd_stop.map_or(true, |s| s >= p) {
            return Err(QsvError::DenominatorPole("lower parameter in q^(-N)".into()));
        }
    }
    if let Some(p) = bwd_pole {
        if bwd_stop.map_or(true, |s| s <= p) {
            return Err(QsvError::DenominatorPole("upper parameter in q^(N+1)".into()));
        }
    }

    let up_abs: Vec<f64> = upper.iter().map(|&x| abs_f64(x)).collect();
    let lo_abs: Vec<f64> = lower.iter().map(|&x| abs_f64(x)).collect();
    let zabs = abs_f64(z);
    let lim_back = {
        let mut r = 1.0 / zabs;
        for (&u, &l) in up_abs.iter().zip(&lo_abs) {
            r *= l / u;
        }
        r
    };

    let mut sum = CompensatedSum::new();
    sum.add(C::new(R::one(), R::zero()));

    let mut f_term = C::new(R::one(), R::zero());
    let mut f_qk = C::new(R::one(), R::zero()); // q^k for the current forward k
    let mut f_done = fwd_stop == Some(0);
    let mut f_run = 0usize;
    let mut b_term = C::new(R::one(), R::zero());
    let mut b_qk = qi; // q^{k-1} for the current backward k
    let mut b_done = bwd_stop == Some(0);
    let mut b_run = 0usize;

    let max = ctx.max_terms as i64;
    let mut n: i64 = 0;
    while !(f_done && b_done) {
        n += 1;
        if n > max {
            let dir = if f_done { "negative" } else { "positive" };
            return Err(QsvError::NonConvergentBilateral(dir));
        }
        if !f_done {
            let mut num = z;
            let mut den = C::new(R::one(), R::zero());
            for (&a, &b) in upper.iter().zip(lower) {
                num = num * (C::new(R::one(), R::zero()) - a * f_qk);
                den = den * (C::new(R::one(), R::zero()) - b * f_qk);
            }
            let prev = abs_f64(f_term);
            f_term = f_term * num / den;
            f_qk = f_qk * q;
            sum.add(f_term);
            let cur = abs_f64(f_term);
            if fwd_stop == Some(n) || f_term == zero {
                f_done = true;
            } else {
                f_run = if prev > 0.0 && cur < RATIO_CEILING * prev { f_run + 1 } else { 0 };
                if f_run >= CERTIFY_RUN {
                    let qk_abs = qabs.powi(n as i32);
                    let mut rho = zabs;
                    let mut ok = true;
                    for (&u, &l) in up_abs.iter().zip(&lo_abs) {
                        let d = 1.0 - l * qk_abs;
                        ok &= d > 0.0;
                        rho *= (1.0 + u * qk_abs) / d;
                    }
                    if ok && rho < 1.0 && cur * rho / (1.0 - rho) <= tol * sum.abs_sum().to_f64() {
                        f_done = true;
                    }
                }
            }
        }
        if !b_done {
            // factor by factor: each ratio tends to b/a while the separate
            // products grow like q^{-rn} and overflow a complex division
            let mut ratio = one::<R>() / z;
            for (&a, &b) in upper.iter().zip(lower) {
                ratio = ratio * (one::<R>() - b * b_qk) / (one::<R>() - a * b_qk);
            }
            let prev = abs_f64(b_term);
            b_term = b_term * ratio;
            b_qk = b_qk * qi;
            sum.add(b_term);
            let cur = abs_f64(b_term);
            if bwd_stop == Some(-n) || b_term == zero {
                b_done = true;
            } else {
                b_run = if prev > 0.0 && cur < RATIO_CEILING * prev { b_run + 1 } else { 0 };
                if b_run >= CERTIFY_RUN {
                    // factor (1 - b q^{j-1})/(1 - a q^{j-1}) = (b/a)(1 - q^{1-j}/b)/(1 - q^{1-j}/a)
                    let u = qabs.powi(n as i32 + 1);
                    let mut rho = lim_back;
                    let mut ok = true;
                    for (&a, &b) in up_abs.iter().zip(&lo_abs) {
                        let d = 1.0 - u / a;
                        ok &= d > 0.0;
                        rho *= (1.0 + u / b) / d;
                    }
                    if ok && rho < 1.0 && cur * rho / (1.0 - rho) <= tol * sum.abs_sum().to_f64() {
                        b_done = true;
                    }
                }
            }
        }
    }
    Ok(sum.tracked())
}
