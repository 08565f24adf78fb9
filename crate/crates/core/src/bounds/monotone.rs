use std::f64::consts::{FRAC_PI_2, PI};

use crate::distortion::{lambda_log, phi, Dilatation};
use crate::elliptic::ellint_k;
use crate::error::Result;

use super::check::{BoundCheck, CheckDomain, Inequality, Point, Side, LIMIT_TOLERANCE};
use super::constants::{Constants, LN_16};
use super::families::PointData;

macro_rules! claims {
    ($($id:ident = $name:literal, $formula:literal;)*) => {
        $(pub(crate) const $id: Inequality = Inequality { name: $name, formula: $formula };)*
    };
}

claims! {
    SCALED_INCREASING = "eta_scaled_increasing", "K -> e^{-2K mu(r')} eta_K(t) is strictly increasing";
    SCALED_SUP = "eta_scaled_sup", "e^{-2K mu(r')} eta_K(t) < 1/16";
    SCALED_LIMIT_ONE = "eta_scaled_limit_one", "e^{-2K mu(r')} eta_K(t) -> t e^{-2mu(r')} as K -> 1";
    SCALED_LIMIT_INF = "eta_scaled_limit_infinity", "e^{-2K mu(r')} eta_K(t) -> 1/16 as K -> infinity";
    LOG_DERIVATIVE_DECREASING = "eta_log_derivative_decreasing", "K -> (d/dK) log eta_K(t) = 2K'(s)^2/mu(r) is strictly decreasing";
    LOG_DERIVATIVE_FLOOR = "eta_log_derivative_floor", "2mu(r') < 2K'(s)^2/mu(r)";
    LOG_DERIVATIVE_CEILING = "eta_log_derivative_ceiling", "2K'(s)^2/mu(r) < 4K(r)K'(r)/pi, K > 1";
    LOG_DERIVATIVE_LIMIT_ONE = "eta_log_derivative_limit_one", "2K'(s)^2/mu(r) -> 4K(r)K'(r)/pi as K -> 1";
    LOG_DERIVATIVE_LIMIT_INF = "eta_log_derivative_limit_infinity", "2K'(s)^2/mu(r) -> 2mu(r') as K -> infinity";
    SCALED_DERIVATIVE_INCREASING = "eta_scaled_derivative_increasing", "K -> e^{-2K mu(r')} (d/dK) eta_K(t) is strictly increasing";
    SCALED_DERIVATIVE_SUP = "eta_scaled_derivative_sup", "e^{-2K mu(r')} (d/dK) eta_K(t) < mu(r')/8";
    SCALED_DERIVATIVE_LIMIT_ONE = "eta_scaled_derivative_limit_one", "e^{-2K mu(r')} (d/dK) eta_K(t) -> 4t K(r)K'(r) e^{-2mu(r')}/pi as K -> 1";
    SCALED_DERIVATIVE_LIMIT_INF = "eta_scaled_derivative_limit_infinity", "e^{-2K mu(r')} (d/dK) eta_K(t) -> mu(r')/8 as K -> infinity";
    LAMBDA_RATIO_DECREASING = "lambda_log_ratio_decreasing", "K -> log lambda(K)/(K-1) is strictly decreasing";
    LAMBDA_RATIO_CONVEX = "lambda_log_ratio_convex", "K -> log lambda(K)/(K-1) is strictly convex";
    LAMBDA_RATIO_LIMIT_ONE = "lambda_log_ratio_limit_one", "log lambda(K)/(K-1) -> a as K -> 1";
    LAMBDA_RATIO_LIMIT_INF = "lambda_log_ratio_limit_infinity", "log lambda(K)/(K-1) -> pi as K -> infinity";
    LAMBDA_SHIFTED_INCREASING = "lambda_shifted_ratio_increasing", "K -> (log lambda(K) + b(1/K - K))/(K-1) is strictly increasing";
    LAMBDA_SHIFTED_LIMIT_ONE = "lambda_shifted_ratio_limit_one", "(log lambda(K) + b(1/K - K))/(K-1) -> 0 as K -> 1";
    LAMBDA_SHIFTED_LIMIT_INF = "lambda_shifted_ratio_limit_infinity", "(log lambda(K) + b(1/K - K))/(K-1) -> pi - b as K -> infinity";
    LAMBDA_ROOT_LIMIT_ONE = "lambda_root_limit_one", "lambda(K)^{1/(K-1)} -> e^a as K -> 1";
    LAMBDA_ROOT_LIMIT_INF = "lambda_root_limit_infinity", "lambda(K)^{1/K} -> e^pi as K -> infinity";
    POWER_RATIO_DECREASING = "eta_power_ratio_decreasing", "K -> A^{-K} B^{1/K} (eta_K(t)/(t^{1/K}(1+t)^{K-1/K}))^{1/2} is strictly decreasing";
    POWER_RATIO_LIMIT_ONE = "eta_power_ratio_limit_one", "A^{-K} B^{1/K} (eta_K(t)/(t^{1/K}(1+t)^{K-1/K}))^{1/2} -> B/A as K -> 1";
    POWER_RATIO_LIMIT_INF = "eta_power_ratio_limit_infinity", "A^{-K} B^{1/K} (eta_K(t)/(t^{1/K}(1+t)^{K-1/K}))^{1/2} -> 1/4 as K -> infinity";
    ROOT_DECREASING = "eta_root_decreasing", "K -> (eta_K(t) e^{2(2K(r)K'(r)/pi + log(r'/r))})^{1/K} is strictly decreasing";
    ROOT_LIMIT_ONE = "eta_root_limit_one", "(eta_K(t) e^{2(2K(r)K'(r)/pi + log(r'/r))})^{1/K} -> e^{4K(r)K'(r)/pi} as K -> 1";
    ROOT_LIMIT_INF = "eta_root_limit_infinity", "(eta_K(t) e^{2(2K(r)K'(r)/pi + log(r'/r))})^{1/K} -> e^{2mu(r')} as K -> infinity";
}

/// `K` just above 1 at which limits as `K → 1` are checked.
const NEAR_ONE: f64 = 1.0 + 1e-6;
const SHIFTED_NEAR_ONE: f64 = 1.0 + 1e-3;

/// Values of the `η`-versus-`K` functions at one `K`.
struct EtaSample {
    k: f64,
    /// `1/16 − e^{−E} η`.
    gap: f64,
    /// `g − 2μ(r')` with `g = 2K(s')²/μ(r)`.
    excess: f64,
    /// `μ(r')/8 − e^{−E} ∂η/∂K`, expanded without cancellation.
    deficit: f64,
    data: PointData,
}

impl EtaSample {
    fn new(k: f64, t: f64) -> Result<Self> {
        let kd = Dilatation::new(k)?;
        let data = PointData::new(kd, t)?;
        let s = phi(kd, data.r)?;
        let kc = ellint_k(s.complement())?;
        let excess = 2.0 * (kc - FRAC_PI_2) * (kc + FRAC_PI_2) / data.mu_r;
        let gap = data.expansion.scaled_gap();
        let deficit = 2.0 * data.mu_c * gap - excess / 16.0 + excess * gap;
        Ok(Self {
            k,
            gap,
            excess,
            deficit,
            data,
        })
    }

    fn scaled(&self) -> f64 {
        1.0 / 16.0 - self.gap
    }

    fn log_derivative(&self) -> f64 {
        2.0 * self.data.mu_c + self.excess
    }

    fn scaled_derivative(&self) -> f64 {
        self.data.mu_c / 8.0 - self.deficit
    }
}

/// Monotonicity, range and limits of `e^{−E} η_K(t)`, `∂ log η/∂K` and
/// `e^{−E} ∂η/∂K` along the increasing dilatations `ks` (all above 1).
pub fn eta_versus_k(t: f64, ks: &[f64]) -> Result<Vec<BoundCheck>> {
    let samples = ks.iter().map(|&k| EtaSample::new(k, t)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::with_capacity(7 * samples.len() + 6);
    for (i, s) in samples.iter().enumerate() {
        let pt = Point::kt(s.k, t);
        out.push(BoundCheck::strict(
            &SCALED_SUP,
            pt,
            CheckDomain::Scaled,
            s.scaled(),
            1.0 / 16.0,
            s.gap,
        ));
        let g = s.log_derivative();
        out.push(BoundCheck::strict(
            &LOG_DERIVATIVE_FLOOR,
            pt,
            CheckDomain::Linear,
            2.0 * s.data.mu_c,
            g,
            s.excess,
        ));
        out.push(BoundCheck::strict(
            &LOG_DERIVATIVE_CEILING,
            pt,
            CheckDomain::Linear,
            g,
            2.0 * s.data.m0,
            2.0 * s.data.m0_gap - s.excess,
        ));
        out.push(BoundCheck::strict(
            &SCALED_DERIVATIVE_SUP,
            pt,
            CheckDomain::Linear,
            s.scaled_derivative(),
            s.data.mu_c / 8.0,
            s.deficit,
        ));
        if i > 0 {
            let p = &samples[i - 1];
            out.push(BoundCheck::strict(
                &SCALED_INCREASING,
                pt,
                CheckDomain::Scaled,
                p.scaled(),
                s.scaled(),
                p.gap - s.gap,
            ));
            out.push(BoundCheck::strict(
                &LOG_DERIVATIVE_DECREASING,
                pt,
                CheckDomain::Linear,
                g,
                p.log_derivative(),
                p.excess - s.excess,
            ));
            out.push(BoundCheck::strict(
                &SCALED_DERIVATIVE_INCREASING,
                pt,
                CheckDomain::Linear,
                p.scaled_derivative(),
                s.scaled_derivative(),
                p.deficit - s.deficit,
            ));
        }
    }
    let one = EtaSample::new(NEAR_ONE, t)?;
    let base = one.data.base.scaled_eta();
    let pt = Point::kt(NEAR_ONE, t);
    let rel = |x: f64| LIMIT_TOLERANCE * x.abs();
    out.push(BoundCheck::limit(
        &SCALED_LIMIT_ONE,
        pt,
        CheckDomain::Scaled,
        one.scaled(),
        base,
        Side::Above,
        rel(base),
    ));
    let ceiling = 2.0 * one.data.m0;
    out.push(BoundCheck::limit(
        &LOG_DERIVATIVE_LIMIT_ONE,
        pt,
        CheckDomain::Linear,
        one.log_derivative(),
        ceiling,
        Side::Below,
        rel(ceiling),
    ));
    let start = ceiling * base;
    out.push(BoundCheck::limit(
        &SCALED_DERIVATIVE_LIMIT_ONE,
        pt,
        CheckDomain::Linear,
        one.scaled_derivative(),
        start,
        Side::Above,
        rel(start),
    ));
    // Far enough that e^{−E} is negligible against the tolerance.
    let k_far = (30.0 / one.data.mu_c).max(2.0);
    let far = EtaSample::new(k_far, t)?;
    let pt = Point::kt(k_far, t);
    out.push(BoundCheck::limit(
        &SCALED_LIMIT_INF,
        pt,
        CheckDomain::Scaled,
        far.scaled(),
        1.0 / 16.0,
        Side::Below,
        rel(1.0 / 16.0),
    ));
    let floor = 2.0 * far.data.mu_c;
    out.push(BoundCheck::limit(
        &LOG_DERIVATIVE_LIMIT_INF,
        pt,
        CheckDomain::Linear,
        far.log_derivative(),
        floor,
        Side::Above,
        rel(floor),
    ));
    let sup = far.data.mu_c / 8.0;
    out.push(BoundCheck::limit(
        &SCALED_DERIVATIVE_LIMIT_INF,
        pt,
        CheckDomain::Linear,
        far.scaled_derivative(),
        sup,
        Side::Below,
        rel(sup),
    ));
    Ok(out)
}

/// `(ln λ(K) − π(K − 1))/(K − 1)` and `ln λ(K)` at `K`. Near 1 `ln λ` is
/// small and taken directly; beyond, the nome expansion keeps the
/// difference from `π` free of cancellation.
fn lambda_excess(k: f64) -> Result<(f64, f64)> {
    let kd = Dilatation::new(k)?;
    let h = k - 1.0;
    if k < 2.0 {
        let l = lambda_log(kd)?;
        return Ok(((l - PI * h) / h, l));
    }
    let d = PointData::new(kd, 1.0)?;
    let ell = d.expansion.ln_scaled_eta();
    Ok(((PI - LN_16 + ell) / h, d.ln_eta()))
}

/// Monotonicity, convexity and limits of `ln λ(K)/(K − 1)` and its shifted
/// form, along increasing `ks` above 1.
pub fn lambda_versus_k(ks: &[f64], c: &Constants) -> Result<Vec<BoundCheck>> {
    let excess = ks.iter().map(|&k| lambda_excess(k).map(|e| e.0)).collect::<Result<Vec<_>>>()?;
    let shifted: Vec<f64> = ks.iter().zip(&excess).map(|(&k, &e)| e - c.b / k).collect();
    let mut out = Vec::new();
    for i in 1..ks.len() {
        let pt = Point::k(ks[i]);
        let (f0, f1) = (PI + excess[i - 1], PI + excess[i]);
        out.push(BoundCheck::strict(
            &LAMBDA_RATIO_DECREASING,
            pt,
            CheckDomain::Linear,
            f1,
            f0,
            excess[i - 1] - excess[i],
        ));
        let (g0, g1) = (PI - c.b + shifted[i - 1], PI - c.b + shifted[i]);
        out.push(BoundCheck::strict(
            &LAMBDA_SHIFTED_INCREASING,
            pt,
            CheckDomain::Linear,
            g0,
            g1,
            shifted[i] - shifted[i - 1],
        ));
        if i + 1 < ks.len() {
            let left = (excess[i] - excess[i - 1]) / (ks[i] - ks[i - 1]);
            let right = (excess[i + 1] - excess[i]) / (ks[i + 1] - ks[i]);
            out.push(BoundCheck::strict(
                &LAMBDA_RATIO_CONVEX,
                pt,
                CheckDomain::Linear,
                left,
                right,
                right - left,
            ));
        }
    }
    let (e_one, _) = lambda_excess(NEAR_ONE)?;
    let pt = Point::k(NEAR_ONE);
    out.push(BoundCheck::limit(
        &LAMBDA_RATIO_LIMIT_ONE,
        pt,
        CheckDomain::Linear,
        PI + e_one,
        c.a,
        Side::Below,
        LIMIT_TOLERANCE * c.a,
    ));
    // The shifted ratio vanishes to second order at K = 1, so its sign is
    // only resolvable a little further out.
    let (e_one, _) = lambda_excess(SHIFTED_NEAR_ONE)?;
    let g_one = e_one - c.b / SHIFTED_NEAR_ONE + PI - c.b;
    let pt = Point::k(SHIFTED_NEAR_ONE);
    out.push(BoundCheck::limit(
        &LAMBDA_SHIFTED_LIMIT_ONE,
        pt,
        CheckDomain::Linear,
        g_one,
        0.0,
        Side::Above,
        LIMIT_TOLERANCE,
    ));
    let (e_far, _) = lambda_excess(1e3)?;
    out.push(BoundCheck::limit(
        &LAMBDA_RATIO_LIMIT_INF,
        Point::k(1e3),
        CheckDomain::Linear,
        PI + e_far,
        PI,
        Side::Above,
        LIMIT_TOLERANCE * PI,
    ));
    let (e_far, _) = lambda_excess(1e4)?;
    let lim = PI - c.b;
    let value = lim + e_far - c.b / 1e4;
    out.push(BoundCheck::limit(
        &LAMBDA_SHIFTED_LIMIT_INF,
        Point::k(1e4),
        CheckDomain::Linear,
        value,
        lim,
        Side::Below,
        LIMIT_TOLERANCE * lim.abs(),
    ));
    let root_tol = 1e-4;
    let near = 1.0 + 1e-7;
    let (e, _) = lambda_excess(near)?;
    out.push(BoundCheck::limit(
        &LAMBDA_ROOT_LIMIT_ONE,
        Point::k(near),
        CheckDomain::Log,
        PI + e,
        c.a,
        Side::Below,
        root_tol * c.a,
    ));
    let far = 1e5;
    let (_, ln_lam) = lambda_excess(far)?;
    out.push(BoundCheck::limit(
        &LAMBDA_ROOT_LIMIT_INF,
        Point::k(far),
        CheckDomain::Log,
        ln_lam / far,
        PI,
        Side::Below,
        root_tol * PI,
    ));
    Ok(out)
}

/// `ln g` of the power-ratio function and `ln f − 2μ(r')` of the root
/// function at `K`.
fn power_sample(k: f64, t: f64) -> Result<(f64, f64, PointData)> {
    let d = PointData::new(Dilatation::new(k)?, t)?;
    let ln_g = -k * d.ln_a() + d.ln_b() / k + 0.5 * d.ln_power_ratio();
    let w = d.expansion.ln_scaled_eta() - LN_16 + 2.0 * d.m0 - t.ln();
    Ok((ln_g, w / k, d))
}

/// Monotonicity and limits of the power-ratio function `g(K)` and of the
/// root function `f(K)` along increasing `ks` above 1, in log form.
pub fn power_versus_k(t: f64, ks: &[f64]) -> Result<Vec<BoundCheck>> {
    let samples = ks.iter().map(|&k| power_sample(k, t)).collect::<Result<Vec<_>>>()?;
    let mut out = Vec::new();
    for i in 1..samples.len() {
        let pt = Point::kt(ks[i], t);
        let (g0, f0, _) = &samples[i - 1];
        let (g1, f1, d) = &samples[i];
        out.push(BoundCheck::strict(&POWER_RATIO_DECREASING, pt, CheckDomain::Log, *g1, *g0, g0 - g1));
        let base = 2.0 * d.mu_c;
        out.push(BoundCheck::strict(
            &ROOT_DECREASING,
            pt,
            CheckDomain::Log,
            base + f1,
            base + f0,
            f0 - f1,
        ));
    }
    let (g, f, d) = power_sample(NEAR_ONE, t)?;
    let pt = Point::kt(NEAR_ONE, t);
    let ln_ba = d.ln_b() - d.ln_a();
    out.push(BoundCheck::limit(
        &POWER_RATIO_LIMIT_ONE,
        pt,
        CheckDomain::Log,
        g,
        ln_ba,
        Side::Below,
        LIMIT_TOLERANCE,
    ));
    let base = 2.0 * d.mu_c;
    out.push(BoundCheck::limit(
        &ROOT_LIMIT_ONE,
        pt,
        CheckDomain::Log,
        base + f,
        2.0 * d.m0,
        Side::Below,
        LIMIT_TOLERANCE,
    ));
    let far = 1e4;
    let (g, _, _) = power_sample(far, t)?;
    let quarter = -(4.0_f64).ln();
    out.push(BoundCheck::limit(
        &POWER_RATIO_LIMIT_INF,
        Point::kt(far, t),
        CheckDomain::Log,
        g,
        quarter,
        Side::Above,
        LIMIT_TOLERANCE,
    ));
    let far = 1e5;
    let (_, f, d) = power_sample(far, t)?;
    let base = 2.0 * d.mu_c;
    out.push(BoundCheck::limit(
        &ROOT_LIMIT_INF,
        Point::kt(far, t),
        CheckDomain::Log,
        base + f,
        base,
        Side::Above,
        LIMIT_TOLERANCE,
    ));
    Ok(out)
}
