use std::f64::consts::{FRAC_PI_2, PI};

use crate::distortion::{eta, eta_expansion, small_ratio_threshold, Dilatation, EtaExpansion, OVERFLOW_EXPONENT};
use crate::elliptic::{ellint_k, UnitRadius};
use crate::error::{domain, Result};
use crate::modulus::mu;

use super::check::{BoundCheck, CheckDomain, Inequality, Point, STRICT_RELATIVE_TOLERANCE};
use super::constants::{Constants, LN_16};

/// Nome below which margins of order `q²` or smaller are reported scaled.
const LINEAR_NOME: f64 = 1e-3;

macro_rules! inequalities {
    ($($id:ident = $name:literal, $formula:literal;)*) => {
        $(pub(crate) const $id: Inequality = Inequality { name: $name, formula: $formula };)*
    };
}

inequalities! {
    LAMBDA_TAYLOR_LOWER = "lambda_taylor_lower", "1 + a(K-1) + a(a-1)(K-1)^2/2 + c(K-1)^3 < lambda(K), K > 1";
    LAMBDA_TAYLOR_RATIO = "lambda_taylor_ratio", "c < (lambda(K) - 1 - a(K-1) - a(a-1)(K-1)^2/2) / (K-1)^3, K > 1";
    LAMBDA_TAYLOR_UPPER = "lambda_taylor_upper", "lambda(K) < 1 + a(K-1) + a(a-1)(K-1)^2/2 + c1(K-1)^3, 1 < K < 2";
    LAMBDA_TWO_CLOSED_FORM = "lambda_two_closed_form", "lambda(2) = 4 sqrt2 (sqrt2 + 1)^2";
    LAMBDA_LINEAR_UPPER = "lambda_linear_upper", "lambda(K) < 1 + (a + delta)(K-1), 1 < K <= K0(delta)";
    LAMBDA_EXP_LOWER_PI = "lambda_exp_lower_pi", "e^{pi(K-1)} < lambda(K), K > 1";
    LAMBDA_EXP_LOWER_B = "lambda_exp_lower_b", "e^{b(K-1/K)} < lambda(K), K > 1";
    LAMBDA_EXP_UPPER_A = "lambda_exp_upper_a", "lambda(K) < e^{a(K-1)}, K > 1";
    LAMBDA_EXP_UPPER_PI_B = "lambda_exp_upper_pi_b", "lambda(K) < e^{(pi + b/K)(K-1)}, K > 1";
    LAMBDA_SANDWICH_LOWER = "lambda_sandwich_lower", "e^{piK}/16 - 1/2 + c1(K) e^{-piK} < lambda(K), c1(K) = 1/4 + 1/(4e^{-2piK} + 1)";
    LAMBDA_SANDWICH_UPPER = "lambda_sandwich_upper", "lambda(K) < e^{piK}/16 - 1/2 + c2(K) e^{-piK}, c2 = (1 + 4(5q^4 + 14q^2 + 5)/(q^6 + 7q^4 + 7q^2 + 1))/16, q = e^{-piK}";
    LAMBDA_SANDWICH_C1_FLOOR = "lambda_sandwich_c1_floor", "21/16 - c < c1(K), c = (68 + e^{2pi})/(16(4 + e^{2pi})), K > 1";
    LAMBDA_SANDWICH_C2_CEILING = "lambda_sandwich_c2_ceiling", "c2(K) < 21/16";
    ETA_EXP_LOWER = "eta_exp_lower", "t e^{2(K-1)mu(r')} < eta_K(t)";
    ETA_EXP_UPPER = "eta_exp_upper", "eta_K(t) < t e^{4(K-1)K(r)K'(r)/pi}";
    ETA_ADDITIVE_LOWER = "eta_additive_lower", "t + t(2K'(r)/pi)^2 (e^{2(K-1)mu(r')} - 1) < eta_K(t)";
    ETA_ADDITIVE_UPPER = "eta_additive_upper", "eta_K(t) < t + e^{2mu(r')}(e^{2(K-1)mu(r')} - 1)/16";
    LAMBDA_GAP_LOWER = "lambda_gap_lower", "1 + c(e^{piK} - e^{pi}) < lambda(K), c = (2K(1/sqrt2)/pi)^2 e^{-pi}";
    LAMBDA_GAP_UPPER = "lambda_gap_upper", "lambda(K) < 1 + (e^{piK} - e^{pi})/16";
    ETA_SMALL_BOUND = "eta_small_bound", "eta_K(t) < T(1) for t < T(K), T(K) = mu^{-1}(log2/(2K))^{-2} - 1";
    ETA_SANDWICH_LOWER = "eta_sandwich_lower", "e^E/16 - 1/2 + c1 e^{-E} < eta_K(t) for e^E >= 2, E = 2K mu(r'), c1 = 1/4 + 1/(4e^{-2E} + 1)";
    ETA_SANDWICH_UPPER = "eta_sandwich_upper", "eta_K(t) < e^E/16 - 1/2 + c2 e^{-E}, c2 = (1 + 4(5q^4 + 14q^2 + 5)/(q^6 + 7q^4 + 7q^2 + 1))/16, q = e^{-E}";
    ETA_C1_FLOOR = "eta_c1_floor", "1/4 + 1/(4e^{-4mu(r')} + 1) < c1(t, K), K > 1";
    ETA_C1_CONSTANT = "eta_c1_constant", "9/20 < 1/4 + 1/(4e^{-4mu(r')} + 1)";
    ETA_C2_MIDDLE = "eta_c2_middle", "c2(t, K) < 5/16 + 1/(4e^{-4K mu(r')} + 1)";
    ETA_C2_CEILING = "eta_c2_ceiling", "5/16 + 1/(4e^{-4K mu(r')} + 1) < 21/16";
    ETA_POWER_LOWER = "eta_power_lower", "16^{1-1/K} < eta_K(t) / (t^{1/K}(1+t)^{K-1/K}), K > 1";
    ETA_POWER_SECANT = "eta_power_secant", "eta_K(t) / (t^{1/K}(1+t)^{K-1/K}) < 16^{1-1/K}(1 + ((1+r)^2 - 1)(K-1)), 1 < K < 2";
    ETA_AB_LOWER = "eta_ab_lower", "A^{2K} B^{-2/K} / 16 < eta_K(t) / (t^{1/K}(1+t)^{K-1/K}), A = r' e^{mu(r')}, B = r e^{2K(r)K'(r)/pi - mu(r')}";
    ETA_AB_UPPER = "eta_ab_upper", "eta_K(t) / (t^{1/K}(1+t)^{K-1/K}) < A^{2(K-1)} B^{2(1-1/K)}";
    ETA_AB_CEILING = "eta_ab_ceiling", "A^{2(K-1)} B^{2(1-1/K)} <= 16^{K-1} c^{2(1-1/K)}, c = exp(2K(1/sqrt2)^2/pi)/8";
    ETA_KK_LOWER = "eta_kk_lower", "t e^{2(K mu(r') - 2K(r)K'(r)/pi)} < eta_K(t)";
    ETA_KK_UPPER = "eta_kk_upper", "eta_K(t) < t e^{4(K-1)K(r)K'(r)/pi}";
    ETA_CHAIN_FLOOR = "eta_chain_floor", "16^{1-1/K} < e^{2(1-1/K)(2K(r)K'(r)/pi + log(rr'))}";
    ETA_CHAIN_LOWER = "eta_chain_lower", "e^{2(1-1/K)(2K(r)K'(r)/pi + log(rr'))} < eta_K(t) / (t^{1/K}(1+t)^{K-1/K})";
    ETA_CHAIN_UPPER = "eta_chain_upper", "eta_K(t) / (t^{1/K}(1+t)^{K-1/K}) < e^{2(K-1)(mu(r') + log r') + 2(1-1/K)(2K(r)K'(r)/pi + log(rr'))}";
    LAMBDA_LOG2_LOWER = "lambda_log2_lower", "e^{(K-1)(log2 + (a - log2)/K)} < lambda(K)";
    LAMBDA_LOG2_UPPER = "lambda_log2_upper", "lambda(K) < e^{(K-1)(pi + (a - log2)/K)}";
    ETA_LOG_CONCAVE = "eta_log_concave", "p log eta_K(t) + (1-p) log eta_L(t) < log eta_{pK+(1-p)L}(t), K != L";
    ETA_PLUS_ONE_LOG_CONVEX = "eta_plus_one_log_convex", "log(1 + eta_{pK+(1-p)L}(t)) < p log(1 + eta_K(t)) + (1-p) log(1 + eta_L(t)), K != L";
}

/// Quantities shared by every bound at one `(K, t)`.
#[derive(Debug, Clone, Copy)]
pub struct PointData {
    pub k: f64,
    pub t: f64,
    /// `r = √(t/(1+t))`.
    pub r: UnitRadius,
    /// `μ(r)`.
    pub mu_r: f64,
    /// `μ(r')`.
    pub mu_c: f64,
    /// `K(r')`.
    pub k_c: f64,
    /// `m₀ = (2/π) K(r) K(r')`.
    pub m0: f64,
    /// `m₀ − μ(r')`, without cancellation.
    pub m0_gap: f64,
    pub ln_r: f64,
    pub ln_r_prime: f64,
    /// Expansion of `η_K(t)`.
    pub expansion: EtaExpansion,
    /// Expansion of `η₁(t) = t`.
    pub base: EtaExpansion,
    /// `η_K(t)`, or `+∞` past the overflow exponent.
    pub eta: f64,
}

impl PointData {
    pub fn new(k: Dilatation, t: f64) -> Result<Self> {
        if !(t > 0.0) || t.is_infinite() {
            return Err(domain("bounds", format!("t = {t} must be finite and positive")));
        }
        let r = UnitRadius::from_ratio(t)?;
        let k_r = ellint_k(r)?;
        let k_c = ellint_k(r.complement())?;
        let expansion = eta_expansion(k, t)?;
        let eta = if expansion.exponent <= OVERFLOW_EXPONENT {
            eta(k, t)?
        } else {
            f64::INFINITY
        };
        Ok(Self {
            k: k.value(),
            t,
            r,
            mu_r: mu(r)?,
            mu_c: mu(r.complement())?,
            k_c,
            m0: 2.0 / PI * k_r * k_c,
            m0_gap: 2.0 * k_r * (k_c - FRAC_PI_2) * (k_c + FRAC_PI_2) / (PI * k_c),
            ln_r: -0.5 * (1.0 / t).ln_1p(),
            ln_r_prime: -0.5 * t.ln_1p(),
            expansion,
            base: eta_expansion(Dilatation::new(1.0)?, t)?,
            eta,
        })
    }

    fn point(&self) -> Point {
        Point::kt(self.k, self.t)
    }

    fn h(&self) -> f64 {
        self.k - 1.0
    }

    pub fn ln_eta(&self) -> f64 {
        self.expansion.ln_eta()
    }

    /// `ln(16 e^{−E} η_K) − ln(16 e^{−2μ(r')} t)`, the growth of the scaled
    /// distortion from `K = 1`.
    pub fn scaled_growth(&self) -> f64 {
        self.expansion.ln_scaled_eta() - self.base.ln_scaled_eta()
    }

    /// `ln R` with `R = η_K(t) / (t^{1/K} (1+t)^{K−1/K})`.
    pub fn ln_power_ratio(&self) -> f64 {
        self.expansion.ln_scaled_eta() - LN_16 + 2.0 * self.k * (self.mu_c + self.ln_r_prime) + (1.0 / self.t).ln_1p() / self.k
    }

    /// `ln A = ln r' + μ(r')`.
    pub fn ln_a(&self) -> f64 {
        self.ln_r_prime + self.mu_c
    }

    /// `ln B = ln r + m₀ − μ(r')`.
    pub fn ln_b(&self) -> f64 {
        self.ln_r + self.m0_gap
    }

    /// `(2K(r')/π)² − 1`.
    fn kappa_sq_minus_one(&self) -> f64 {
        let km1 = (self.k_c - FRAC_PI_2) / FRAC_PI_2;
        km1 * (km1 + 2.0)
    }
}

fn require_above_one(function: &'static str, k: Dilatation) -> Result<()> {
    if k.value() <= 1.0 {
        return Err(domain(function, format!("K = {} must exceed 1", k.value())));
    }
    Ok(())
}

fn lambda_data(function: &'static str, k: Dilatation) -> Result<PointData> {
    require_above_one(function, k)?;
    PointData::new(k, 1.0)
}

/// Cubic Taylor-type bounds for `λ(K)`.
pub fn lambda_taylor_bounds(k: Dilatation, c: &Constants) -> Result<Vec<BoundCheck>> {
    Ok(lambda_taylor_at(&lambda_data("lambda_taylor_bounds", k)?, c))
}

pub(crate) fn lambda_taylor_at(d: &PointData, c: &Constants) -> Vec<BoundCheck> {
    let pt = Point::k(d.k);
    let h = d.h();
    let p2 = c.a * h + c.a1 * h * h;
    let p3 = p2 + c.c_taylor * h.powi(3);
    let ln_lam = d.ln_eta();
    let lam = d.eta;
    let mut out = Vec::with_capacity(4);
    if lam.is_finite() {
        out.push(BoundCheck::strict_or_log(&LAMBDA_TAYLOR_LOWER, pt, 1.0 + p3, lam, || {
            (p3.ln_1p(), ln_lam, ln_lam - p3.ln_1p())
        }));
        let f = (lam - 1.0 - p2) / h.powi(3);
        let margin = ((lam - 1.0) - p3) / h.powi(3);
        out.push(BoundCheck::strict(
            &LAMBDA_TAYLOR_RATIO,
            pt,
            CheckDomain::Linear,
            c.c_taylor,
            f,
            margin,
        ));
    } else {
        out.push(BoundCheck::strict(
            &LAMBDA_TAYLOR_LOWER,
            pt,
            CheckDomain::Log,
            p3.ln_1p(),
            ln_lam,
            ln_lam - p3.ln_1p(),
        ));
        let ln_f = ln_lam + (-(p2.ln_1p() - ln_lam).exp_m1()).ln() - 3.0 * h.ln();
        let ln_c = c.c_taylor.ln();
        out.push(BoundCheck::strict(
            &LAMBDA_TAYLOR_RATIO,
            pt,
            CheckDomain::Log,
            ln_c,
            ln_f,
            ln_f - ln_c,
        ));
    }
    if d.k < 2.0 {
        let cubic = p2 + c.c1_taylor * h.powi(3);
        out.push(BoundCheck::strict_or_log(&LAMBDA_TAYLOR_UPPER, pt, lam, 1.0 + cubic, || {
            (ln_lam, cubic.ln_1p(), cubic.ln_1p() - ln_lam)
        }));
    }
    if d.k == 2.0 {
        out.push(BoundCheck::close(&LAMBDA_TWO_CLOSED_FORM, pt, lam, c.lambda_two, 1e-13));
    }
    out
}

/// `λ(K) < 1 + (a + δ)(K − 1)` for `1 < K ≤ K₀(δ)`.
pub fn lambda_linear_bounds(k: Dilatation, delta: f64, c: &Constants) -> Result<Vec<BoundCheck>> {
    if !(delta > 0.0) || delta.is_infinite() {
        return Err(domain(
            "lambda_linear_bounds",
            format!("delta = {delta} must be finite and positive"),
        ));
    }
    let k0 = c.k0(delta);
    if k.value() > k0 {
        return Err(domain(
            "lambda_linear_bounds",
            format!("K = {} exceeds K0({delta}) = {k0}", k.value()),
        ));
    }
    Ok(vec![lambda_linear_at(&lambda_data("lambda_linear_bounds", k)?, delta, c)])
}

pub(crate) fn lambda_linear_at(d: &PointData, delta: f64, c: &Constants) -> BoundCheck {
    let pt = Point {
        delta: Some(delta),
        ..Point::k(d.k)
    };
    let slope = (c.a + delta) * d.h();
    let ln_lam = d.ln_eta();
    BoundCheck::strict_or_log(&LAMBDA_LINEAR_UPPER, pt, d.eta, 1.0 + slope, || {
        (ln_lam, slope.ln_1p(), slope.ln_1p() - ln_lam)
    })
}

/// Two-sided exponential bounds for `λ(K)`, in log form.
pub fn lambda_exp_bounds(k: Dilatation, c: &Constants) -> Result<Vec<BoundCheck>> {
    Ok(lambda_exp_at(&lambda_data("lambda_exp_bounds", k)?, c))
}

pub(crate) fn lambda_exp_at(d: &PointData, c: &Constants) -> Vec<BoundCheck> {
    let pt = Point::k(d.k);
    let h = d.h();
    let l = d.ln_eta();
    let log = |ineq, lhs: f64, rhs: f64| BoundCheck::strict(ineq, pt, CheckDomain::Log, lhs, rhs, rhs - lhs);
    vec![
        log(&LAMBDA_EXP_LOWER_PI, PI * h, l),
        log(&LAMBDA_EXP_LOWER_B, c.b * (d.k - 1.0 / d.k), l),
        log(&LAMBDA_EXP_UPPER_A, l, c.a * h),
        log(&LAMBDA_EXP_UPPER_PI_B, l, (PI + c.b / d.k) * h),
    ]
}

fn c1_coefficient(q2: f64) -> f64 {
    0.25 + 1.0 / (4.0 * q2 + 1.0)
}

fn c2_denominator(q2: f64) -> f64 {
    ((q2 + 7.0) * q2 + 7.0) * q2 + 1.0
}

fn c2_coefficient(q2: f64) -> f64 {
    (1.0 + 4.0 * ((5.0 * q2 + 14.0) * q2 + 5.0) / c2_denominator(q2)) / 16.0
}

/// `(21/16 − c2) / q²`.
fn c2_deficit(q2: f64) -> f64 {
    ((5.0 * q2 + 30.0) * q2 + 21.0) / (4.0 * c2_denominator(q2))
}

/// `(5/16 + 1/(4q² + 1) − c2) / q²`.
fn c2_middle_gap(q2: f64) -> f64 {
    let y = 4.0 * q2;
    (((y + 13.0) * y + 8.0) * y + 80.0) / ((y + 1.0) * (((y + 28.0) * y + 112.0) * y + 64.0))
}

/// `1/(4q² + 1) − 1/(4q₁² + 1)` for `q < q₁`.
fn c1_growth(q2: f64, q1_2: f64) -> f64 {
    4.0 * (q1_2 - q2) / ((1.0 + 4.0 * q2) * (1.0 + 4.0 * q1_2))
}

/// Lower and upper sandwich around `e^E/16 − 1/2`. The margins are
/// `q³(ρ₂ + 4/(1 + 4q²))` and `q(1/16 − q²(ρ₂ + (21/16 − c2)/q²))`.
fn sandwich_pair(lower: Option<&Inequality>, upper: &Inequality, pt: Point, x: &EtaExpansion, value: f64) -> Vec<BoundCheck> {
    let q = x.nome;
    let q2 = q * q;
    let rho2 = x.scaled_residual;
    let lower_scaled = rho2 + 4.0 / (1.0 + 4.0 * q2);
    let upper_scaled = 1.0 / 16.0 - q2 * (rho2 + c2_deficit(q2));
    let mut out = Vec::with_capacity(2);
    if q >= LINEAR_NOME {
        let lead = x.exponent.exp() / 16.0 - 0.5;
        if let Some(ineq) = lower {
            let lhs = lead + c1_coefficient(q2) * q;
            out.push(BoundCheck::strict(ineq, pt, CheckDomain::Linear, lhs, value, q * q2 * lower_scaled));
        }
        let rhs = lead + c2_coefficient(q2) * q;
        out.push(BoundCheck::strict(upper, pt, CheckDomain::Linear, value, rhs, q * upper_scaled));
    } else {
        if let Some(ineq) = lower {
            out.push(BoundCheck::strict(
                ineq,
                pt,
                CheckDomain::Scaled,
                -4.0 / (1.0 + 4.0 * q2),
                rho2,
                lower_scaled,
            ));
        }
        let lhs = q2 * rho2;
        out.push(BoundCheck::strict(
            upper,
            pt,
            CheckDomain::Scaled,
            lhs,
            c2_coefficient(q2) - 1.25,
            upper_scaled,
        ));
    }
    out
}

/// Sandwich `e^{πK}/16 − 1/2 + c_i(K) e^{−πK}` around `λ(K)`, `K ≥ 1`.
pub fn lambda_sandwich(k: Dilatation, c: &Constants) -> Result<Vec<BoundCheck>> {
    if k.value() < 1.0 {
        return Err(domain("lambda_sandwich", format!("K = {} must be at least 1", k.value())));
    }
    Ok(lambda_sandwich_at(&PointData::new(k, 1.0)?, c))
}

pub(crate) fn lambda_sandwich_at(d: &PointData, c: &Constants) -> Vec<BoundCheck> {
    let pt = Point::k(d.k);
    let x = &d.expansion;
    let q2 = x.nome * x.nome;
    let mut out = sandwich_pair(Some(&LAMBDA_SANDWICH_LOWER), &LAMBDA_SANDWICH_UPPER, pt, x, d.eta);
    if d.k > 1.0 {
        let q1 = d.base.nome;
        let lhs = 21.0 / 16.0 - c.c_sandwich;
        out.push(BoundCheck::strict(
            &LAMBDA_SANDWICH_C1_FLOOR,
            pt,
            CheckDomain::Linear,
            lhs,
            c1_coefficient(q2),
            c1_growth(q2, q1 * q1),
        ));
    }
    let deficit = c2_deficit(q2);
    out.push(if x.nome >= LINEAR_NOME {
        BoundCheck::strict(
            &LAMBDA_SANDWICH_C2_CEILING,
            pt,
            CheckDomain::Linear,
            c2_coefficient(q2),
            21.0 / 16.0,
            q2 * deficit,
        )
    } else {
        BoundCheck::strict(&LAMBDA_SANDWICH_C2_CEILING, pt, CheckDomain::Scaled, -deficit, 0.0, deficit)
    });
    out
}

/// Exponential and additive bounds for `η_K(t)`, `K > 1`; at `t = 1` also
/// the corresponding `λ` bounds.
pub fn eta_linear_exp_bounds(k: Dilatation, t: f64, c: &Constants) -> Result<Vec<BoundCheck>> {
    require_above_one("eta_linear_exp_bounds", k)?;
    Ok(eta_linear_exp_at(&PointData::new(k, t)?, c))
}

pub(crate) fn eta_linear_exp_at(d: &PointData, c: &Constants) -> Vec<BoundCheck> {
    let pt = d.point();
    let h = d.h();
    let ln_t = d.t.ln();
    let ln_eta = d.ln_eta();
    let growth = d.scaled_growth();
    let mut out = vec![
        BoundCheck::strict(&ETA_EXP_LOWER, pt, CheckDomain::Log, ln_t + 2.0 * h * d.mu_c, ln_eta, growth),
        BoundCheck::strict(
            &ETA_EXP_UPPER,
            pt,
            CheckDomain::Log,
            ln_eta,
            ln_t + 2.0 * h * d.m0,
            2.0 * h * d.m0_gap - growth,
        ),
    ];
    // Scaled by e^{−E}: with f = e^{−E} η and f₁ = e^{−2μ(r')} t, the lower
    // bound reads f₁ (1 + (κ² − 1)(1 − e^{−2(K−1)μ(r')})) < f.
    let f1 = d.base.scaled_eta();
    let w = -(-2.0 * h * d.mu_c).exp_m1();
    let kappa = d.kappa_sq_minus_one();
    let lower_lhs = f1 * (1.0 + kappa * w);
    let lower_margin = (d.base.scaled_gap() - d.expansion.scaled_gap()) - f1 * kappa * w;
    let (delta_k, delta_1) = (d.expansion.residual(), d.base.residual());
    out.push(BoundCheck::strict(
        &ETA_ADDITIVE_LOWER,
        pt,
        CheckDomain::Scaled,
        lower_lhs,
        d.expansion.scaled_eta(),
        lower_margin,
    ));
    out.push(BoundCheck::strict(
        &ETA_ADDITIVE_UPPER,
        pt,
        CheckDomain::Residual,
        delta_k,
        delta_1,
        delta_1 - delta_k,
    ));
    if d.t == 1.0 {
        let e = d.expansion.exponent;
        let gap_lhs = (-e).exp() + c.c_lambda_gap * (1.0 - (PI - e).exp());
        out.push(BoundCheck::strict(
            &LAMBDA_GAP_LOWER,
            Point::k(d.k),
            CheckDomain::Scaled,
            gap_lhs,
            d.expansion.scaled_eta(),
            lower_margin,
        ));
        out.push(BoundCheck::strict(
            &LAMBDA_GAP_UPPER,
            Point::k(d.k),
            CheckDomain::Residual,
            delta_k,
            delta_1,
            delta_1 - delta_k,
        ));
    }
    out
}

/// Asymptotic sandwich for `η_K(t)` and its coefficient bounds, `K ≥ 1`.
pub fn eta_sandwich(k: Dilatation, t: f64, c: &Constants) -> Result<Vec<BoundCheck>> {
    if k.value() < 1.0 {
        return Err(domain("eta_sandwich", format!("K = {} must be at least 1", k.value())));
    }
    Ok(eta_sandwich_at(&PointData::new(k, t)?, c))
}

pub(crate) fn eta_sandwich_at(d: &PointData, c: &Constants) -> Vec<BoundCheck> {
    let pt = d.point();
    let x = &d.expansion;
    let q2 = x.nome * x.nome;
    let threshold = Dilatation::new(d.k).ok().and_then(small_ratio_threshold);
    let small = threshold.is_some_and(|tk| d.t < tk);
    let mut out = Vec::with_capacity(6);
    if small {
        out.push(BoundCheck::strict(
            &ETA_SMALL_BOUND,
            pt,
            CheckDomain::Linear,
            d.eta,
            c.small_ratio,
            c.small_ratio - d.eta,
        ));
        out.extend(sandwich_pair(None, &ETA_SANDWICH_UPPER, pt, x, d.eta));
    } else {
        out.extend(sandwich_pair(Some(&ETA_SANDWICH_LOWER), &ETA_SANDWICH_UPPER, pt, x, d.eta));
    }
    if d.k > 1.0 {
        let q1_2 = d.base.nome * d.base.nome;
        let floor = c1_coefficient(q1_2);
        out.push(BoundCheck::strict(
            &ETA_C1_FLOOR,
            pt,
            CheckDomain::Linear,
            floor,
            c1_coefficient(q2),
            c1_growth(q2, q1_2),
        ));
        out.push(BoundCheck::strict(
            &ETA_C1_CONSTANT,
            pt,
            CheckDomain::Linear,
            0.45,
            floor,
            4.0 * (1.0 - q1_2) / (5.0 * (4.0 * q1_2 + 1.0)),
        ));
    }
    let middle = 5.0 / 16.0 + 1.0 / (4.0 * q2 + 1.0);
    if x.nome >= LINEAR_NOME {
        out.push(BoundCheck::strict(
            &ETA_C2_MIDDLE,
            pt,
            CheckDomain::Linear,
            c2_coefficient(q2),
            middle,
            q2 * c2_middle_gap(q2),
        ));
        out.push(BoundCheck::strict(
            &ETA_C2_CEILING,
            pt,
            CheckDomain::Linear,
            middle,
            21.0 / 16.0,
            4.0 * q2 / (1.0 + 4.0 * q2),
        ));
    } else {
        let gap = c2_middle_gap(q2);
        out.push(BoundCheck::strict(&ETA_C2_MIDDLE, pt, CheckDomain::Scaled, -gap, 0.0, gap));
        let ceiling = 4.0 / (1.0 + 4.0 * q2);
        out.push(BoundCheck::strict(&ETA_C2_CEILING, pt, CheckDomain::Scaled, -ceiling, 0.0, ceiling));
    }
    out
}

/// Power-type bounds for `η_K(t)`, `K > 1`, in log form; at `t = 1` also
/// the exponential `λ` chain.
pub fn eta_power_bounds(k: Dilatation, t: f64, c: &Constants) -> Result<Vec<BoundCheck>> {
    require_above_one("eta_power_bounds", k)?;
    Ok(eta_power_at(&PointData::new(k, t)?, c))
}

pub(crate) fn eta_power_at(d: &PointData, c: &Constants) -> Vec<BoundCheck> {
    let pt = d.point();
    let k = d.k;
    let h = d.h();
    let w = 1.0 - 1.0 / k;
    let ln_r = d.ln_power_ratio();
    let (ln_a, ln_b) = (d.ln_a(), d.ln_b());
    let log = |ineq, lhs: f64, rhs: f64| BoundCheck::strict(ineq, pt, CheckDomain::Log, lhs, rhs, rhs - lhs);
    let mut out = Vec::with_capacity(12);
    out.push(log(&ETA_POWER_LOWER, w * LN_16, ln_r));
    if k < 2.0 {
        let r = d.r.r();
        out.push(log(&ETA_POWER_SECANT, ln_r, w * LN_16 + (r * (2.0 + r) * h).ln_1p()));
    }
    let ab_upper = 2.0 * h * ln_a + 2.0 * w * ln_b;
    out.push(log(&ETA_AB_LOWER, 2.0 * k * ln_a - 2.0 / k * ln_b - LN_16, ln_r));
    out.push(log(&ETA_AB_UPPER, ln_r, ab_upper));
    let ceiling = h * LN_16 + 2.0 * w * c.c_power.ln();
    out.push(BoundCheck::non_strict(
        &ETA_AB_CEILING,
        pt,
        CheckDomain::Log,
        ab_upper,
        ceiling,
        STRICT_RELATIVE_TOLERANCE,
    ));
    let ln_t = d.t.ln();
    let ln_eta = d.ln_eta();
    let kk_margin = d.expansion.ln_scaled_eta() - LN_16 - ln_t + 2.0 * d.m0;
    out.push(BoundCheck::strict(
        &ETA_KK_LOWER,
        pt,
        CheckDomain::Log,
        ln_eta - kk_margin,
        ln_eta,
        kk_margin,
    ));
    out.push(BoundCheck::strict(
        &ETA_KK_UPPER,
        pt,
        CheckDomain::Log,
        ln_eta,
        ln_t + 2.0 * h * d.m0,
        2.0 * h * d.m0_gap - d.scaled_growth(),
    ));
    let chain_core = d.m0 + d.ln_r + d.ln_r_prime;
    let chain = 2.0 * w * chain_core;
    out.push(BoundCheck::strict(
        &ETA_CHAIN_FLOOR,
        pt,
        CheckDomain::Log,
        w * LN_16,
        chain,
        2.0 * w * (chain_core - 0.5 * LN_16),
    ));
    out.push(log(&ETA_CHAIN_LOWER, chain, ln_r));
    out.push(log(&ETA_CHAIN_UPPER, ln_r, 2.0 * h * ln_a + chain));
    if d.t == 1.0 {
        let ln_2 = std::f64::consts::LN_2;
        let slope = (c.a - ln_2) / k;
        let pk = Point::k(k);
        out.push(BoundCheck::strict(
            &LAMBDA_LOG2_LOWER,
            pk,
            CheckDomain::Log,
            h * (ln_2 + slope),
            ln_eta,
            ln_eta - h * (ln_2 + slope),
        ));
        out.push(BoundCheck::strict(
            &LAMBDA_LOG2_UPPER,
            pk,
            CheckDomain::Log,
            ln_eta,
            h * (PI + slope),
            h * (PI + slope) - ln_eta,
        ));
    }
    out
}

/// Log-concavity of `K ↦ η_K(t)` and log-convexity of `K ↦ 1 + η_K(t)`
/// between `K` and `L` with weight `p`.
pub fn log_convexity_check(k: Dilatation, l: Dilatation, t: f64, p: f64) -> Result<Vec<BoundCheck>> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain("log_convexity_check", format!("p = {p} must lie in (0, 1)")));
    }
    if k == l {
        return Err(domain("log_convexity_check", "K and L must differ"));
    }
    if !(t > 0.0) || t.is_infinite() {
        return Err(domain("log_convexity_check", format!("t = {t} must be finite and positive")));
    }
    let (kv, lv) = (k.value(), l.value());
    let m = Dilatation::new(p * kv + (1.0 - p) * lv)?;
    let xk = eta_expansion(k, t)?;
    let xl = eta_expansion(l, t)?;
    let xm = eta_expansion(m, t)?;
    let q = 1.0 - p;
    // ln η = E − ln 16 + ln(16 q η) with E = 2K μ(r') linear in K, so at the
    // exact weighted mean the exponents and the ln 16 terms cancel. Only the
    // scaled remainders carry the margin.
    let pt = Point {
        k: Some(kv),
        l: Some(lv),
        t: Some(t),
        p: Some(p),
        delta: None,
    };
    let concave = xm.ln_scaled_eta() - p * xk.ln_scaled_eta() - q * xl.ln_scaled_eta();
    let convex = p * xk.ln_scaled_eta_plus_one() + q * xl.ln_scaled_eta_plus_one() - xm.ln_scaled_eta_plus_one();
    Ok(vec![
        BoundCheck::strict(
            &ETA_LOG_CONCAVE,
            pt,
            CheckDomain::Log,
            p * xk.ln_eta() + q * xl.ln_eta(),
            xm.ln_eta(),
            concave,
        ),
        BoundCheck::strict(
            &ETA_PLUS_ONE_LOG_CONVEX,
            pt,
            CheckDomain::Log,
            xm.ln_eta_plus_one(),
            p * xk.ln_eta_plus_one() + q * xl.ln_eta_plus_one(),
            convex,
        ),
    ])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dil(k: f64) -> Dilatation {
        Dilatation::new(k).unwrap()
    }

    fn constants() -> Constants {
        Constants::compute().unwrap()
    }

    fn assert_all_pass(checks: &[BoundCheck]) {
        for c in checks {
            assert!(
                c.pass,
                "{} failed at {:?}: lhs {} rhs {} margin {}",
                c.name, c.point, c.lhs, c.rhs, c.margin
            );
        }
    }

    #[test]
    fn coefficient_closed_forms_match_direct_differences() {
        for &q in &[0.5, 0.3, 0.1, 0.04] {
            let q2: f64 = q * q;
            assert!(((21.0 / 16.0 - c2_coefficient(q2)) / q2 - c2_deficit(q2)).abs() < 1e-12);
            let middle = 5.0 / 16.0 + 1.0 / (4.0 * q2 + 1.0);
            assert!(((middle - c2_coefficient(q2)) / q2 - c2_middle_gap(q2)).abs() < 1e-11, "q = {q}");
            let q1_2 = 0.9;
            assert!((c1_coefficient(q2) - c1_coefficient(q1_2) - c1_growth(q2, q1_2)).abs() < 1e-15);
        }
    }

    #[test]
    fn lambda_sandwich_at_one() {
        // λ(1) = 1 lies between 0.99999 and 1.0026.
        let checks = lambda_sandwich(dil(1.0), &constants()).unwrap();
        assert_all_pass(&checks);
        assert!((checks[0].lhs - 0.99999).abs() < 1e-5);
        assert!((checks[1].rhs - 1.0026).abs() < 1e-4);
    }

    #[test]
    fn lambda_sandwich_at_two_in_linear_form() {
        let checks = lambda_sandwich(dil(2.0), &constants()).unwrap();
        assert_all_pass(&checks);
        assert_eq!(checks[0].domain, CheckDomain::Linear);
    }

    #[test]
    fn lambda_sandwich_large_k_in_scaled_form() {
        let checks = lambda_sandwich(dil(100.0), &constants()).unwrap();
        assert_all_pass(&checks);
        assert_eq!(checks[0].domain, CheckDomain::Scaled);
    }

    #[test]
    fn taylor_bounds_hold_and_close_at_two() {
        let c = constants();
        for &k in &[1.01, 1.3, 1.9, 2.0, 5.0, 300.0] {
            let checks = lambda_taylor_bounds(dil(k), &c).unwrap();
            assert_all_pass(&checks);
            assert_eq!(checks.iter().any(|x| x.name == "lambda_two_closed_form"), k == 2.0);
        }
        assert!(lambda_taylor_bounds(dil(1.0), &c).is_err());
    }

    #[test]
    fn linear_bound_at_the_reference_threshold() {
        let c = constants();
        let d = 5.0 - c.a;
        assert_all_pass(&lambda_linear_bounds(dil(c.k0_linear), d, &c).unwrap());
        assert_all_pass(&lambda_linear_bounds(dil(1.03), d, &c).unwrap());
        assert!(lambda_linear_bounds(dil(c.k0_linear + 1e-3), d, &c).is_err());
    }

    #[test]
    fn exponential_bounds() {
        let c = constants();
        for &k in &[1.05, 2.0, 40.0, 1000.0] {
            assert_all_pass(&lambda_exp_bounds(dil(k), &c).unwrap());
        }
    }

    #[test]
    fn eta_families_on_a_small_grid() {
        let c = constants();
        for &k in &[1.0, 1.2, 2.0, 7.0, 100.0] {
            for &t in &[1e-4, 0.01, 1.0, 30.0, 1e4] {
                assert_all_pass(&eta_sandwich(dil(k), t, &c).unwrap());
                if k > 1.0 {
                    assert_all_pass(&eta_linear_exp_bounds(dil(k), t, &c).unwrap());
                    assert_all_pass(&eta_power_bounds(dil(k), t, &c).unwrap());
                }
            }
        }
    }

    #[test]
    fn small_ratio_branch() {
        let c = constants();
        let k = dil(2.0);
        let tk = small_ratio_threshold(k).unwrap();
        let below = eta_sandwich(k, 0.5 * tk, &c).unwrap();
        assert!(below.iter().any(|x| x.name == "eta_small_bound"));
        assert_all_pass(&below);
        let at = eta_sandwich(k, tk, &c).unwrap();
        assert!(at.iter().any(|x| x.name == "eta_sandwich_lower"));
        assert_all_pass(&at);
    }

    #[test]
    fn additive_margin_matches_direct_difference() {
        // Where both sides are moderate the scaled margin equals e^{−E}
        // times the plain difference.
        let c = constants();
        let d = PointData::new(dil(1.5), 2.0).unwrap();
        let checks = eta_linear_exp_at(&d, &c);
        let lower = checks.iter().find(|x| x.name == "eta_additive_lower").unwrap();
        let kappa = 2.0 * d.k_c / PI;
        let bound = d.t + d.t * kappa * kappa * ((2.0 * 0.5 * d.mu_c).exp() - 1.0);
        let direct = (d.eta - bound) * (-d.expansion.exponent).exp();
        assert!((lower.margin - direct).abs() < 1e-12, "{} vs {}", lower.margin, direct);
    }

    #[test]
    fn lambda_gap_matches_constant() {
        let c = constants();
        let d = PointData::new(dil(1.5), 1.0).unwrap();
        let kappa = 2.0 * d.k_c / PI;
        assert!((kappa * kappa * (-PI).exp() - c.c_lambda_gap).abs() < 1e-15);
        let lam = d.eta;
        let bound = 1.0 + c.c_lambda_gap * ((1.5 * PI).exp() - PI.exp());
        let checks = eta_linear_exp_at(&d, &c);
        let gap = checks.iter().find(|x| x.name == "lambda_gap_lower").unwrap();
        assert!(gap.pass && lam > bound);
    }

    #[test]
    fn log_convexity_examples() {
        assert_all_pass(&log_convexity_check(dil(1.0), dil(3.0), 1.0, 0.5).unwrap());
        assert_all_pass(&log_convexity_check(dil(0.5), dil(2.0), 0.2, 0.3).unwrap());
        assert_all_pass(&log_convexity_check(dil(2.0 - 1e-3), dil(2.0), 5.0, 0.5).unwrap());
        assert!(log_convexity_check(dil(2.0), dil(2.0), 1.0, 0.5).is_err());
        assert!(log_convexity_check(dil(2.0), dil(3.0), 1.0, 1.0).is_err());
    }

    #[test]
    fn power_chain_reduces_to_lambda_chain_at_one() {
        let c = constants();
        let d = PointData::new(dil(3.0), 1.0).unwrap();
        let checks = eta_power_at(&d, &c);
        let upper = checks.iter().find(|x| x.name == "eta_chain_upper").unwrap();
        let lam_upper = checks.iter().find(|x| x.name == "lambda_log2_upper").unwrap();
        // At t = 1: ln R = ln λ − (K − 1/K) ln 2, so the two margins agree.
        assert!((upper.margin - lam_upper.margin).abs() < 1e-12);
    }
}
