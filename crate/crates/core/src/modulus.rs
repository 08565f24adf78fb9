//! The Grötzsch ring modulus `μ(r) = (π/2) K(r') / K(r)`, its inverse and the
//! companion function `m(r) = (2/π) r'² K(r) K(r')`.
//!
//! `μ` decreases from `+∞` to `0` on `(0, 1)` and satisfies the reciprocal
//! law `μ(r) μ(r') = π²/4`, so `μ(1/√2) = π/2`.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use crate::elliptic::{ellint_all, ellint_k, UnitRadius};
use crate::error::{domain, Result};
use crate::nome;

const LN_4: f64 = 2.0 * LN_2;
const PI2_4: f64 = PI * PI / 4.0;

/// Above this argument `μ⁻¹` is evaluated from the nome `q = e^{−2y}`.
const NOME_SWITCH: f64 = 10.0;
const MAX_NEWTON_STEPS: usize = 100;

/// `ln r` and `ln r'` of a radius, finite even when `r` underflows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRadius {
    pub ln_r: f64,
    pub ln_r_prime: f64,
}

impl LogRadius {
    fn swap(self) -> Self {
        Self {
            ln_r: self.ln_r_prime,
            ln_r_prime: self.ln_r,
        }
    }
}

/// `m(r)` and `dm/dr`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MValue {
    pub value: f64,
    pub derivative: f64,
}

fn check_open(function: &'static str, r: UnitRadius) -> Result<()> {
    if r.r() == 0.0 || r.r_prime() == 0.0 {
        return Err(domain(function, format!("r = {} must lie in (0, 1)", r.r())));
    }
    Ok(())
}

/// `μ(r)` for `0 < r < 1`.
pub fn mu(r: UnitRadius) -> Result<f64> {
    check_open("mu", r)?;
    Ok(FRAC_PI_2 * ellint_k(r.complement())? / ellint_k(r)?)
}

/// `dμ/dr = −π² / (4 r r'² K(r)²)`.
pub fn mu_derivative(r: UnitRadius) -> Result<f64> {
    check_open("mu_derivative", r)?;
    let k = ellint_k(r)?;
    Ok(-PI2_4 / (r.r() * r.r_prime() * r.r_prime() * k * k))
}

/// `m(r) = (2/π) r'² K(r) K(r')` and `dm/dr = 1/r − (4/(π r)) E(r') K(r)`.
pub fn m_function(r: UnitRadius) -> Result<MValue> {
    check_open("m_function", r)?;
    let v = ellint_all(r)?;
    let rp2 = r.r_prime() * r.r_prime();
    Ok(MValue {
        value: 2.0 / PI * rp2 * v.k * v.k_prime,
        derivative: (1.0 - 4.0 / PI * v.e_prime * v.k) / r.r(),
    })
}

fn check_argument(function: &'static str, y: f64) -> Result<()> {
    if !(y > 0.0) || y.is_infinite() {
        return Err(domain(function, format!("argument {y} must be finite and positive")));
    }
    Ok(())
}

/// The radius `r` with `μ(r) = y`, for finite `y > 0`.
///
/// For `y < π/2` the complement is found first through the reciprocal law,
/// which keeps `r'` accurate when `r` is close to 1.
pub fn mu_inverse(y: f64) -> Result<UnitRadius> {
    check_argument("mu_inverse", y)?;
    if y == FRAC_PI_2 {
        return Ok(UnitRadius::SELF_COMPLEMENTARY);
    }
    if y > FRAC_PI_2 {
        return Ok(inverse_small_radius(y));
    }
    let z = PI2_4 / y;
    if z.is_infinite() {
        return Ok(UnitRadius::from_pair(1.0, 0.0));
    }
    Ok(inverse_small_radius(z).complement())
}

/// `ln r` and `ln r'` for `r = μ⁻¹(y)`, without underflow for large `y`.
pub fn mu_inverse_ln(y: f64) -> Result<LogRadius> {
    check_argument("mu_inverse_ln", y)?;
    if y >= FRAC_PI_2 {
        return Ok(ln_inverse_small_radius(y));
    }
    let z = PI2_4 / y;
    if z.is_infinite() {
        return Ok(LogRadius {
            ln_r: 0.0,
            ln_r_prime: f64::NEG_INFINITY,
        });
    }
    Ok(ln_inverse_small_radius(z).swap())
}

/// `μ⁻¹(y)` for `y ≥ π/2`, where `r ≤ 1/√2`.
fn inverse_small_radius(y: f64) -> UnitRadius {
    if y >= NOME_SWITCH {
        let l = inverse_by_nome(y);
        UnitRadius::from_pair(l.ln_r.exp(), l.ln_r_prime.exp())
    } else {
        inverse_by_newton(y)
    }
}

fn ln_inverse_small_radius(y: f64) -> LogRadius {
    if y >= NOME_SWITCH {
        inverse_by_nome(y)
    } else {
        let r = inverse_by_newton(y);
        LogRadius {
            ln_r: r.r().ln(),
            ln_r_prime: r.r_prime().ln(),
        }
    }
}

/// Exact inversion through the nome `q = e^{−2y}`: `r = 4 √q A² / θ₃²`,
/// `r' = θ₄² / θ₃²`.
pub(crate) fn inverse_by_nome(y: f64) -> LogRadius {
    let q = (-2.0 * y).exp();
    let ln_t3 = nome::ln_theta3(q);
    LogRadius {
        ln_r: LN_4 - y + 2.0 * nome::ln_theta2_reduced(q) - 2.0 * ln_t3,
        ln_r_prime: 2.0 * (nome::ln_theta4(q) - ln_t3),
    }
}

/// Bracket on `ln r` for `μ(r) = y` from the two-sided estimate
/// `((e^{2y} − 1)/(e^{2y} + 1))⁸ < r'² < ((e^{2y} − 2)/(e^{2y} + 2))⁴`.
pub(crate) fn newton_bracket(y: f64) -> (f64, f64) {
    let w = (-2.0 * y).exp();
    let lo2 = -(8.0 * (-2.0 * w / (1.0 + w)).ln_1p()).exp_m1();
    let hi2 = -(4.0 * (-4.0 * w / (1.0 + 2.0 * w)).ln_1p()).exp_m1();
    let slack = 1e-12;
    (0.5 * lo2.ln() - slack, (0.5 * hi2.ln() + slack).min(0.0))
}

/// Safeguarded Newton iteration on `u = ln r`, using
/// `dμ/d(ln r) = −π² / (4 r'² K(r)²)`.
pub(crate) fn inverse_by_newton(y: f64) -> UnitRadius {
    let (mut lo, mut hi) = newton_bracket(y);
    let mut u = (LN_4 - y).clamp(lo, hi);
    let mut best = radius_from_log(u);
    for _ in 0..MAX_NEWTON_STEPS {
        let r = radius_from_log(u);
        best = r;
        if r.r_prime() == 0.0 || r.r() == 0.0 {
            let mid = 0.5 * (lo + hi);
            if (mid - u).abs() <= f64::EPSILON * u.abs() {
                break;
            }
            u = mid;
            continue;
        }
        let k = ellint_k(r).expect("r < 1");
        let kp = ellint_k(r.complement()).expect("r > 0");
        let g = FRAC_PI_2 * kp / k - y;
        if g == 0.0 {
            break;
        }
        if g > 0.0 {
            lo = lo.max(u);
        } else {
            hi = hi.min(u);
        }
        let slope = -PI2_4 / (r.r_prime() * r.r_prime() * k * k);
        let mut next = u - g / slope;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let tol = 2.0 * f64::EPSILON * u.abs().max(f64::MIN_POSITIVE);
        if (next - u).abs() <= tol || hi - lo <= tol {
            best = radius_from_log(next);
            break;
        }
        u = next;
    }
    best
}

fn radius_from_log(u: f64) -> UnitRadius {
    UnitRadius::new(u.exp().min(1.0)).expect("exp of a non-positive number")
}
