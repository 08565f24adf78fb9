//! Distortion functions of K-quasiconformal maps.
//!
//! - `φ_K(r) = μ⁻¹(μ(r)/K)`
//! - `η_K(t) = (s/s')²` with `s = φ_K(r)`, `r = √(t/(1+t))`
//! - `λ(K) = η_K(1)`
//!
//! `η_K(t)` grows like `e^E/16` with `E = 2K μ(r')`. [`EtaExpansion`] carries
//! the exact remainder of that growth in terms of the nome `q = e^{−E}`:
//!
//! `16 q η = θ₄(q)⁴ / A(q)⁴ = 1 − 8q + 20q² − 62q⁴ + 216q⁶ − …`
//!
//! Only even powers follow the linear term, so
//! `η − e^E/16 + 1/2 = q (5/4 + q² ρ₂(q))` with `ρ₂` of order one.

use std::f64::consts::{FRAC_PI_2, LN_2, PI};

use crate::elliptic::{ellint_k, UnitRadius};
use crate::error::{domain, Error, Result};
use crate::modulus::{mu, mu_inverse, mu_inverse_ln};
use crate::nome;

const LN_16: f64 = 4.0 * LN_2;
const PI2_4: f64 = PI * PI / 4.0;

/// Largest exponent `E = 2K μ(r')` for which `η` is returned in linear form.
pub const OVERFLOW_EXPONENT: f64 = 700.0;
/// Nome above which the residual is taken from `η` directly.
const SERIES_NOME: f64 = 0.1;

/// A maximal dilatation `K`, finite and positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Dilatation(f64);

impl Dilatation {
    pub fn new(k: f64) -> Result<Self> {
        if !(k > 0.0) || k.is_infinite() {
            return Err(domain("Dilatation::new", format!("K = {k} must be finite and positive")));
        }
        Ok(Self(k))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn reciprocal(self) -> Self {
        Self(1.0 / self.0)
    }
}

impl TryFrom<f64> for Dilatation {
    type Error = Error;

    fn try_from(k: f64) -> Result<Self> {
        Self::new(k)
    }
}

/// `φ_K(r)`, returned with its complement.
pub fn phi(k: Dilatation, r: UnitRadius) -> Result<UnitRadius> {
    if k.0 == 1.0 || r.r() == 0.0 || r.r_prime() == 0.0 {
        return Ok(r);
    }
    let y = mu(r)? / k.0;
    if y == 0.0 {
        return Ok(UnitRadius::complement(UnitRadius::new(0.0)?));
    }
    mu_inverse(y)
}

/// `∂φ_K(r)/∂r` and `∂φ_K(r)/∂K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiPartials {
    pub d_r: f64,
    pub d_k: f64,
}

/// Partial derivatives of `s = φ_K(r)`, for `0 < r < 1`:
///
/// - `∂s/∂r = s s'² K(s) K'(s) / (r r'² K(r) K'(r))`
/// - `∂s/∂K = (2 / (π K)) s s'² K(s) K'(s)`
pub fn phi_partials(k: Dilatation, r: UnitRadius) -> Result<PhiPartials> {
    if r.r() == 0.0 || r.r_prime() == 0.0 {
        return Err(domain("phi_partials", "r must lie in (0, 1)"));
    }
    let s = phi(k, r)?;
    let ks = ellint_k(s)? * ellint_k(s.complement())?;
    let kr = ellint_k(r)? * ellint_k(r.complement())?;
    let top = s.r() * s.r_prime() * s.r_prime() * ks;
    Ok(PhiPartials {
        d_r: top / (r.r() * r.r_prime() * r.r_prime() * kr),
        d_k: 2.0 / (PI * k.0) * top,
    })
}

fn check_ratio(function: &'static str, t: f64) -> Result<()> {
    if !(t >= 0.0) || t.is_infinite() {
        return Err(domain(function, format!("t = {t} must be finite and non-negative")));
    }
    Ok(())
}

/// `(s, E)` with `s = φ_K(r)` and `E = 2K μ(r') = 2 μ(s')`.
fn image_and_exponent(k: Dilatation, r: UnitRadius) -> Result<(f64, f64)> {
    let mu_r = mu(r)?;
    Ok((mu_r / k.0, 2.0 * k.0 * PI2_4 / mu_r))
}

/// `η_K(t)` for `t ≥ 0`; overflows when `2K μ(r') > 700`.
pub fn eta(k: Dilatation, t: f64) -> Result<f64> {
    check_ratio("eta", t)?;
    if t == 0.0 || k.0 == 1.0 {
        return Ok(t);
    }
    let r = UnitRadius::from_ratio(t)?;
    let (y, e) = image_and_exponent(k, r)?;
    if e > OVERFLOW_EXPONENT {
        return Err(Error::Overflow {
            function: "eta",
            log_value: eta_log(k, t)?,
        });
    }
    let s = mu_inverse(y)?;
    Ok(s.ratio())
}

/// `ln η_K(t)` for `t > 0`, finite for every `K`.
pub fn eta_log(k: Dilatation, t: f64) -> Result<f64> {
    check_ratio("eta_log", t)?;
    if t == 0.0 {
        return Err(domain("eta_log", "ln η is −∞ at t = 0"));
    }
    if k.0 == 1.0 {
        return Ok(t.ln());
    }
    let r = UnitRadius::from_ratio(t)?;
    let l = mu_inverse_ln(mu(r)? / k.0)?;
    Ok(2.0 * (l.ln_r - l.ln_r_prime))
}

/// `λ(K) = η_K(1)`; overflows when `π K > 700`.
pub fn lambda(k: Dilatation) -> Result<f64> {
    eta(k, 1.0).map_err(|e| match e {
        Error::Overflow { log_value, .. } => Error::Overflow {
            function: "lambda",
            log_value,
        },
        other => other,
    })
}

/// `ln λ(K)`.
pub fn lambda_log(k: Dilatation) -> Result<f64> {
    eta_log(k, 1.0)
}

/// `∂η_K(t)/∂K = (4 / (π K)) η K(s) K'(s)` with `s = φ_K(r)`.
pub fn eta_partial_k(k: Dilatation, t: f64) -> Result<f64> {
    check_ratio("eta_partial_k", t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let value = eta(k, t).map_err(|e| match e {
        Error::Overflow { log_value, .. } => Error::Overflow {
            function: "eta_partial_k",
            log_value,
        },
        other => other,
    })?;
    let s = phi(k, UnitRadius::from_ratio(t)?)?;
    Ok(4.0 / (PI * k.0) * value * ellint_k(s)? * ellint_k(s.complement())?)
}

/// `∂η_K(t)/∂K` in the form `(2/μ(r)) K(s')² η`.
pub fn eta_partial_k_complement(k: Dilatation, t: f64) -> Result<f64> {
    check_ratio("eta_partial_k_complement", t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let r = UnitRadius::from_ratio(t)?;
    let s = phi(k, r)?;
    let kc = ellint_k(s.complement())?;
    Ok(2.0 / mu(r)? * kc * kc * eta(k, t)?)
}

/// `T(K) = (r'/r)²` with `r = μ⁻¹(ln 2 / (2K))`, the ratio at which
/// `e^{2K μ(r')} = 2`. `None` when `T` underflows to a subnormal.
pub fn small_ratio_threshold(k: Dilatation) -> Option<f64> {
    let r = mu_inverse(LN_2 / (2.0 * k.0)).ok()?;
    let t = r.complement().ratio();
    t.is_normal().then_some(t)
}

/// `η_K(t)` split into its leading exponential and an exactly scaled remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaExpansion {
    /// `E = 2K μ(r')`.
    pub exponent: f64,
    /// `q = e^{−E}`.
    pub nome: f64,
    /// `ρ₂` in `η − e^E/16 + 1/2 = q (5/4 + q² ρ₂)`.
    pub scaled_residual: f64,
    ln_scaled: f64,
    ln_scaled_plus_one: f64,
}

impl EtaExpansion {
    /// `δ = η − e^E/16 + 1/2`.
    pub fn residual(&self) -> f64 {
        self.nome * (1.25 + self.nome * self.nome * self.scaled_residual)
    }

    /// `e^E δ − 5/4 = q² ρ₂`.
    pub fn residual_excess(&self) -> f64 {
        self.nome * self.nome * self.scaled_residual
    }

    pub fn ln_eta(&self) -> f64 {
        self.exponent - LN_16 + self.ln_scaled
    }

    pub fn ln_eta_plus_one(&self) -> f64 {
        self.exponent - LN_16 + self.ln_scaled_plus_one
    }

    /// `ln(16 q η)`, which tends to 0 as `K → ∞`.
    pub fn ln_scaled_eta(&self) -> f64 {
        self.ln_scaled
    }

    /// `ln(16 q (η + 1))`.
    pub fn ln_scaled_eta_plus_one(&self) -> f64 {
        self.ln_scaled_plus_one
    }

    /// `e^{−E} η`, finite for every `K`.
    pub fn scaled_eta(&self) -> f64 {
        self.ln_scaled.exp() / 16.0
    }

    /// `1/16 − e^{−E} η = q (1/2 − δ)`, without cancellation.
    pub fn scaled_gap(&self) -> f64 {
        if self.nome <= SERIES_NOME {
            self.nome * (0.5 - self.residual())
        } else {
            1.0 / 16.0 - self.scaled_eta()
        }
    }
}

/// Expansion of `η_K(t)` about `e^E/16`, valid for all `K > 0`, `t > 0`.
pub fn eta_expansion(k: Dilatation, t: f64) -> Result<EtaExpansion> {
    check_ratio("eta_expansion", t)?;
    if t == 0.0 {
        return Err(domain("eta_expansion", "t must be positive"));
    }
    let r = UnitRadius::from_ratio(t)?;
    let exponent = 2.0 * k.0 * mu(r.complement())?;
    let nome = (-exponent).exp();
    if nome <= SERIES_NOME {
        Ok(expansion_from_series(exponent))
    } else {
        expansion_from_value(k, t, exponent)
    }
}

pub(crate) fn expansion_from_series(exponent: f64) -> EtaExpansion {
    let q = (-exponent).exp();
    let rho2 = nome::scaled_residual_series(q);
    let delta = q * (1.25 + q * q * rho2);
    EtaExpansion {
        exponent,
        nome: q,
        scaled_residual: rho2,
        ln_scaled: (-8.0 * q + 16.0 * q * delta).ln_1p(),
        ln_scaled_plus_one: (8.0 * q + 16.0 * q * delta).ln_1p(),
    }
}

pub(crate) fn expansion_from_value(k: Dilatation, t: f64, exponent: f64) -> Result<EtaExpansion> {
    let q = (-exponent).exp();
    let value = eta(k, t)?;
    let x = exponent.exp();
    let delta = value - x / 16.0 + 0.5;
    Ok(EtaExpansion {
        exponent,
        nome: q,
        scaled_residual: (delta * x - 1.25) / (q * q),
        ln_scaled: eta_log(k, t)? - exponent + LN_16,
        ln_scaled_plus_one: value.ln_1p() - exponent + LN_16,
    })
}

/// The Schottky-type bound `Ψ(a, z) = η_K(a)` with `K = (1 + |z|)/(1 − |z|)`.
pub fn schottky_psi(a: f64, z_abs: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&z_abs) {
        return Err(domain("schottky_psi", format!("|z| = {z_abs} must lie in [0, 1)")));
    }
    eta(Dilatation::new((1.0 + z_abs) / (1.0 - z_abs))?, a)
}

/// The singular value `k_p` with `μ(k_p) = (π/2) √p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularValue {
    pub p: u32,
    pub k_p: UnitRadius,
}

pub fn singular_value(p: u32) -> Result<SingularValue> {
    if p == 0 {
        return Err(domain("singular_value", "p must be a positive integer"));
    }
    Ok(SingularValue {
        p,
        k_p: mu_inverse(FRAC_PI_2 * f64::from(p).sqrt())?,
    })
}

/// `ln` of the quasisymmetry margin as a function of the excess `h = K − 1`.
fn quasisymmetry_margin_ln(h: f64) -> Result<f64> {
    if !(h > 0.0) || h.is_infinite() {
        return Err(domain("quasisymmetry_margin", format!("K − 1 = {h} must be finite and positive")));
    }
    let s = h.powf(4.0 / 9.0);
    let m = mu(UnitRadius::from_ratio(s)?)?;
    Ok(2.0 * m + (2.0 * h * m).exp_m1().ln() - s.ln())
}

/// `e^{2μ(r)} (e^{2(K−1)μ(r)} − 1) / s` with `s = (K−1)^{4/9}`, `r = √(s/(1+s))`.
pub fn quasisymmetry_margin(k: Dilatation) -> Result<f64> {
    quasisymmetry_margin_excess(k.0 - 1.0)
}

/// [`quasisymmetry_margin`] at `K = 1 + h`, for excesses below the binary64
/// resolution of `K`.
pub fn quasisymmetry_margin_excess(h: f64) -> Result<f64> {
    let l = quasisymmetry_margin_ln(h)?;
    if l > 709.0 {
        return Err(Error::Overflow {
            function: "quasisymmetry_margin",
            log_value: l,
        });
    }
    Ok(l.exp())
}

/// Excess `K₀ − 1` of the point where the quasisymmetry margin crosses 16,
/// located by bisection in `ln(K − 1)` on `[1e-300, 1]`.
pub fn quasisymmetry_threshold() -> f64 {
    let target = 16.0_f64.ln();
    let (mut lo, mut hi) = (1e-300_f64.ln(), 0.0_f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let v = quasisymmetry_margin_ln(mid.exp()).expect("positive excess");
        if v <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo.exp()
}

/// A point at which to evaluate a distortion function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum QueryPoint {
    /// `φ_K(r)`.
    Radius(UnitRadius),
    /// `η_K(t)`.
    Ratio(f64),
}

/// A request for `φ_K(r)`, `η_K(t)` or `ln η_K(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistortionQuery {
    pub k: Dilatation,
    pub point: QueryPoint,
    pub log_space: bool,
}

impl DistortionQuery {
    pub fn evaluate(&self) -> Result<f64> {
        match (self.point, self.log_space) {
            (QueryPoint::Radius(r), false) => phi(self.k, r).map(UnitRadius::r),
            (QueryPoint::Radius(r), true) => phi(self.k, r).map(|s| s.r().ln()),
            (QueryPoint::Ratio(t), false) => eta(self.k, t),
            (QueryPoint::Ratio(t), true) => eta_log(self.k, t),
        }
    }
}
