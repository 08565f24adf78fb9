//! Complete elliptic integrals of the first and second kind.
//!
//! Everything here is parameterised by the modulus `r` (not the parameter
//! `m = r²`), and every value carries its complement `r' = √(1 − r²)`.
//! Near `r = 1` the complement is the quantity that matters, so it is stored
//! alongside `r` instead of being recomputed from it.
//!
//! Both integrals come from one arithmetic-geometric mean sweep:
//!
//! - `K(r) = π / (2 · AGM(1, r'))`
//! - `E(r) = K(r) · (1 − Σ 2ⁿ⁻¹ cₙ²)`

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use crate::error::{domain, Result};

const MAX_AGM_STEPS: usize = 40;

/// A modulus in `[0, 1]` together with its complement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitRadius {
    r: f64,
    r_prime: f64,
}

impl UnitRadius {
    /// The self-complementary modulus `1/√2`, with `r == r'` exactly.
    pub const SELF_COMPLEMENTARY: UnitRadius = UnitRadius {
        r: FRAC_1_SQRT_2,
        r_prime: FRAC_1_SQRT_2,
    };

    /// Builds a radius from `r`, computing `r' = √((1 − r)(1 + r))`.
    pub fn new(r: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&r) {
            return Err(domain("UnitRadius::new", format!("r = {r} is not in [0, 1]")));
        }
        if r == FRAC_1_SQRT_2 {
            return Ok(Self::SELF_COMPLEMENTARY);
        }
        Ok(Self {
            r,
            r_prime: ((1.0 - r) * (1.0 + r)).sqrt(),
        })
    }

    /// Builds a radius from its complement `r'`; use this when `r` is close to 1.
    pub fn from_complement(r_prime: f64) -> Result<Self> {
        Self::new(r_prime)
            .map(UnitRadius::complement)
            .map_err(|_| domain("UnitRadius::from_complement", format!("r' = {r_prime} is not in [0, 1]")))
    }

    /// The radius with `r / r' = √t`, i.e. `r = √(t/(1+t))`, `r' = 1/√(1+t)`.
    pub fn from_ratio(t: f64) -> Result<Self> {
        if !(t >= 0.0) {
            return Err(domain("UnitRadius::from_ratio", format!("t = {t} must be non-negative")));
        }
        if t == 1.0 {
            return Ok(Self::SELF_COMPLEMENTARY);
        }
        if t.is_infinite() {
            return Ok(Self { r: 1.0, r_prime: 0.0 });
        }
        let r_prime = 1.0 / (1.0 + t).sqrt();
        let r = if t < 1.0 { (t / (1.0 + t)).sqrt() } else { r_prime * t.sqrt() };
        Ok(Self { r: r.min(1.0), r_prime })
    }

    /// Pairs two values already known to satisfy `r² + r'² = 1`.
    pub(crate) fn from_pair(r: f64, r_prime: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&r) && (0.0..=1.0).contains(&r_prime));
        Self { r, r_prime }
    }

    pub fn r(self) -> f64 {
        self.r
    }

    pub fn r_prime(self) -> f64 {
        self.r_prime
    }

    /// `(r', r)`.
    pub fn complement(self) -> Self {
        Self {
            r: self.r_prime,
            r_prime: self.r,
        }
    }

    /// `(r / r')²`, the inverse of [`UnitRadius::from_ratio`].
    pub fn ratio(self) -> f64 {
        let q = self.r / self.r_prime;
        q * q
    }
}

/// `K`, `K'`, `E` and `E'` at one radius.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticValues {
    pub k: f64,
    pub k_prime: f64,
    pub e: f64,
    pub e_prime: f64,
}

/// Runs the AGM on `(1, r')`; returns `(AGM, Σ 2ⁿ⁻¹ cₙ²)`.
fn agm(r: UnitRadius) -> (f64, f64) {
    let mut a = 1.0_f64;
    let mut b = r.r_prime;
    // n = 0 term: c₀ = r, weight 1/2.
    let mut weight = 0.5;
    let mut sum = 0.5 * r.r * r.r;
    for _ in 0..MAX_AGM_STEPS {
        if (a - b).abs() <= 4.0 * f64::EPSILON * a {
            break;
        }
        let c = 0.5 * (a - b);
        let next_a = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next_a;
        weight *= 2.0;
        sum += weight * c * c;
    }
    (a, sum)
}

/// `(K(r), E(r))` for `r' > 0`.
fn k_and_e(r: UnitRadius) -> (f64, f64) {
    let (a, sum) = agm(r);
    let k = FRAC_PI_2 / a;
    // 1 − r²/2 written as (1 + r'²)/2 keeps the leading term exact near r = 1.
    let factor = 0.5 * (1.0 + r.r_prime * r.r_prime) - (sum - 0.5 * r.r * r.r);
    (k, k * factor)
}

/// Complete elliptic integral of the first kind, `K(r)` for `0 ≤ r < 1`.
pub fn ellint_k(r: UnitRadius) -> Result<f64> {
    if r.r_prime == 0.0 {
        return Err(domain("ellint_k", "K(r) diverges at r = 1"));
    }
    let (a, _) = agm(r);
    Ok(FRAC_PI_2 / a)
}

/// Complete elliptic integral of the second kind, `E(r)` for `0 ≤ r ≤ 1`.
pub fn ellint_e(r: UnitRadius) -> f64 {
    if r.r_prime == 0.0 {
        return 1.0;
    }
    k_and_e(r).1
}

/// `K`, `K'`, `E`, `E'` for `0 < r < 1`.
pub fn ellint_all(r: UnitRadius) -> Result<EllipticValues> {
    if r.r == 0.0 || r.r_prime == 0.0 {
        return Err(domain("ellint_all", "K or K' diverges at r = 0 or r = 1"));
    }
    let (k, e) = k_and_e(r);
    let (k_prime, e_prime) = k_and_e(r.complement());
    Ok(EllipticValues { k, k_prime, e, e_prime })
}

/// `(dK/dr, dE/dr)` for `0 < r < 1`.
///
/// `dK/dr = (E − r'²K) / (r r'²)` and `dE/dr = (E − K) / r`.
pub fn ellint_derivatives(r: UnitRadius) -> Result<(f64, f64)> {
    if r.r == 0.0 || r.r_prime == 0.0 {
        return Err(domain("ellint_derivatives", "derivatives need 0 < r < 1"));
    }
    let (k, e) = k_and_e(r);
    let rp2 = r.r_prime * r.r_prime;
    Ok(((e - rp2 * k) / (r.r * rp2), (e - k) / r.r))
}
