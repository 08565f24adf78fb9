//! Jacobi theta series in the nome `q`, for `0 ≤ q` well below 1.
//!
//! Used in two places: inverting the ring modulus for large arguments, and
//! expanding the distortion function `η` around its leading exponential term.
//!
//! With `A(q) = Σₙ≥₀ q^{n(n+1)}` (so that `θ₂ = 2 q^{1/4} A`), a modulus with
//! nome `q` is `k = 4 √q A² / θ₃²` and `k' = θ₄² / θ₃²`.

use std::sync::OnceLock;

/// Number of even coefficients of the quotient series that are kept.
const QUOTIENT_TERMS: usize = 33;

fn tail(q: f64, exponent: impl Fn(u64) -> u64, alternate: bool) -> f64 {
    let mut sum = 0.0;
    for n in 1..64_u64 {
        let e = exponent(n);
        let term = q.powi(e as i32);
        if term == 0.0 {
            break;
        }
        sum += if alternate && n % 2 == 1 { -term } else { term };
        if term < 1e-20 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// `ln θ₃(q)`, with `θ₃ = 1 + 2 Σ q^{n²}`.
pub fn ln_theta3(q: f64) -> f64 {
    (2.0 * tail(q, |n| n * n, false)).ln_1p()
}

/// `ln θ₄(q)`, with `θ₄ = 1 + 2 Σ (−1)ⁿ q^{n²}`.
pub fn ln_theta4(q: f64) -> f64 {
    (2.0 * tail(q, |n| n * n, true)).ln_1p()
}

/// `ln A(q)`, with `A = Σₙ≥₀ q^{n(n+1)}`.
pub fn ln_theta2_reduced(q: f64) -> f64 {
    tail(q, |n| n * (n + 1), false).ln_1p()
}

/// Integer power-series coefficients of `P(q) = θ₄(q)⁴ / A(q)⁴`, degrees
/// `0..2·QUOTIENT_TERMS`.
pub fn quotient_series() -> &'static [i128] {
    static SERIES: OnceLock<Vec<i128>> = OnceLock::new();
    SERIES.get_or_init(|| {
        let n = 2 * QUOTIENT_TERMS;
        let mut theta4 = vec![0_i128; n];
        let mut reduced = vec![0_i128; n];
        for j in 0..n {
            if j * j < n {
                theta4[j * j] += if j == 0 {
                    1
                } else if j % 2 == 1 {
                    -2
                } else {
                    2
                };
            }
            if j * (j + 1) < n {
                reduced[j * (j + 1)] = 1;
            }
        }
        let mut inverse = vec![0_i128; n];
        inverse[0] = 1;
        for k in 1..n {
            inverse[k] = -(1..=k).map(|j| reduced[j] * inverse[k - j]).sum::<i128>();
        }
        let ratio = multiply(&theta4, &inverse);
        let square = multiply(&ratio, &ratio);
        multiply(&square, &square)
    })
}

fn multiply(a: &[i128], b: &[i128]) -> Vec<i128> {
    let n = a.len();
    (0..n).map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum()).collect()
}

/// `ρ₂(q) = Σₖ≥₂ P₂ₖ q^{2k−4} / 16`, the O(1) part of the residual of `η`.
///
/// Accurate for `q ≤ 0.1`; the truncation error there is below 1e-40.
pub fn scaled_residual_series(q: f64) -> f64 {
    let p = quotient_series();
    let q2 = q * q;
    let mut acc = 0.0;
    for k in (2..QUOTIENT_TERMS).rev() {
        acc = acc * q2 + p[2 * k] as f64;
    }
    acc / 16.0
}
