use std::f64::consts::{FRAC_1_SQRT_2, LN_2, PI, SQRT_2};

use serde::Serialize;

use crate::distortion::{small_ratio_threshold, Dilatation};
use crate::elliptic::{ellint_all, UnitRadius};
use crate::error::Result;
use crate::modulus::m_function;

/// Numerical constants appearing in the distortion bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constants {
    /// `a = (4/π) K(1/√2)² = λ'(1)`.
    pub a: f64,
    /// `b = a/2`.
    pub b: f64,
    /// Cubic coefficient of the lower Taylor bound, `a (4(a−1)² − a²)/16`.
    pub c_taylor: f64,
    /// Quadratic Taylor coefficient `a (a − 1)/2`.
    pub a1: f64,
    /// Cubic coefficient of the upper Taylor bound on `(1, 2)`,
    /// `λ(2) − 1 − a − a1`.
    pub c1_taylor: f64,
    /// `λ(2) = 4√2 (√2 + 1)²`.
    pub lambda_two: f64,
    /// `(68 + e^{2π}) / (16 (4 + e^{2π}))`.
    pub c_sandwich: f64,
    /// `(2K(1/√2)/π)² e^{−π}`.
    pub c_lambda_gap: f64,
    /// `exp(2K(1/√2)²/π)/8`.
    pub c_power: f64,
    /// `K₀` of the linear bound with slope 5, `K₀(5 − a)`.
    pub k0_linear: f64,
    /// `(9/2)K² + 6(E − K/2)² − 3π` at `1/√2`.
    pub f_one: f64,
    /// `m(r') + ln r' − m(r) m(r')/2` at `r = 1/√2`.
    pub g5: f64,
    /// `η₁(t)` ceiling below the small-ratio threshold, `T(1)`.
    pub small_ratio: f64,
}

/// A computed constant next to its published decimal value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantEntry {
    pub name: &'static str,
    pub value: f64,
    /// Value as printed, to the printed number of digits.
    pub published: f64,
    /// Half a unit in the last printed digit.
    pub tolerance: f64,
    pub definition: &'static str,
}

impl ConstantEntry {
    pub fn difference(&self) -> f64 {
        (self.value - self.published).abs()
    }

    pub fn within_tolerance(&self) -> bool {
        self.difference() <= self.tolerance
    }
}

impl Constants {
    pub fn compute() -> Result<Self> {
        let r = UnitRadius::SELF_COMPLEMENTARY;
        let v = ellint_all(r)?;
        let k2 = v.k * v.k;
        let a = 4.0 / PI * k2;
        let a1 = 0.5 * a * (a - 1.0);
        let lambda_two = 4.0 * SQRT_2 * (SQRT_2 + 1.0).powi(2);
        let e2pi = (2.0 * PI).exp();
        let m = m_function(r)?.value;
        let c1 = lambda_two - 1.0 - a - a1;
        Ok(Self {
            a,
            b: 0.5 * a,
            c_taylor: a * (4.0 * (a - 1.0).powi(2) - a * a) / 16.0,
            a1,
            c1_taylor: c1,
            lambda_two,
            c_sandwich: (68.0 + e2pi) / (16.0 * (4.0 + e2pi)),
            c_lambda_gap: (2.0 * v.k / PI).powi(2) * (-PI).exp(),
            c_power: (2.0 * k2 / PI).exp() / 8.0,
            k0_linear: k0(a1, c1, 5.0 - a),
            f_one: 4.5 * k2 + 6.0 * (v.e - 0.5 * v.k).powi(2) - 3.0 * PI,
            g5: m + FRAC_1_SQRT_2.ln() - 0.5 * m * m,
            small_ratio: small_ratio_threshold(Dilatation::new(1.0)?).expect("threshold at K = 1 is normal"),
        })
    }

    /// `K₀(δ) = 1 + (√(a1² + 4 c1 δ) − a1) / (2 c1)`: the largest `K` for
    /// which the cubic Taylor ceiling lies below `1 + (a + δ)(K − 1)`.
    pub fn k0(&self, delta: f64) -> f64 {
        k0(self.a1, self.c1_taylor, delta)
    }

    /// Computed values next to their published decimal values.
    pub fn table(&self) -> Vec<ConstantEntry> {
        let e = |name, value, published, tolerance, definition| ConstantEntry {
            name,
            value,
            published,
            tolerance,
            definition,
        };
        vec![
            e("a", self.a, 4.3768, 5e-4, "(4/pi) K(1/sqrt2)^2"),
            e("c_taylor", self.c_taylor, 7.2372, 5e-4, "a(4(a-1)^2 - a^2)/16"),
            e("c1_taylor", self.c1_taylor, 20.2035, 5e-4, "lambda(2) - 1 - a - a(a-1)/2"),
            e("c_sandwich", self.c_sandwich, 0.06991, 5e-5, "(68 + e^{2pi}) / (16 (4 + e^{2pi}))"),
            e("c_lambda_gap", self.c_lambda_gap, 0.0602, 5e-4, "(2K(1/sqrt2)/pi)^2 e^{-pi}"),
            e("c_power", self.c_power, 1.115, 5e-3, "exp(2K(1/sqrt2)^2/pi)/8"),
            e(
                "k0_linear",
                self.k0_linear,
                1.07066,
                5e-5,
                "1 + (sqrt(a1^2 + 4c1(5-a)) - a1)/(2c1), a1 = a(a-1)/2",
            ),
            e("f_one", self.f_one, 7.1210, 5e-4, "(9/2)K^2 + 6(E - K/2)^2 - 3pi at 1/sqrt2"),
            e("g5", self.g5, 0.148, 5e-3, "m(r') + log r' - m(r)m(r')/2 at r = 1/sqrt2"),
        ]
    }
}

fn k0(a1: f64, c1: f64, delta: f64) -> f64 {
    1.0 + ((a1 * a1 + 4.0 * c1 * delta).sqrt() - a1) / (2.0 * c1)
}

/// `ln 16`.
pub(crate) const LN_16: f64 = 4.0 * LN_2;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distortion::lambda;

    #[test]
    fn published_values() {
        for e in Constants::compute().unwrap().table() {
            assert!(e.within_tolerance(), "{}: {} vs {}", e.name, e.value, e.published);
        }
    }

    #[test]
    fn high_precision_values() {
        // 50-digit evaluations rounded to binary64.
        let c = Constants::compute().unwrap();
        let cases = [
            (c.a, 4.376879230452953),
            (c.b, 2.1884396152264765),
            (c.c_taylor, 7.237219471534173),
            (c.c1_taylor, 20.20358723426545),
            (c.lambda_two, 32.97056274847714),
            (c.c_sandwich, 0.06991438715323445),
            (c.c_lambda_gap, 0.06020580074220314),
            (c.c_power, 1.115160202035261),
            (c.k0_linear, 1.070666185858425),
            (c.f_one, 7.121045146345654),
            (c.g5, 0.1489877236466895),
        ];
        for (i, (got, want)) in cases.into_iter().enumerate() {
            assert!((got / want - 1.0).abs() < 1e-13, "case {i}: {got} vs {want}");
        }
    }

    #[test]
    fn lambda_two_matches_evaluation() {
        let c = Constants::compute().unwrap();
        let v = lambda(Dilatation::new(2.0).unwrap()).unwrap();
        assert!((v / c.lambda_two - 1.0).abs() < 1e-13);
    }

    #[test]
    fn k0_closes_the_cubic() {
        let c = Constants::compute().unwrap();
        for &d in &[0.1, 1.0, 5.0 - c.a, 10.0] {
            let h = c.k0(d) - 1.0;
            assert!((c.a1 * h + c.c1_taylor * h * h - d).abs() < 1e-13 * d.max(1.0));
        }
    }

    #[test]
    fn small_ratio_ceiling() {
        let c = Constants::compute().unwrap();
        assert!(c.small_ratio > 1e-5 && c.small_ratio < 1.1e-5);
    }
}
