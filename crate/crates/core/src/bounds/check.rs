use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// How `lhs`, `rhs` and `margin` of a check are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckDomain {
    /// The two sides of the inequality as stated.
    Linear,
    /// Natural logarithms of both sides.
    Log,
    /// Both sides after subtracting the same exactly known leading term.
    Residual,
    /// Both sides after cancelling the leading terms and dividing by a
    /// positive power of the nome; the sign of the margin is unchanged.
    Scaled,
}

/// Parameters at which a check was evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
}

impl Point {
    pub fn k(k: f64) -> Self {
        Self {
            k: Some(k),
            ..Self::default()
        }
    }

    pub fn kt(k: f64, t: f64) -> Self {
        Self {
            k: Some(k),
            t: Some(t),
            ..Self::default()
        }
    }

    pub fn t(t: f64) -> Self {
        Self {
            t: Some(t),
            ..Self::default()
        }
    }
}

/// One evaluated inequality `lhs < rhs` (or `≤`, or a limit value).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    #[serde(rename = "paper_ref")]
    pub reference: String,
    pub point: Point,
    #[serde(with = "nullable")]
    pub lhs: f64,
    #[serde(with = "nullable")]
    pub rhs: f64,
    /// `rhs − lhs` in `domain`, computed without cancellation where the
    /// leading terms are known in closed form.
    #[serde(with = "nullable")]
    pub margin: f64,
    pub domain: CheckDomain,
    pub strict: bool,
    pub pass: bool,
}

/// Name and formula of an inequality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Inequality {
    pub name: &'static str,
    pub formula: &'static str,
}

/// Relative size below which a failed strict comparison is re-evaluated.
pub const STRICT_RELATIVE_TOLERANCE: f64 = 1e-12;
/// Tolerance for limit values of monotone functions.
pub const LIMIT_TOLERANCE: f64 = 1e-3;

impl BoundCheck {
    #[allow(clippy::too_many_arguments)]
    fn build(ineq: &Inequality, point: Point, domain: CheckDomain, lhs: f64, rhs: f64, margin: f64, strict: bool, pass: bool) -> Self {
        Self {
            name: ineq.name.to_string(),
            reference: ineq.formula.to_string(),
            point,
            lhs,
            rhs,
            margin,
            domain,
            strict,
            pass,
        }
    }

    /// Strict `lhs < rhs` with an accurately computed margin.
    pub(crate) fn strict(ineq: &Inequality, point: Point, domain: CheckDomain, lhs: f64, rhs: f64, margin: f64) -> Self {
        let pass = margin > 0.0 && lhs.is_finite() && rhs.is_finite();
        Self::build(ineq, point, domain, lhs, rhs, margin, true, pass)
    }

    /// Strict `lhs < rhs` with margin `rhs − lhs`; if that comparison fails
    /// by less than the roundoff level, `fallback` supplies log-domain
    /// `(lhs, rhs, margin)` and decides instead.
    pub(crate) fn strict_or_log(ineq: &Inequality, point: Point, lhs: f64, rhs: f64, fallback: impl FnOnce() -> (f64, f64, f64)) -> Self {
        let margin = rhs - lhs;
        let scale = lhs.abs().max(rhs.abs());
        if margin > 0.0 || !(margin.abs() < STRICT_RELATIVE_TOLERANCE * scale) {
            return Self::strict(ineq, point, CheckDomain::Linear, lhs, rhs, margin);
        }
        let (l, r, m) = fallback();
        Self::strict(ineq, point, CheckDomain::Log, l, r, m)
    }

    /// Non-strict `lhs ≤ rhs`, allowing roundoff of relative size `tol`.
    pub(crate) fn non_strict(ineq: &Inequality, point: Point, domain: CheckDomain, lhs: f64, rhs: f64, tol: f64) -> Self {
        let margin = rhs - lhs;
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        let pass = margin >= -tol * scale;
        Self::build(ineq, point, domain, lhs, rhs, margin, false, pass)
    }

    /// A one-sided limit: `value` approaches `limit` from `side` and lies
    /// within `tol` of it.
    pub(crate) fn limit(ineq: &Inequality, point: Point, domain: CheckDomain, value: f64, limit: f64, side: Side, tol: f64) -> Self {
        let scale = limit.abs().max(1.0);
        let signed = match side {
            Side::Below => limit - value,
            Side::Above => value - limit,
        };
        let margin = tol - signed;
        let pass = signed >= -STRICT_RELATIVE_TOLERANCE * scale && margin >= 0.0;
        Self::build(ineq, point, domain, value, limit, margin, false, pass)
    }
}

impl BoundCheck {
    /// A failed check recording an evaluation error of `family` at `point`.
    pub(crate) fn evaluation_error(family: &str, point: Point, message: &str) -> Self {
        Self {
            name: format!("{family}_evaluation"),
            reference: message.to_string(),
            point,
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            domain: CheckDomain::Linear,
            strict: true,
            pass: false,
        }
    }

    /// Agreement `|value − expected| ≤ tol · |expected|`.
    pub(crate) fn close(ineq: &Inequality, point: Point, value: f64, expected: f64, tol: f64) -> Self {
        let margin = tol * expected.abs() - (value - expected).abs();
        Self::build(ineq, point, CheckDomain::Linear, value, expected, margin, false, margin >= 0.0)
    }
}

/// Side from which a monotone function approaches its limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Below,
    Above,
}

/// Serialises non-finite floats as `null` and reads `null` back as NaN.
mod nullable {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }
}
