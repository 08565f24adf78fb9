use std::io::Write;

use serde::{Deserialize, Serialize};

use super::check::{BoundCheck, CheckDomain, Point};

/// A grid point at which a family was not evaluated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Skip {
    pub family: String,
    pub point: Point,
    pub reason: String,
}

/// All checks of one inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilySummary {
    pub name: String,
    #[serde(rename = "paper_ref")]
    pub reference: String,
    /// Smallest margin; NaN (serialised as `null`) if any margin is NaN.
    #[serde(with = "nullable_min")]
    pub min_margin: f64,
    pub points: usize,
    /// The check attaining `min_margin`.
    pub tightest: Tightest,
}

/// Location and sides of the tightest check of an inequality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tightest {
    pub point: Point,
    #[serde(with = "nullable_min")]
    pub lhs: f64,
    #[serde(with = "nullable_min")]
    pub rhs: f64,
}

impl Tightest {
    fn of(c: &BoundCheck) -> Self {
        Self {
            point: c.point,
            lhs: c.lhs,
            rhs: c.rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub failed: usize,
    pub skipped: usize,
    pub families: Vec<FamilySummary>,
}

/// Outcome of a grid verification, in deterministic order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct VerifyReport {
    pub checks: Vec<BoundCheck>,
    pub skipped: Vec<Skip>,
}

impl VerifyReport {
    pub fn failures(&self) -> impl Iterator<Item = &BoundCheck> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Per-inequality summary, in order of first appearance.
    pub fn summary(&self) -> Summary {
        let mut families: Vec<FamilySummary> = Vec::new();
        for c in &self.checks {
            match families.iter_mut().find(|f| f.name == c.name) {
                Some(f) => {
                    f.points += 1;
                    if f.min_margin.is_nan() {
                        continue;
                    }
                    if c.margin.is_nan() || c.margin < f.min_margin {
                        f.min_margin = c.margin;
                        f.tightest = Tightest::of(c);
                    }
                }
                None => families.push(FamilySummary {
                    name: c.name.clone(),
                    reference: c.reference.clone(),
                    min_margin: c.margin,
                    points: 1,
                    tightest: Tightest::of(c),
                }),
            }
        }
        Summary {
            total: self.checks.len(),
            failed: self.failures().count(),
            skipped: self.skipped.len(),
            families,
        }
    }

    /// `{summary, failures, skipped}`, plus every check under `checks`
    /// when `full` is set.
    pub fn to_json(&self, full: bool) -> serde_json::Value {
        let mut v = serde_json::json!({
            "summary": self.summary(),
            "failures": self.failures().collect::<Vec<_>>(),
            "skipped": self.skipped,
        });
        if full {
            v["checks"] = serde_json::to_value(&self.checks).expect("checks serialise");
        }
        v
    }

    /// One row per check: `name,K,t,lhs,rhs,margin,log_domain,pass`.
    pub fn write_csv<W: Write>(&self, out: W) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["name", "K", "t", "lhs", "rhs", "margin", "log_domain", "pass"])?;
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        for c in &self.checks {
            w.write_record([
                c.name.clone(),
                opt(c.point.k),
                opt(c.point.t),
                c.lhs.to_string(),
                c.rhs.to_string(),
                c.margin.to_string(),
                (c.domain == CheckDomain::Log).to_string(),
                c.pass.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

mod nullable_min {
    use serde::{Deserialize, Deserializer, Serializer};

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
