//! Verification reports.

use qetorus::Torus64;
use serde_json::{json, Map, Value};

use crate::format::{fmt17, json_f64};

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    /// Numeric residual against a tolerance.
    Residual { residual: f64, tolerance: f64 },
    /// Exact verdict.
    Exact { holds: bool },
    /// The computation itself failed.
    Failed { error: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub check_id: String,
    /// The identity or value being checked, as formula text.
    pub anchor: String,
    pub outcome: Outcome,
}

impl Check {
    pub fn residual(id: &str, anchor: &str, residual: f64, tolerance: f64) -> Self {
        Self { check_id: id.into(), anchor: anchor.into(), outcome: Outcome::Residual { residual, tolerance } }
    }

    pub fn exact(id: &str, anchor: &str, holds: bool) -> Self {
        Self { check_id: id.into(), anchor: anchor.into(), outcome: Outcome::Exact { holds } }
    }

    pub fn failed(id: &str, anchor: &str, error: impl ToString) -> Self {
        Self { check_id: id.into(), anchor: anchor.into(), outcome: Outcome::Failed { error: error.to_string() } }
    }

    /// A residual check from a fallible computation.
    pub fn from_result(id: &str, anchor: &str, r: qetorus::Result<f64>, tolerance: f64) -> Self {
        match r {
            Ok(v) => Self::residual(id, anchor, v, tolerance),
            Err(e) => Self::failed(id, anchor, e),
        }
    }

    pub fn pass(&self) -> bool {
        match &self.outcome {
            // NaN residuals fail
            Outcome::Residual { residual, tolerance } => *residual < *tolerance,
            Outcome::Exact { holds } => *holds,
            Outcome::Failed { .. } => false,
        }
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("check_id".into(), json!(self.check_id));
        m.insert("anchor".into(), json!(self.anchor));
        match &self.outcome {
            Outcome::Residual { residual, tolerance } => {
                m.insert("kind".into(), json!("residual"));
                m.insert("residual".into(), json_f64(*residual));
                m.insert("tolerance".into(), json_f64(*tolerance));
            }
            Outcome::Exact { holds } => {
                m.insert("kind".into(), json!("exact"));
                m.insert("verdict".into(), json!(holds));
            }
            Outcome::Failed { error } => {
                m.insert("kind".into(), json!("error"));
                m.insert("error".into(), json!(error));
            }
        }
        m.insert("pass".into(), json!(self.pass()));
        Value::Object(m)
    }
}

/// A reported quantity that is not asserted either way.
#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub id: String,
    pub note: String,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub suite: String,
    pub seed: u64,
    pub params: Torus64,
    pub checks: Vec<Check>,
    pub observations: Vec<Observation>,
    pub wall_time_s: f64,
}

impl VerifyReport {
    /// Sorts checks by id so that output order does not depend on how the
    /// suites were run.
    pub fn new(suite: &str, seed: u64, params: Torus64, mut checks: Vec<Check>, mut observations: Vec<Observation>) -> Self {
        checks.sort_by(|a, b| a.check_id.cmp(&b.check_id));
        observations.sort_by(|a, b| a.id.cmp(&b.id));
        Self { suite: suite.into(), seed, params, checks, observations, wall_time_s: 0.0 }
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(Check::pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": 1,
            "suite": self.suite,
            "seed": self.seed,
            "params": params_json(&self.params),
            "pass": self.pass(),
            "checks": self.checks.iter().map(Check::to_json).collect::<Vec<_>>(),
            "observations": self.observations.iter().map(|o| json!({
                "id": o.id,
                "note": o.note,
                "value": json_f64(o.value),
            })).collect::<Vec<_>>(),
            "wall_time_s": json_f64(self.wall_time_s),
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("check_id,anchor,kind,residual,tolerance,pass\n");
        for c in &self.checks {
            let (kind, residual, tol) = match &c.outcome {
                Outcome::Residual { residual, tolerance } => ("residual", fmt17(*residual), fmt17(*tolerance)),
                Outcome::Exact { holds } => ("exact", holds.to_string(), String::new()),
                Outcome::Failed { error } => ("error", csv_field(error), String::new()),
            };
            out.push_str(&format!("{},{},{kind},{residual},{tol},{}\n", c.check_id, csv_field(&c.anchor), c.pass()));
        }
        out
    }
}

/// Echo of the torus parameters.
pub fn params_json(p: &Torus64) -> Value {
    json!({
        "tau_re": json_f64(p.tau().re),
        "tau_im": json_f64(p.tau().im),
        "quad_points": p.quad_points(),
        "series_tol": json_f64(p.series_tol()),
    })
}

pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_rules_and_ordering() {
        let checks = vec![
            Check::residual("b", "x = x", 1e-12, 1e-10),
            Check::exact("a", "1 = 1", true),
            Check::residual("c", "nan", f64::NAN, 1.0),
        ];
        let r = VerifyReport::new("s", 1, Torus64::square(), checks, vec![]);
        assert_eq!(r.checks[0].check_id, "a");
        assert!(!r.pass());
        assert_eq!(r.failures().count(), 1);
        let v = r.to_json();
        assert_eq!(v["schema"], json!(1));
        assert_eq!(v["checks"][2]["residual"], Value::Null);
        assert!(r.to_csv().starts_with("check_id,anchor"));
        assert_eq!(csv_field("a,b"), "\"a,b\"");
    }
}
