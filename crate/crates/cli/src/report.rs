use std::collections::BTreeMap;
use std::fmt::Write as _;

use kappa_mu::models::ModelConfig;
use kappa_mu::nullity::{NullityFit, Regime};
use kappa_mu::report::{Bound, Check, ResidualReport};
use serde::Serialize;
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

/// Everything one command run produced.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub model: ModelConfig,
    pub checks: Vec<Check>,
    pub fit: Option<NullityFit>,
    pub regime: Option<Regime>,
    pub artifacts: BTreeMap<String, Value>,
    pub passed: bool,
}

impl RunReport {
    pub fn new(command: &str, model: ModelConfig) -> Self {
        RunReport {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            model,
            checks: Vec::new(),
            fit: None,
            regime: None,
            artifacts: BTreeMap::new(),
            passed: true,
        }
    }

    pub fn add_checks(&mut self, report: ResidualReport) {
        for c in report.checks {
            self.add_check(c);
        }
    }

    pub fn add_check(&mut self, check: Check) {
        self.passed &= check.passed;
        self.checks.push(check);
    }

    /// A failing row for a step that could not run.
    pub fn add_failure(&mut self, name: &str, message: impl Into<String>) {
        self.passed = false;
        self.checks.push(Check::upper(name, f64::NAN, 0.0));
        self.artifact(name, Value::String(message.into()));
    }

    pub fn set_fit(&mut self, fit: NullityFit) {
        self.regime = Some(fit.regime());
        self.fit = Some(fit);
    }

    pub fn artifact(&mut self, key: &str, value: impl Serialize) {
        let value = serde_json::to_value(value).unwrap_or(Value::Null);
        self.artifacts.insert(key.to_string(), value);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}   model: {}", self.command, model_name(&self.model));
        if let Some(fit) = &self.fit {
            let _ = writeln!(
                out,
                "kappa = {}   mu = {}   lambda = {}   index = {}   regime = {}",
                num(fit.kappa),
                fit.mu.map_or("indeterminate".into(), num),
                num(fit.lambda),
                fit.index.map_or("undefined".into(), num),
                fit.regime().as_str(),
            );
        }
        if !self.checks.is_empty() {
            let width = self.checks.iter().map(|c| c.name.chars().count()).max().unwrap_or(5).max(5);
            let _ = writeln!(out, "{:<width$}  {:>12}  {:>12}  status", "check", "value", "bound");
            for c in &self.checks {
                let bound = match c.bound {
                    Bound::Upper => format!("<= {}", sci(c.tolerance)),
                    Bound::Lower => format!(">= {}", sci(c.tolerance)),
                };
                let status = if c.passed { "pass" } else { "FAIL" };
                let _ = writeln!(out, "{:<width$}  {:>12}  {:>12}  {status}", c.name, sci(c.residual), bound);
            }
        }
        for (k, v) in &self.artifacts {
            match v {
                Value::String(s) => {
                    let _ = writeln!(out, "{k}: {s}");
                }
                Value::Array(rows) if rows.iter().all(Value::is_string) => {
                    let _ = writeln!(out, "{k}:");
                    for r in rows {
                        let _ = writeln!(out, "  {}", r.as_str().unwrap_or_default());
                    }
                }
                Value::Number(_) | Value::Bool(_) | Value::Null => {
                    let _ = writeln!(out, "{k}: {v}");
                }
                Value::Array(items) if items.iter().all(Value::is_number) => {
                    let _ = writeln!(out, "{k}: {v}");
                }
                // structured artifacts go to the JSON report only
                _ => {}
            }
        }
        let _ = writeln!(out, "result: {}", if self.passed { "pass" } else { "FAIL" });
        out
    }
}

fn model_name(c: &ModelConfig) -> String {
    use kappa_mu::models::ModelKind::*;
    let mut name = match c.model {
        Milnor => format!("milnor(lambda2 = {}, lambda3 = {})", c.lambda2, c.lambda3),
        Heisenberg => "heisenberg".to_string(),
        HeisenbergChart => "heisenberg_chart".to_string(),
        ShearedHeisenberg => format!("sheared_heisenberg(shear = {})", c.shear),
        Synthetic => format!("synthetic(n = {}, kappa = {}, mu = {})", c.n, c.kappa, c.mu),
    };
    if let Some(a) = c.a {
        let _ = write!(name, " with D_a, a = {a}");
    }
    name
}

pub fn num(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else {
        format!("{v:.10}").trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

pub fn sci(v: f64) -> String {
    format!("{v:.3e}")
}
