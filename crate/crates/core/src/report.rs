//! Residual reports and tolerance settings.

use serde::{Deserialize, Serialize};

/// Tolerances used across the pipelines. All are overridable from a config.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Purely algebraic checks (no differentiation).
    pub algebraic: f64,
    /// Checks that go through finite differences.
    pub finite_difference: f64,
    /// Acceptance threshold on the nullity fit residual.
    pub nullity: f64,
    /// Contact identities (hφ + φh, Lie derivative of the metric, symmetry of h).
    pub identity: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            algebraic: 1e-10,
            finite_difference: 1e-6,
            nullity: 1e-5,
            identity: 1e-7,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// Pass when `residual <= tolerance`.
    Upper,
    /// Pass when `residual >= tolerance` (nondegeneracy checks).
    Lower,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub passed: bool,
}

impl Check {
    pub fn upper(name: impl Into<String>, residual: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            residual,
            tolerance,
            bound: Bound::Upper,
            passed: residual.is_finite() && residual <= tolerance,
        }
    }

    pub fn lower(name: impl Into<String>, value: f64, floor: f64) -> Self {
        Check {
            name: name.into(),
            residual: value,
            tolerance: floor,
            bound: Bound::Lower,
            passed: value.is_finite() && value >= floor,
        }
    }

    /// Keeps the worse of two observations of the same check.
    fn absorb(&mut self, other: &Check) {
        let worse = match self.bound {
            Bound::Upper => other.residual > self.residual || other.residual.is_nan(),
            Bound::Lower => other.residual < self.residual || other.residual.is_nan(),
        };
        if worse {
            self.residual = other.residual;
        }
        self.passed = self.passed && other.passed;
    }
}

/// Named checks, each holding the worst residual seen.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub checks: Vec<Check>,
}

impl ResidualReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a check, or folds it into an existing one with the same name.
    pub fn record(&mut self, check: Check) {
        match self.checks.iter_mut().find(|c| c.name == check.name) {
            Some(existing) => existing.absorb(&check),
            None => self.checks.push(check),
        }
    }

    pub fn upper(&mut self, name: &str, residual: f64, tolerance: f64) {
        self.record(Check::upper(name, residual, tolerance));
    }

    pub fn lower(&mut self, name: &str, value: f64, floor: f64) {
        self.record(Check::lower(name, value, floor));
    }

    pub fn merge(mut self, other: ResidualReport) -> Self {
        for c in other.checks {
            self.record(c);
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Residual of a named check; panics if absent, which is a programming error.
    pub fn residual(&self, name: &str) -> f64 {
        self.get(name)
            .unwrap_or_else(|| panic!("no check named {name}"))
            .residual
    }

    pub fn worst_upper(&self) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.bound == Bound::Upper)
            .map(|c| c.residual)
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merge_keeps_worst_and_conjoins() {
        let mut a = ResidualReport::new();
        a.upper("x", 1e-12, 1e-10);
        a.lower("vol", 1.0, 1e-6);
        let mut b = ResidualReport::new();
        b.upper("x", 1e-3, 1e-10);
        b.lower("vol", 0.5, 1e-6);
        b.upper("y", 0.0, 1e-10);
        let m = a.merge(b);
        assert_eq!(m.checks.len(), 3);
        assert_eq!(m.residual("x"), 1e-3);
        assert_eq!(m.residual("vol"), 0.5);
        assert!(!m.passed());
    }

    #[test]
    fn nan_never_passes() {
        assert!(!Check::upper("n", f64::NAN, 1.0).passed);
        assert!(!Check::lower("n", f64::NAN, 0.0).passed);
    }
}
