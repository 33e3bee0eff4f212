use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};

use serde::{Deserialize, Serialize};

/// Outcome of one scenario. Every discrepancy has a tolerance under the same
/// key, and `pass` is true exactly when each discrepancy is within it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub predicted: BTreeMap<String, f64>,
    pub measured: BTreeMap<String, f64>,
    pub discrepancies: BTreeMap<String, f64>,
    pub tolerances: BTreeMap<String, f64>,
    pub pass: bool,
}

impl ScenarioReport {
    pub fn new(scenario: &str) -> Self {
        ScenarioReport {
            scenario: scenario.to_string(),
            predicted: BTreeMap::new(),
            measured: BTreeMap::new(),
            discrepancies: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            pass: true,
        }
    }

    pub fn predict(&mut self, key: impl Into<String>, value: f64) {
        self.predicted.insert(key.into(), value);
    }

    pub fn measure(&mut self, key: impl Into<String>, value: f64) {
        self.measured.insert(key.into(), value);
    }

    pub fn check(&mut self, key: impl Into<String>, discrepancy: f64, tolerance: f64) {
        let key = key.into();
        self.discrepancies.insert(key.clone(), discrepancy);
        self.tolerances.insert(key, tolerance);
        self.pass = self.evaluate();
    }

    /// Replaces every tolerance by `tolerance`.
    pub fn override_tolerance(&mut self, tolerance: f64) {
        self.tolerances.values_mut().for_each(|t| *t = tolerance);
        self.pass = self.evaluate();
    }

    /// Recomputes the verdict from the discrepancies and tolerances alone.
    /// NaN discrepancies and missing tolerances fail.
    pub fn evaluate(&self) -> bool {
        self.discrepancies.iter().all(|(key, d)| match self.tolerances.get(key) {
            Some(t) => *d <= *t,
            None => false,
        })
    }

    pub fn max_discrepancy(&self) -> f64 {
        self.discrepancies
            .values()
            .copied()
            .fold(0.0, |a: f64, b| if b.is_nan() { f64::NAN } else { a.max(b) })
    }

    /// Keys whose discrepancy exceeds the tolerance.
    pub fn failures(&self) -> impl Iterator<Item = &str> {
        self.discrepancies
            .iter()
            .filter(|(k, d)| !matches!(self.tolerances.get(*k), Some(t) if **d <= *t))
            .map(|(k, _)| k.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_follows_checks() {
        let mut r = ScenarioReport::new("demo");
        r.check("a", 1e-9, 1e-8);
        assert!(r.pass);
        r.check("b", 2.0, 1.0);
        assert!(!r.pass);
        assert_eq!(r.failures().collect::<alloc::vec::Vec<_>>(), ["b"]);
        assert_eq!(r.max_discrepancy(), 2.0);
        r.override_tolerance(10.0);
        assert!(r.pass);
        r.override_tolerance(0.0);
        assert!(!r.pass);
        r.check("c", f64::NAN, 1.0);
        assert!(!r.evaluate());
    }
}
