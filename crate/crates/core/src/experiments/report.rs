use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{Experiment, ExperimentConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl Comparison {
    pub fn holds(self, statistic: f64, threshold: f64) -> bool {
        match self {
            Comparison::Le => statistic <= threshold,
            Comparison::Lt => statistic < threshold,
            Comparison::Ge => statistic >= threshold,
            Comparison::Gt => statistic > threshold,
        }
    }
}

/// One pass/fail line: `statistic op threshold`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Criterion {
    pub name: String,
    pub statistic: f64,
    pub threshold: f64,
    pub op: Comparison,
    pub pass: bool,
}

impl Criterion {
    pub fn new(name: impl Into<String>, statistic: f64, op: Comparison, threshold: f64) -> Self {
        Self { name: name.into(), statistic, threshold, op, pass: op.holds(statistic, threshold) }
    }

    /// A yes/no condition stored as `statistic = 1 or 0 >= 1`.
    pub fn flag(name: impl Into<String>, holds: bool) -> Self {
        Self::new(name, if holds { 1.0 } else { 0.0 }, Comparison::Ge, 1.0)
    }

    /// Pass flag recomputed from the stored numbers.
    pub fn recompute(&self) -> bool {
        self.op.holds(self.statistic, self.threshold)
    }
}

/// A table of plot-ready numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Curve {
    pub fn new(columns: &[&str], rows: Vec<Vec<f64>>) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: Experiment,
    pub title: String,
    pub config: ExperimentConfig,
    pub seed: u64,
    pub statistics: BTreeMap<String, f64>,
    pub criteria: Vec<Criterion>,
    /// Set when the replica count is too small for the distributional criteria to mean much.
    pub insufficient_sample: bool,
    /// What the criteria do and do not establish.
    pub scope: String,
    pub wall_clock_seconds: f64,
    pub threads: usize,
    pub curves: BTreeMap<String, Curve>,
    pub passed: bool,
}

impl ExperimentReport {
    pub(crate) fn new(experiment: Experiment, config: &ExperimentConfig, scope: &str) -> Self {
        Self {
            experiment,
            title: experiment.title().to_string(),
            config: config.clone(),
            seed: config.seed,
            statistics: BTreeMap::new(),
            criteria: Vec::new(),
            insufficient_sample: config.insufficient_sample(),
            scope: scope.to_string(),
            wall_clock_seconds: 0.0,
            threads: crate::par::current_threads(),
            curves: BTreeMap::new(),
            passed: false,
        }
    }

    pub(crate) fn stat(&mut self, name: impl Into<String>, value: f64) {
        self.statistics.insert(name.into(), value);
    }

    pub(crate) fn criterion(&mut self, c: Criterion) {
        self.criteria.push(c);
    }

    pub(crate) fn curve(&mut self, name: &str, curve: Curve) {
        self.curves.insert(name.to_string(), curve);
    }

    /// Sets `passed` from the criteria. An insufficient sample never passes.
    pub(crate) fn finish(mut self) -> Self {
        self.passed = self.all_pass();
        self
    }

    /// Every criterion holds on its stored numbers and the sample is adequate.
    pub fn all_pass(&self) -> bool {
        !self.insufficient_sample && !self.criteria.is_empty() && self.criteria.iter().all(Criterion::recompute)
    }

    /// Pretty JSON with object keys sorted at every level.
    pub fn to_canonical_json(&self) -> Result<String> {
        canonical_json(self)
    }

    /// One `PASS`/`FAIL` line per criterion.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for c in &self.criteria {
            let verdict = if c.recompute() { "PASS" } else { "FAIL" };
            let op = serde_json::to_value(c.op).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
            let _ =
                writeln!(out, "{verdict} {} {}: {:.6e} {op} {:.6e}", self.experiment, c.name, c.statistic, c.threshold);
        }
        if self.insufficient_sample {
            let _ = writeln!(out, "FAIL {} insufficient sample: reps = {}", self.experiment, self.config.reps);
        }
        out
    }
}

/// Serializes through `serde_json::Value`, whose maps keep keys sorted.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::Config(e.to_string()))?;
    serde_json::to_string_pretty(&v).map_err(|e| Error::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparisons_serialize_as_symbols() {
        assert_eq!(serde_json::to_string(&Comparison::Le).unwrap(), "\"<=\"");
        assert_eq!(serde_json::from_str::<Comparison>("\">\"").unwrap(), Comparison::Gt);
        assert!(Criterion::new("x", 0.02, Comparison::Le, 0.02).pass);
        assert!(!Criterion::new("x", 0.02, Comparison::Lt, 0.02).pass);
        assert!(Criterion::flag("f", true).pass && !Criterion::flag("f", false).pass);
    }

    #[test]
    fn report_round_trip_and_sorted_keys() {
        let cfg = ExperimentConfig::defaults(Experiment::E1);
        let mut r = ExperimentReport::new(Experiment::E1, &cfg, "scope");
        r.stat("zeta", 1.0);
        r.stat("alpha", 2.0);
        r.criterion(Criterion::new("ks", 0.01, Comparison::Le, 0.02));
        r.curve("ecdf", Curve::new(&["x", "y"], vec![vec![1.0, 0.5]]));
        let r = r.finish();
        assert!(r.passed);
        let json = r.to_canonical_json().unwrap();
        assert!(json.find("\"alpha\"").unwrap() < json.find("\"zeta\"").unwrap());
        assert!(json.find("\"config\"").unwrap() < json.find("\"criteria\"").unwrap());
        let back: ExperimentReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn insufficient_sample_never_passes() {
        let cfg = ExperimentConfig { reps: 1, ..ExperimentConfig::defaults(Experiment::E1) };
        let mut r = ExperimentReport::new(Experiment::E1, &cfg, "");
        r.criterion(Criterion::new("ks", 0.0, Comparison::Le, 1.0));
        assert!(!r.finish().passed);
    }

    #[test]
    fn csv_layout() {
        let c = Curve::new(&["n", "p_hat"], vec![vec![1000.0, 0.1], vec![10000.0, 0.25]]);
        assert_eq!(c.to_csv(), "n,p_hat\n1000.0,0.1\n10000.0,0.25\n");
    }
}
