//! Serializable verification reports.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

/// Running maximum of a violation measure with the point where it occurs.
#[derive(Clone, Debug, PartialEq)]
pub struct MaxTracker {
    pub value: f64,
    pub point: Vec<f64>,
    pub samples: u64,
}

impl Default for MaxTracker {
    fn default() -> Self {
        MaxTracker {
            value: f64::NEG_INFINITY,
            point: Vec::new(),
            samples: 0,
        }
    }
}

impl MaxTracker {
    pub fn observe(&mut self, value: f64, point: &[f64]) {
        self.samples += 1;
        if value > self.value || value.is_nan() {
            self.value = value;
            self.point = point.to_vec();
        }
    }

    /// Associative merge; ties keep `self`, so ordered reductions are
    /// deterministic.
    pub fn merge(mut self, other: MaxTracker) -> MaxTracker {
        let samples = self.samples + other.samples;
        if other.value > self.value || (other.value.is_nan() && !self.value.is_nan()) {
            self = other;
        }
        self.samples = samples;
        self
    }
}

/// One verified (or explored) property.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check_name: String,
    pub grid_spec: String,
    pub max_violation: f64,
    pub argmax_point: Vec<f64>,
    pub tolerance: f64,
    pub samples: u64,
    pub pass: bool,
    #[serde(default)]
    pub exploratory: bool,
}

impl CheckReport {
    /// Passes when the largest observed violation is at most `tolerance`.
    /// NaN never passes.
    pub fn from_tracker(
        name: impl Into<String>,
        grid_spec: impl Into<String>,
        t: MaxTracker,
        tolerance: f64,
    ) -> Self {
        let max_violation = if t.samples == 0 { 0.0 } else { t.value };
        CheckReport {
            check_name: name.into(),
            grid_spec: grid_spec.into(),
            pass: max_violation <= tolerance,
            max_violation,
            argmax_point: t.point,
            tolerance,
            samples: t.samples,
            exploratory: false,
        }
    }

    pub fn exploratory(mut self) -> Self {
        self.exploratory = true;
        self
    }
}

/// Outcome of a batch of randomized competitor trials.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub name: String,
    pub trials: u64,
    /// Smallest `JF(v) - reference` over all trials.
    pub min_excess: f64,
    pub argmin: String,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default)]
    pub residuals: BTreeMap<String, f64>,
}

impl TrialReport {
    pub fn empty(name: impl Into<String>, tolerance: f64) -> Self {
        TrialReport {
            name: name.into(),
            trials: 0,
            min_excess: f64::INFINITY,
            argmin: String::new(),
            tolerance,
            pass: true,
            residuals: BTreeMap::new(),
        }
    }

    /// Recomputes `pass` from `min_excess` and the residual bounds, which
    /// must all be at most `tolerance`.
    pub fn finish(mut self) -> Self {
        let excess_ok = self.trials == 0 || self.min_excess >= -self.tolerance;
        let residuals_ok = self.residuals.values().all(|r| *r <= self.tolerance);
        self.pass = excess_ok && residuals_ok;
        if self.trials == 0 {
            self.min_excess = 0.0;
        }
        self
    }
}

/// Reproducibility data embedded in every suite report.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub params: BTreeMap<String, serde_json::Value>,
    pub grids: BTreeMap<String, String>,
    pub tolerances: BTreeMap<String, f64>,
}

impl Manifest {
    pub fn new(command: impl Into<String>, seed: u64) -> Self {
        Manifest {
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.into(),
            seed,
            ..Default::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub name: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub pass: bool,
    pub checks: Vec<CheckReport>,
    pub trials: Vec<TrialReport>,
    #[serde(default)]
    pub children: Vec<SuiteReport>,
    pub manifest: Manifest,
    pub timings: Vec<Timing>,
}

impl SuiteReport {
    pub fn new(suite: impl Into<String>, manifest: Manifest) -> Self {
        SuiteReport {
            suite: suite.into(),
            pass: true,
            checks: Vec::new(),
            trials: Vec::new(),
            children: Vec::new(),
            manifest,
            timings: Vec::new(),
        }
    }

    /// Runs `f`, records its wall-clock time under `name`, and returns its
    /// output.
    pub fn timed<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings.push(Timing {
            name: name.to_string(),
            seconds: start.elapsed().as_secs_f64(),
        });
        out
    }

    pub fn push_check(&mut self, c: CheckReport) {
        self.checks.push(c);
        self.refresh();
    }

    pub fn push_trials(&mut self, t: TrialReport) {
        self.trials.push(t);
        self.refresh();
    }

    pub fn push_child(&mut self, c: SuiteReport) {
        self.children.push(c);
        self.refresh();
    }

    /// Exploratory checks never affect the overall verdict.
    pub fn refresh(&mut self) {
        self.pass = self.checks.iter().all(|c| c.exploratory || c.pass)
            && self.trials.iter().all(|t| t.pass)
            && self.children.iter().all(|c| c.pass);
    }

    /// Flat list of all failing item names, children included.
    pub fn failures(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .checks
            .iter()
            .filter(|c| !c.exploratory && !c.pass)
            .map(|c| format!("{}/{}", self.suite, c.check_name))
            .chain(
                self.trials
                    .iter()
                    .filter(|t| !t.pass)
                    .map(|t| format!("{}/{}", self.suite, t.name)),
            )
            .collect();
        for c in &self.children {
            out.extend(c.failures());
        }
        out
    }
}
