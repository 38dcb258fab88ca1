use serde::{Deserialize, Serialize};

use crate::config::RunConfig;

/// Outcome of one check at one matrix size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    pub fd_step: Option<f64>,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// Set when the check could not be evaluated; such a check fails.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CheckRecord {
    pub fn new(name: &str, n: usize, samples: usize, seed: u64, max_residual: f64, tolerance: f64) -> Self {
        Self {
            name: name.to_owned(),
            n,
            samples,
            seed,
            fd_step: None,
            max_residual,
            tolerance,
            // NaN residuals fail
            pass: max_residual <= tolerance,
            error: None,
        }
    }

    pub fn errored(name: &str, n: usize, samples: usize, seed: u64, tolerance: f64, error: String) -> Self {
        Self { pass: false, error: Some(error), ..Self::new(name, n, samples, seed, f64::NAN, tolerance) }
    }

    pub fn with_fd_step(mut self, step: f64) -> Self {
        self.fd_step = Some(step);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: RunConfig,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
}

impl Report {
    pub fn new(config: RunConfig, mut checks: Vec<CheckRecord>) -> Self {
        checks.sort_by(|a, b| a.n.cmp(&b.n).then_with(|| a.name.cmp(&b.name)));
        let pass = checks.iter().all(|c| c.pass);
        Self { config, checks, pass }
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }

    /// Pretty JSON. Non-finite residuals serialize as `null`.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization")
    }
}
