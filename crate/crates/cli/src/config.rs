//! Run configuration for the verification suite.
//!
//! Values come from command-line flags; an optional JSON file may then
//! override any subset of them, including individual check tolerances.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Per-check acceptance thresholds. A check passes when its residual is at
/// most the threshold.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub eigen_residual: f64,
    pub intertwining: f64,
    pub torus_equivariance: f64,
    pub diagonal_conjugation: f64,
    pub scaling: f64,
    pub conjugation: f64,
    pub nesting: f64,
    pub real_stratum: f64,
    /// Drift of the `±1` torus coordinate across `γ` on the real stratum.
    pub real_torus: f64,
    pub round_trip: f64,
    /// Upper bound on `1/|det J|`.
    pub jacobian_inverse_det: f64,
    pub twist_relation: f64,
    pub twist_unitarity: f64,
    pub twist_det: f64,
    pub twist_equivariance: f64,
    pub twist_real: f64,
    pub n2_closed_form: f64,
    pub n2_twist_angle: f64,
    pub pushforward: f64,
    /// Upper bound on the residual ratio when the base step halves.
    pub pushforward_convergence: f64,
    pub involution: f64,
    pub moment_flow: f64,
    /// Largest admissible increase of `|γ(A_j) − exp(A_j)|` along the
    /// boundary probe.
    pub boundary_monotone: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            eigen_residual: 1e-12,
            intertwining: 1e-9,
            torus_equivariance: 1e-8,
            diagonal_conjugation: 1e-8,
            scaling: 1e-8,
            conjugation: 1e-8,
            nesting: 1e-9,
            real_stratum: 1e-10,
            real_torus: 1e-8,
            round_trip: 1e-9,
            jacobian_inverse_det: 1e12,
            twist_relation: 1e-8,
            twist_unitarity: 1e-10,
            twist_det: 1e-9,
            twist_equivariance: 1e-5,
            twist_real: 1e-6,
            n2_closed_form: 1e-10,
            n2_twist_angle: 1e-8,
            pushforward: 1e-4,
            pushforward_convergence: 1.0 / 3.0,
            involution: 1e-6,
            moment_flow: 1e-5,
            boundary_monotone: 1e-12,
        }
    }
}

impl Tolerances {
    fn entries(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("eigen_residual", self.eigen_residual),
            ("intertwining", self.intertwining),
            ("torus_equivariance", self.torus_equivariance),
            ("diagonal_conjugation", self.diagonal_conjugation),
            ("scaling", self.scaling),
            ("conjugation", self.conjugation),
            ("nesting", self.nesting),
            ("real_stratum", self.real_stratum),
            ("real_torus", self.real_torus),
            ("round_trip", self.round_trip),
            ("jacobian_inverse_det", self.jacobian_inverse_det),
            ("twist_relation", self.twist_relation),
            ("twist_unitarity", self.twist_unitarity),
            ("twist_det", self.twist_det),
            ("twist_equivariance", self.twist_equivariance),
            ("twist_real", self.twist_real),
            ("n2_closed_form", self.n2_closed_form),
            ("n2_twist_angle", self.n2_twist_angle),
            ("pushforward", self.pushforward),
            ("pushforward_convergence", self.pushforward_convergence),
            ("involution", self.involution),
            ("moment_flow", self.moment_flow),
            ("boundary_monotone", self.boundary_monotone),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Largest matrix size; suites run for every size from 2 up to this.
    pub size: usize,
    pub seed: u64,
    pub samples: usize,
    /// Hermiticity tolerance for matrix files.
    pub tol: f64,
    /// Smallest interlacing margin of sampled inputs.
    pub margin: f64,
    pub fd_step: f64,
    /// Continuation steps for the twist.
    pub steps: usize,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            size: 4,
            seed: 42,
            samples: 50,
            tol: 1e-12,
            margin: 0.02,
            fd_step: gzgw_core::poisson::FD_STEP,
            steps: gzgw_core::gw::DEFAULT_STEPS,
            tolerances: Tolerances::default(),
        }
    }
}

/// Optional overrides read from a config file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct Overrides {
    size: Option<usize>,
    seed: Option<u64>,
    samples: Option<usize>,
    tol: Option<f64>,
    margin: Option<f64>,
    fd_step: Option<f64>,
    steps: Option<usize>,
    tolerances: Option<Tolerances>,
}

impl RunConfig {
    /// Applies the overrides in a JSON config file on top of `self`.
    pub fn with_file(mut self, path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
        self.apply_json(&text)?;
        Ok(self)
    }

    pub fn apply_json(&mut self, text: &str) -> CliResult<()> {
        let o: Overrides = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        macro_rules! take {
            ($($f:ident),*) => { $(if let Some(v) = o.$f { self.$f = v; })* };
        }
        take!(size, seed, samples, tol, margin, fd_step, steps, tolerances);
        Ok(())
    }

    /// Checks the invariants a run needs. `samples = 0` is accepted and
    /// yields an empty report.
    pub fn validate(&self) -> CliResult<()> {
        if self.size < 1 {
            return Err(CliError::Config("size must be at least 1".into()));
        }
        if self.steps < 2 {
            return Err(CliError::Config("at least 2 continuation steps are needed".into()));
        }
        let positive = [("tol", self.tol), ("margin", self.margin), ("fd_step", self.fd_step)];
        for (name, v) in positive.into_iter().chain(self.tolerances.entries()) {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(())
    }
}
