use serde::{Deserialize, Serialize};

use super::LearnerConfig;
use crate::bandit::Noise;
use crate::game::{ActionProfile, JointDistribution, MixedStrategy};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LearnerOutput {
    Profile(ActionProfile),
    Distribution(JointDistribution),
}

impl LearnerOutput {
    pub fn profile(&self) -> Option<&ActionProfile> {
        match self {
            LearnerOutput::Profile(p) => Some(p),
            LearnerOutput::Distribution(_) => None,
        }
    }

    pub fn distribution(&self) -> Option<&JointDistribution> {
        match self {
            LearnerOutput::Distribution(d) => Some(d),
            LearnerOutput::Profile(_) => None,
        }
    }
}

/// The parameter values a run actually used.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Parameters {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_bound: Option<usize>,
    /// IBR minibatch M.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ibr_minibatch: Option<u64>,
    /// Fixed minibatch of the main phase (naive enumeration, reductions).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minibatch: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clip_threshold: Option<f64>,
    /// Clipping zeroes every entry `<= p`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clip_inclusive: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgame_epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subgame_failure_prob: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<String>,
}

/// Per-round snapshot. `strategies` are the unclipped iterates θ^(t).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub round: usize,
    pub strategies: Vec<Vec<f64>>,
    /// Estimated `u_i^(t)(a)` per player and action.
    pub payoffs: Vec<Vec<f64>>,
    pub minibatch: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub algorithm: String,
    pub output: LearnerOutput,
    pub samples_used: u64,
    /// Samples spent in the initial best-response phase (included in `samples_used`).
    pub ibr_samples: u64,
    pub parameters: Parameters,
    pub config: LearnerConfig,
    pub seed: u64,
    pub noise: Noise,
    pub rng: String,
    pub code_version: String,
    pub wall_time_secs: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_stationary_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver_calls: Option<usize>,
    /// Per-player action sets at each outer iteration of a reduction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub support_history: Option<Vec<Vec<Vec<usize>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<TraceRecord>>,
}

impl RunReport {
    /// Serialised report with the wall time zeroed, for replay comparisons.
    pub fn canonical_json(&self) -> String {
        let mut r = self.clone();
        r.wall_time_secs = 0.0;
        serde_json::to_string(&r).expect("report serialises")
    }

    /// Unclipped iterates θ^(t) from the trace.
    pub fn traced_strategies(&self) -> Vec<Vec<MixedStrategy>> {
        self.trace
            .iter()
            .flatten()
            .map(|r| {
                r.strategies
                    .iter()
                    .map(|s| MixedStrategy::new(s.clone()).expect("traced strategy"))
                    .collect()
            })
            .collect()
    }
}
