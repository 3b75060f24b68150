//! Sample-based learners: iterative best response, naive enumeration, Hedge
//! for rationalizable ε-CCE and adaptive swap-regret Hedge for rationalizable
//! ε-CE.

mod ce;
mod cce;
mod config;
pub(crate) mod hedge;
mod ibr;
mod naive;
pub mod params;
mod report;
pub mod stationary;

use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use ce::adaptive_hedge_ce;
pub use cce::hedge_cce;
pub use config::LearnerConfig;
pub use hedge::softmax;
pub use ibr::iterative_best_response;
pub(crate) use ibr::{argmax, run as ibr_run};
pub use naive::naive_learn;
pub use report::{LearnerOutput, Parameters, RunReport, TraceRecord, REPORT_SCHEMA_VERSION};
pub use stationary::{stationary_distribution, ColumnStochastic};

use crate::bandit::{BanditEnv, MixedFeedback, RNG_ALGORITHM};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EquilibriumKind {
    Cce,
    Ce,
}

pub(crate) struct ReportBuilder {
    start: Instant,
    samples_at_start: u64,
}

impl ReportBuilder {
    pub(crate) fn start(env: &BanditEnv<'_>) -> Self {
        ReportBuilder {
            start: Instant::now(),
            samples_at_start: env.sample_count(),
        }
    }

    pub(crate) fn finish(
        self,
        algorithm: &str,
        env: &BanditEnv<'_>,
        config: &LearnerConfig,
        output: LearnerOutput,
        ibr_samples: u64,
        parameters: Parameters,
    ) -> RunReport {
        RunReport {
            schema_version: REPORT_SCHEMA_VERSION,
            algorithm: algorithm.to_string(),
            output,
            samples_used: env.sample_count() - self.samples_at_start,
            ibr_samples,
            parameters,
            config: config.clone(),
            seed: env.seed(),
            noise: env.noise(),
            rng: RNG_ALGORITHM.to_string(),
            code_version: crate::CODE_VERSION.to_string(),
            wall_time_secs: self.start.elapsed().as_secs_f64(),
            max_stationary_residual: None,
            solver_calls: None,
            support_history: None,
            trace: None,
        }
    }
}
