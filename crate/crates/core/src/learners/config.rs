use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Accuracy targets and optional parameter overrides shared by every learner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    /// Rationalizability tolerance Δ.
    pub delta: f64,
    /// Equilibrium accuracy ε.
    pub epsilon: f64,
    /// Failure probability δ.
    pub failure_prob: f64,
    /// Elimination-length bound L; defaults to `N(A-1)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_bound: Option<usize>,
    pub seed: u64,
    /// Fixed minibatch size replacing every M / M_t / M_i^(t) formula.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minibatch: Option<u64>,
    /// Number of Hedge rounds T.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<usize>,
    /// Constant learning rate replacing η_t.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub learning_rate: Option<f64>,
    /// Clipping threshold p.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clip_threshold: Option<f64>,
    /// Record every k-th round in the report trace; 0 disables tracing.
    #[serde(default)]
    pub trace_every: usize,
    #[serde(default = "default_tol")]
    pub stationary_tol: f64,
}

fn default_tol() -> f64 {
    1e-12
}

impl LearnerConfig {
    pub fn new(delta: f64, epsilon: f64, failure_prob: f64, seed: u64) -> Self {
        LearnerConfig {
            delta,
            epsilon,
            failure_prob,
            l_bound: None,
            seed,
            minibatch: None,
            rounds: None,
            learning_rate: None,
            clip_threshold: None,
            trace_every: 0,
            stationary_tol: default_tol(),
        }
    }

    pub fn with_l_bound(mut self, l: usize) -> Self {
        self.l_bound = Some(l);
        self
    }

    pub fn with_rounds(mut self, t: usize) -> Self {
        self.rounds = Some(t);
        self
    }

    pub fn with_minibatch(mut self, m: u64) -> Self {
        self.minibatch = Some(m);
        self
    }

    pub fn with_trace_every(mut self, k: usize) -> Self {
        self.trace_every = k;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return bad(format!("Δ must lie in (0, 1], got {}", self.delta));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return bad(format!("ε must lie in (0, 1], got {}", self.epsilon));
        }
        if !(self.failure_prob > 0.0 && self.failure_prob < 1.0) {
            return bad(format!("δ must lie in (0, 1), got {}", self.failure_prob));
        }
        if self.l_bound == Some(0) {
            return bad("L bound must be at least 1".into());
        }
        if self.minibatch == Some(0) {
            return bad("minibatch must be at least 1".into());
        }
        if self.rounds == Some(0) {
            return bad("rounds must be at least 1".into());
        }
        if let Some(eta) = self.learning_rate {
            if !(eta.is_finite() && eta > 0.0) {
                return bad(format!("learning rate must be positive, got {eta}"));
            }
        }
        if let Some(p) = self.clip_threshold {
            if !(p.is_finite() && p >= 0.0) {
                return bad(format!("clip threshold must be nonnegative, got {p}"));
            }
        }
        if !(self.stationary_tol > 0.0) {
            return bad("stationary tolerance must be positive".into());
        }
        Ok(())
    }

    pub(crate) fn l_bound_for(&self, num_players: usize, max_actions: usize) -> usize {
        self.l_bound
            .unwrap_or(num_players * (max_actions.max(2) - 1))
    }

    /// p, defaulting to `min{ε,Δ}/(8AN)`.
    pub(crate) fn clip_for(&self, num_players: usize, max_actions: usize) -> f64 {
        self.clip_threshold.unwrap_or_else(|| {
            super::params::clip_threshold(self.epsilon, self.delta, max_actions, num_players)
        })
    }
}
