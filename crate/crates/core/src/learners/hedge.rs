//! Hedge dynamics with correlated exploration, shared by the learners and the
//! default subgame solvers.
//!
//! In round `t` every player `i` pulls each of its actions against the
//! opponents' round-`t` strategies, averages the observations into
//! `u_i^(t)`, and updates. Opponent strategies are frozen for the whole round.

use super::stationary::{stationary_distribution, ColumnStochastic};
use super::TraceRecord;
use crate::bandit::MixedFeedback;
use crate::error::Result;
use crate::game::MixedStrategy;

/// Exponents are floored here so that every weight stays positive.
const MIN_EXPONENT: f64 = -600.0;

/// `x ∝ exp(η s)`, computed relative to the maximum score.
pub fn softmax(scores: &[f64], eta: f64) -> MixedStrategy {
    let top = scores
        .iter()
        .map(|s| eta * s)
        .fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = scores
        .iter()
        .map(|s| (eta * s - top).max(MIN_EXPONENT).exp())
        .collect();
    MixedStrategy::from_weights(w).expect("softmax weights are positive")
}

pub(crate) struct Dynamics {
    /// Per-round strategies that make up the output (clipped when requested).
    pub rounds: Vec<Vec<MixedStrategy>>,
    pub trace: Option<Vec<TraceRecord>>,
    pub max_residual: f64,
}

pub(crate) struct Common {
    pub rounds: usize,
    pub clip: Option<f64>,
    pub trace_every: usize,
    /// Leave single-action players alone instead of pulling for them.
    pub skip_trivial: bool,
}

fn opponents_of(theta: &[MixedStrategy], i: usize) -> Vec<MixedStrategy> {
    theta
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, s)| s.clone())
        .collect()
}

fn output_strategies(theta: &[MixedStrategy], clip: Option<f64>) -> Result<Vec<MixedStrategy>> {
    match clip {
        Some(p) => theta.iter().map(|s| s.clipped(p)).collect(),
        None => Ok(theta.to_vec()),
    }
}

fn explore<F: MixedFeedback + ?Sized>(
    env: &mut F,
    theta: &[MixedStrategy],
    minibatch: &[u64],
    skip_trivial: bool,
) -> Result<Vec<Vec<f64>>> {
    let mut u = Vec::with_capacity(theta.len());
    for (i, th) in theta.iter().enumerate() {
        if skip_trivial && th.len() == 1 {
            u.push(vec![0.0]);
            continue;
        }
        let opp = opponents_of(theta, i);
        let mut ui = Vec::with_capacity(th.len());
        for a in 0..th.len() {
            ui.push(env.pull_mixed_mean(i, a, &opp, minibatch[i])?);
        }
        u.push(ui);
    }
    Ok(u)
}

fn should_trace(every: usize, t: usize) -> bool {
    every > 0 && (t - 1) % every == 0
}

/// Hedge on cumulative estimated payoffs; `minibatch(t)` and `eta(t, i)`
/// take the 1-based round.
pub(crate) fn external<F: MixedFeedback + ?Sized>(
    env: &mut F,
    init: Vec<MixedStrategy>,
    common: &Common,
    minibatch: impl Fn(usize) -> u64,
    eta: impl Fn(usize, usize) -> f64,
) -> Result<Dynamics> {
    let n = init.len();
    let mut theta = init;
    let mut cum: Vec<Vec<f64>> = theta.iter().map(|s| vec![0.0; s.len()]).collect();
    let mut rounds = Vec::with_capacity(common.rounds);
    let mut trace = (common.trace_every > 0).then(Vec::new);
    for t in 1..=common.rounds {
        rounds.push(output_strategies(&theta, common.clip)?);
        let m = vec![minibatch(t); n];
        let u = explore(env, &theta, &m, common.skip_trivial)?;
        if let Some(tr) = trace.as_mut().filter(|_| should_trace(common.trace_every, t)) {
            tr.push(TraceRecord {
                round: t,
                strategies: theta.iter().map(|s| s.probs().to_vec()).collect(),
                payoffs: u.clone(),
                minibatch: m.clone(),
            });
        }
        for i in 0..n {
            for (c, x) in cum[i].iter_mut().zip(&u[i]) {
                *c += x;
            }
            theta[i] = softmax(&cum[i], eta(t, i));
        }
    }
    Ok(Dynamics {
        rounds,
        trace,
        max_residual: 0.0,
    })
}

/// Blum–Mansour swap-regret dynamics: one Hedge instance per recommended
/// action `b`, fed `θ(b)·u`, combined through the stationary distribution.
///
/// `minibatch(θ_i, Σθ_i)` gives `M_i^(t)`; `eta(Σ_τ θ_i^(τ)(b), t)` gives the
/// rate of expert `b`.
pub(crate) fn swap<F: MixedFeedback + ?Sized>(
    env: &mut F,
    init: Vec<MixedStrategy>,
    common: &Common,
    tol: f64,
    minibatch: impl Fn(&[f64], &[f64]) -> u64,
    eta: impl Fn(f64, usize) -> f64,
) -> Result<Dynamics> {
    let n = init.len();
    let mut theta = init;
    let mut cum_theta: Vec<Vec<f64>> = theta.iter().map(|s| vec![0.0; s.len()]).collect();
    // cum_pay[i][b][a] = Σ_τ θ_i^(τ)(b) u_i^(τ)(a)
    let mut cum_pay: Vec<Vec<Vec<f64>>> = theta
        .iter()
        .map(|s| vec![vec![0.0; s.len()]; s.len()])
        .collect();
    let mut rounds = Vec::with_capacity(common.rounds);
    let mut trace = (common.trace_every > 0).then(Vec::new);
    let mut max_residual = 0.0f64;
    for t in 1..=common.rounds {
        rounds.push(output_strategies(&theta, common.clip)?);
        for (c, s) in cum_theta.iter_mut().zip(&theta) {
            for (x, p) in c.iter_mut().zip(s.probs()) {
                *x += p;
            }
        }
        let m: Vec<u64> = theta
            .iter()
            .zip(&cum_theta)
            .map(|(s, c)| minibatch(s.probs(), c))
            .collect();
        let u = explore(env, &theta, &m, common.skip_trivial)?;
        if let Some(tr) = trace.as_mut().filter(|_| should_trace(common.trace_every, t)) {
            tr.push(TraceRecord {
                round: t,
                strategies: theta.iter().map(|s| s.probs().to_vec()).collect(),
                payoffs: u.clone(),
                minibatch: m.clone(),
            });
        }
        for i in 0..n {
            let k = theta[i].len();
            if k == 1 {
                continue;
            }
            let columns: Vec<Vec<f64>> = (0..k)
                .map(|b| {
                    let wb = theta[i].prob(b);
                    for (c, x) in cum_pay[i][b].iter_mut().zip(&u[i]) {
                        *c += wb * x;
                    }
                    softmax(&cum_pay[i][b], eta(cum_theta[i][b], t)).probs().to_vec()
                })
                .collect();
            let matrix = ColumnStochastic::from_columns(&columns)?;
            let (next, r) = stationary_distribution(&matrix, &theta[i], tol)?;
            max_residual = max_residual.max(r);
            theta[i] = next;
        }
    }
    Ok(Dynamics {
        rounds,
        trace,
        max_residual,
    })
}
