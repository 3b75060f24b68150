use super::cce::check_clip;
use super::hedge::{self, Common};
use super::{ibr, params, LearnerConfig, LearnerOutput, Parameters, ReportBuilder, RunReport};
use crate::bandit::BanditEnv;
use crate::error::Result;
use crate::game::{JointDistribution, MixedStrategy};

/// Adaptive swap-regret Hedge for a rationalizable ε-CE.
pub fn adaptive_hedge_ce(env: &mut BanditEnv<'_>, config: &LearnerConfig) -> Result<RunReport> {
    config.validate()?;
    let game = env.game();
    let (n, a) = (game.num_players(), game.max_actions());
    let p = config.clip_for(n, a);
    check_clip(p, a)?;
    let t_max = config
        .rounds
        .unwrap_or_else(|| params::ce_rounds(n, a, config.epsilon, config.delta, config.failure_prob));
    let builder = ReportBuilder::start(env);
    let start = ibr::run(env, config)?;
    let init: Vec<MixedStrategy> = start
        .profile
        .0
        .iter()
        .enumerate()
        .map(|(i, &b)| {
            let k = game.num_actions(i);
            let w = (0..k)
                .map(|c| if c == b { 1.0 - k as f64 * p + p } else { p })
                .collect();
            MixedStrategy::from_weights(w)
        })
        .collect::<Result<_>>()?;
    let common = Common {
        rounds: t_max,
        clip: Some(p),
        trace_every: config.trace_every,
        skip_trivial: false,
    };
    let dynamics = hedge::swap(
        env,
        init,
        &common,
        config.stationary_tol,
        |theta, cum| {
            config
                .minibatch
                .unwrap_or_else(|| params::ce_minibatch(theta, cum, config.delta))
        },
        |cum_b, t| {
            config
                .learning_rate
                .unwrap_or_else(|| params::ce_learning_rate(cum_b, t, a, config.delta, p))
        },
    )?;
    let dist = JointDistribution::average_of_products(dynamics.rounds)?;
    let parameters = Parameters {
        l_bound: Some(start.l_bound),
        ibr_minibatch: Some(start.minibatch),
        rounds: Some(t_max),
        clip_threshold: Some(p),
        clip_inclusive: Some(true),
        ..Parameters::default()
    };
    let mut report = builder.finish(
        "ce",
        env,
        config,
        LearnerOutput::Distribution(dist),
        start.samples,
        parameters,
    );
    report.trace = dynamics.trace;
    report.max_stationary_residual = Some(dynamics.max_residual);
    Ok(report)
}
