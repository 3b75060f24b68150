use super::hedge::{self, Common};
use super::{ibr, params, LearnerConfig, LearnerOutput, Parameters, ReportBuilder, RunReport};
use crate::bandit::BanditEnv;
use crate::error::{Error, Result};
use crate::game::{JointDistribution, MixedStrategy};

pub(crate) fn check_clip(p: f64, max_actions: usize) -> Result<()> {
    if p * max_actions as f64 >= 1.0 {
        return Err(Error::Config(format!(
            "clip threshold {p} is too large for {max_actions} actions"
        )));
    }
    Ok(())
}

/// Hedge for a rationalizable ε-CCE: IBR initialisation, correlated
/// exploration with shrinking minibatches, clipped average output.
pub fn hedge_cce(env: &mut BanditEnv<'_>, config: &LearnerConfig) -> Result<RunReport> {
    config.validate()?;
    let game = env.game();
    let (n, a) = (game.num_players(), game.max_actions());
    let p = config.clip_for(n, a);
    check_clip(p, a)?;
    let t_max = config
        .rounds
        .unwrap_or_else(|| params::cce_rounds(n, a, config.epsilon, config.delta, config.failure_prob));
    let builder = ReportBuilder::start(env);
    let start = ibr::run(env, config)?;
    let init: Vec<MixedStrategy> = start
        .profile
        .0
        .iter()
        .enumerate()
        .map(|(i, &b)| MixedStrategy::pure(game.num_actions(i), b))
        .collect();
    let common = Common {
        rounds: t_max,
        clip: Some(p),
        trace_every: config.trace_every,
        skip_trivial: false,
    };
    let dynamics = hedge::external(
        env,
        init,
        &common,
        |t| {
            config.minibatch.unwrap_or_else(|| {
                params::cce_minibatch(t, n, a, t_max, config.delta, config.failure_prob)
            })
        },
        |t, _| {
            config
                .learning_rate
                .unwrap_or_else(|| params::cce_learning_rate(t, a, config.delta, p))
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
        "cce",
        env,
        config,
        LearnerOutput::Distribution(dist),
        start.samples,
        parameters,
    );
    report.trace = dynamics.trace;
    Ok(report)
}
