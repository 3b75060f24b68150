use super::{params, LearnerConfig, LearnerOutput, Parameters, ReportBuilder, RunReport, TraceRecord};
use crate::bandit::{BanditEnv, MixedFeedback};
use crate::error::Result;
use crate::game::ActionProfile;

pub(crate) struct IbrOutcome {
    pub profile: ActionProfile,
    pub minibatch: u64,
    pub l_bound: usize,
    pub samples: u64,
    pub trace: Vec<TraceRecord>,
}

/// L rounds of simultaneous empirical best responses, starting from the
/// all-zeros profile.
pub(crate) fn run(env: &mut BanditEnv<'_>, config: &LearnerConfig) -> Result<IbrOutcome> {
    let game = env.game();
    let n = game.num_players();
    let a = game.max_actions();
    let l = config.l_bound_for(n, a);
    let m = config
        .minibatch
        .unwrap_or_else(|| params::ibr_minibatch(l, n, a, config.delta, config.failure_prob));
    let before = env.sample_count();
    let mut current = vec![0usize; n];
    let mut trace = Vec::new();
    for round in 1..=l {
        let mut next = current.clone();
        let mut payoffs = Vec::with_capacity(n);
        for (i, slot) in next.iter_mut().enumerate() {
            let mut probe = current.clone();
            let mut means = Vec::with_capacity(game.num_actions(i));
            for act in 0..game.num_actions(i) {
                probe[i] = act;
                means.push(env.pull_player_mean(i, &probe, m)?);
            }
            *slot = argmax(&means);
            payoffs.push(means);
        }
        if config.trace_every > 0 && (round - 1) % config.trace_every == 0 {
            trace.push(TraceRecord {
                round,
                strategies: next
                    .iter()
                    .enumerate()
                    .map(|(i, &b)| {
                        let mut v = vec![0.0; game.num_actions(i)];
                        v[b] = 1.0;
                        v
                    })
                    .collect(),
                payoffs,
                minibatch: vec![m; n],
            });
        }
        current = next;
    }
    let samples = env.sample_count() - before;
    Ok(IbrOutcome {
        profile: ActionProfile(current),
        minibatch: m,
        l_bound: l,
        samples,
        trace,
    })
}

/// First index of the maximum.
pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = k;
        }
    }
    best
}

pub fn iterative_best_response(env: &mut BanditEnv<'_>, config: &LearnerConfig) -> Result<RunReport> {
    config.validate()?;
    let builder = ReportBuilder::start(env);
    let out = run(env, config)?;
    let params = Parameters {
        l_bound: Some(out.l_bound),
        ibr_minibatch: Some(out.minibatch),
        ..Parameters::default()
    };
    let mut report = builder.finish(
        "ibr",
        env,
        config,
        LearnerOutput::Profile(out.profile),
        out.samples,
        params,
    );
    if config.trace_every > 0 {
        report.trace = Some(out.trace);
    }
    Ok(report)
}
