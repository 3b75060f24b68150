use super::{params, EquilibriumKind, LearnerConfig, LearnerOutput, Parameters, ReportBuilder, RunReport};
use crate::bandit::BanditEnv;
use crate::error::{Error, Result};
use crate::game::{NormalFormGame, MAX_PROFILES};
use crate::ide::try_compute_ladder;
use crate::reductions::{default_solvers, SubgameEnv};

/// Estimate the whole game, eliminate (Δ/2)-dominated actions of the
/// empirical game, then solve the surviving subgame to accuracy ε.
pub fn naive_learn(
    env: &mut BanditEnv<'_>,
    config: &LearnerConfig,
    target: EquilibriumKind,
) -> Result<RunReport> {
    config.validate()?;
    let game = env.game();
    let n = game.num_players();
    let profiles = game.num_profiles();
    if profiles > MAX_PROFILES {
        return Err(Error::TooLarge(format!(
            "{profiles} joint profiles exceed the enumeration limit {MAX_PROFILES}"
        )));
    }
    let m = config
        .minibatch
        .unwrap_or_else(|| params::naive_minibatch(profiles, n, config.delta, config.failure_prob));
    let builder = ReportBuilder::start(env);
    let mut tables = vec![vec![0.0; profiles]; n];
    for (idx, profile) in game.profiles().enumerate() {
        let means = env.pull_profile_means(&profile, m)?;
        for (t, u) in tables.iter_mut().zip(means) {
            t[idx] = u;
        }
    }
    let empirical = NormalFormGame::new(game.action_counts().to_vec(), tables)?;
    let ladder = try_compute_ladder(&empirical, config.delta / 2.0)?;
    let solvers = default_solvers();
    let solver = match target {
        EquilibriumKind::Cce => &solvers.cce,
        EquilibriumKind::Ce => &solvers.ce,
    };
    let dist = {
        let mut sub = SubgameEnv::new(env, ladder.survivors.clone())?;
        solver.solve(&mut sub, config.epsilon, config.failure_prob)?
    };
    let parameters = Parameters {
        minibatch: Some(m),
        subgame_epsilon: Some(config.epsilon),
        subgame_failure_prob: Some(config.failure_prob),
        solver: Some(solver.name().to_string()),
        ..Parameters::default()
    };
    let name = match target {
        EquilibriumKind::Cce => "naive-cce",
        EquilibriumKind::Ce => "naive-ce",
    };
    let mut report = builder.finish(name, env, config, LearnerOutput::Distribution(dist), 0, parameters);
    report.support_history = Some(vec![ladder.survivors]);
    Ok(report)
}
