//! Support-expansion reductions from any subgame (coarse) correlated
//! equilibrium solver to a rationalizable one.
//!
//! Starting from the IBR profile, each outer iteration solves the subgame on
//! the current action sets, estimates every player's payoff for every action
//! against the solution (or its conditionals, for CE), and adds empirical best
//! responses. It stops as soon as no set grows.

use rand::Rng;

use crate::bandit::{BanditEnv, MixedFeedback};
use crate::error::{dim, invalid, Error, Result};
use crate::game::strategy::ComponentSampler;
use crate::game::{ActionProfile, JointDistribution, MixedStrategy, ProductComponent};
use crate::learners::hedge::{self, Common};
use crate::learners::{
    params, EquilibriumKind, LearnerConfig, LearnerOutput, Parameters, ReportBuilder, RunReport,
};

/// Bandit access restricted to `∏_i subsets[i]`. Local action `k` of player
/// `i` is global action `subsets[i][k]`.
pub struct SubgameEnv<'a, 'g> {
    env: &'a mut BanditEnv<'g>,
    subsets: Vec<Vec<usize>>,
    counts: Vec<usize>,
}

impl<'a, 'g> SubgameEnv<'a, 'g> {
    pub fn new(env: &'a mut BanditEnv<'g>, mut subsets: Vec<Vec<usize>>) -> Result<Self> {
        let game = env.game();
        if subsets.len() != game.num_players() {
            return Err(dim("one action subset per player required"));
        }
        for (i, s) in subsets.iter_mut().enumerate() {
            s.sort_unstable();
            s.dedup();
            if s.is_empty() || s.iter().any(|&a| a >= game.num_actions(i)) {
                return Err(invalid(format!("bad action subset for player {i}: {s:?}")));
            }
        }
        let counts = subsets.iter().map(Vec::len).collect();
        Ok(SubgameEnv { env, subsets, counts })
    }

    pub fn subsets(&self) -> &[Vec<usize>] {
        &self.subsets
    }

    pub fn global_action(&self, player: usize, local: usize) -> usize {
        self.subsets[player][local]
    }

    pub fn lift_strategy(&self, player: usize, local: &MixedStrategy) -> Result<MixedStrategy> {
        if local.len() != self.counts[player] {
            return Err(dim(format!(
                "local strategy for player {player} has {} entries, expected {}",
                local.len(),
                self.counts[player]
            )));
        }
        let mut probs = vec![0.0; self.env.game().num_actions(player)];
        for (k, &a) in self.subsets[player].iter().enumerate() {
            probs[a] = local.prob(k);
        }
        MixedStrategy::new(probs)
    }

    /// Re-express a subgame distribution in the full game's coordinates.
    pub fn lift(&self, local: &JointDistribution) -> Result<JointDistribution> {
        local.check_shape(&self.counts)?;
        let components = local
            .components()
            .iter()
            .map(|c| {
                Ok(ProductComponent {
                    weight: c.weight,
                    strategies: c
                        .strategies
                        .iter()
                        .enumerate()
                        .map(|(i, s)| self.lift_strategy(i, s))
                        .collect::<Result<_>>()?,
                })
            })
            .collect::<Result<_>>()?;
        JointDistribution::new(components)
    }

    fn lift_opponents(&self, player: usize, opponents: &[MixedStrategy]) -> Result<Vec<MixedStrategy>> {
        if opponents.len() + 1 != self.counts.len() {
            return Err(dim("one strategy per opponent required"));
        }
        (0..self.counts.len())
            .filter(|&j| j != player)
            .zip(opponents)
            .map(|(j, s)| self.lift_strategy(j, s))
            .collect()
    }

    fn check_local(&self, player: usize, action: usize) -> Result<()> {
        if player >= self.counts.len() || action >= self.counts[player] {
            return Err(invalid(format!("no local action {action} for player {player}")));
        }
        Ok(())
    }
}

impl MixedFeedback for SubgameEnv<'_, '_> {
    fn action_counts(&self) -> &[usize] {
        &self.counts
    }

    fn pull_mixed(&mut self, player: usize, action: usize, opponents: &[MixedStrategy]) -> Result<f64> {
        self.pull_mixed_mean(player, action, opponents, 1)
    }

    fn pull_mixed_mean(
        &mut self,
        player: usize,
        action: usize,
        opponents: &[MixedStrategy],
        m: u64,
    ) -> Result<f64> {
        self.check_local(player, action)?;
        let lifted = self.lift_opponents(player, opponents)?;
        let global = self.subsets[player][action];
        self.env.pull_mixed_mean(player, global, &lifted, m)
    }

    fn sample_count(&self) -> u64 {
        self.env.sample_count()
    }
}

/// A black-box subgame equilibrium finder. Implementations only see the
/// restricted env and must return a distribution in full-game coordinates
/// supported on the env's subsets.
pub trait SubgameSolver: Send + Sync {
    fn name(&self) -> &str;

    fn kind(&self) -> EquilibriumKind;

    fn solve(&self, env: &mut SubgameEnv<'_, '_>, epsilon: f64, failure_prob: f64)
        -> Result<JointDistribution>;
}

/// Plain Hedge with unit minibatches and uniform initialisation.
#[derive(Clone, Copy, Debug, Default)]
pub struct HedgeCceSolver;

/// Plain Blum–Mansour swap-regret Hedge with unit minibatches.
#[derive(Clone, Copy, Debug, Default)]
pub struct SwapHedgeCeSolver;

fn trivial_subgame(env: &SubgameEnv<'_, '_>) -> Option<Result<JointDistribution>> {
    env.counts.iter().all(|&c| c == 1).then(|| {
        let local = JointDistribution::point_mass(&env.counts, &vec![0; env.counts.len()])?;
        env.lift(&local)
    })
}

fn subgame_dims(env: &SubgameEnv<'_, '_>) -> (usize, usize) {
    (env.counts.len(), env.counts.iter().copied().max().unwrap_or(1))
}

impl SubgameSolver for HedgeCceSolver {
    fn name(&self) -> &str {
        "hedge"
    }

    fn kind(&self) -> EquilibriumKind {
        EquilibriumKind::Cce
    }

    fn solve(&self, env: &mut SubgameEnv<'_, '_>, epsilon: f64, failure_prob: f64) -> Result<JointDistribution> {
        if let Some(d) = trivial_subgame(env) {
            return d;
        }
        let (n, a) = subgame_dims(env);
        let init: Vec<MixedStrategy> = env.counts.iter().map(|&c| MixedStrategy::uniform(c)).collect();
        let counts = env.counts.clone();
        let common = Common {
            rounds: params::plugin_rounds(n, a, epsilon, failure_prob),
            clip: None,
            trace_every: 0,
            skip_trivial: true,
        };
        let dyns = hedge::external(env, init, &common, |_| 1, |t, i| {
            ((counts[i] as f64).ln() / t as f64).sqrt()
        })?;
        env.lift(&JointDistribution::average_of_products(dyns.rounds)?)
    }
}

impl SubgameSolver for SwapHedgeCeSolver {
    fn name(&self) -> &str {
        "swap-hedge"
    }

    fn kind(&self) -> EquilibriumKind {
        EquilibriumKind::Ce
    }

    fn solve(&self, env: &mut SubgameEnv<'_, '_>, epsilon: f64, failure_prob: f64) -> Result<JointDistribution> {
        if let Some(d) = trivial_subgame(env) {
            return d;
        }
        let (n, a) = subgame_dims(env);
        let init: Vec<MixedStrategy> = env.counts.iter().map(|&c| MixedStrategy::uniform(c)).collect();
        let af = a as f64;
        let common = Common {
            rounds: a * params::plugin_rounds(n, a, epsilon, failure_prob),
            clip: None,
            trace_every: 0,
            skip_trivial: true,
        };
        let dyns = hedge::swap(env, init, &common, 1e-12, |_, _| 1, |_, t| {
            (af * af.ln() / t as f64).sqrt()
        })?;
        env.lift(&JointDistribution::average_of_products(dyns.rounds)?)
    }
}

pub struct DefaultSolvers {
    pub cce: Box<dyn SubgameSolver>,
    pub ce: Box<dyn SubgameSolver>,
}

pub fn default_solvers() -> DefaultSolvers {
    DefaultSolvers {
        cce: Box::new(HedgeCceSolver),
        ce: Box::new(SwapHedgeCeSolver),
    }
}

/// Plugin registry. `"default"` maps to the built-in solver of each kind.
pub fn solver_by_name(name: &str, kind: EquilibriumKind) -> Option<Box<dyn SubgameSolver>> {
    match (name, kind) {
        ("default" | "hedge", EquilibriumKind::Cce) => Some(Box::new(HedgeCceSolver)),
        ("default" | "swap-hedge", EquilibriumKind::Ce) => Some(Box::new(SwapHedgeCeSolver)),
        _ => None,
    }
}

/// Draw a joint profile from `Π | a_i = recommendation`: a component is
/// chosen with probability ∝ `weight · θ_i(a_i)`, then every opponent samples
/// from it. The returned profile carries the recommendation in slot `player`.
pub fn sample_from_conditional<R: Rng + ?Sized>(
    dist: &JointDistribution,
    player: usize,
    recommendation: usize,
    rng: &mut R,
) -> Result<ActionProfile> {
    let sampler = conditional_sampler(dist, player, recommendation)?;
    Ok(ActionProfile(draw_with(&sampler, dist, player, recommendation, rng)))
}

fn conditional_sampler(dist: &JointDistribution, player: usize, rec: usize) -> Result<ComponentSampler> {
    if player >= dist.num_players() || rec >= dist.action_counts()[player] {
        return Err(invalid(format!("no action {rec} for player {player}")));
    }
    ComponentSampler::new(
        dist.components()
            .iter()
            .map(|c| c.weight * c.strategies[player].prob(rec))
            .collect(),
    )
    .ok_or_else(|| invalid(format!("recommendation {rec} of player {player} has zero marginal")))
}

fn draw_with<R: Rng + ?Sized>(
    sampler: &ComponentSampler,
    dist: &JointDistribution,
    player: usize,
    own: usize,
    rng: &mut R,
) -> Vec<usize> {
    let c = &dist.components()[sampler.draw(rng)];
    c.strategies
        .iter()
        .enumerate()
        .map(|(j, s)| if j == player { own } else { s.sample(rng) })
        .collect()
}

fn empirical_best_response(
    env: &mut BanditEnv<'_>,
    dist: &JointDistribution,
    sampler: &ComponentSampler,
    player: usize,
    m: u64,
) -> Result<usize> {
    let k = env.game().num_actions(player);
    let mut means = Vec::with_capacity(k);
    for a in 0..k {
        let mut sum = 0.0;
        for _ in 0..m {
            let profile = draw_with(sampler, dist, player, a, env.rng());
            sum += env.pull_player(player, &profile)?;
        }
        means.push(sum / m as f64);
    }
    Ok(crate::learners::argmax(&means))
}

fn insert_sorted(set: &mut Vec<usize>, a: usize) {
    if let Err(pos) = set.binary_search(&a) {
        set.insert(pos, a);
    }
}

fn reduction(
    env: &mut BanditEnv<'_>,
    config: &LearnerConfig,
    solver: &dyn SubgameSolver,
    kind: EquilibriumKind,
) -> Result<RunReport> {
    config.validate()?;
    let game = env.game();
    let (n, a) = (game.num_players(), game.max_actions());
    let eps = params::reduction_accuracy(config.epsilon, config.delta);
    let m = config.minibatch.unwrap_or_else(|| match kind {
        EquilibriumKind::Cce => params::cce_reduction_minibatch(n, a, config.failure_prob, eps),
        EquilibriumKind::Ce => params::ce_reduction_minibatch(n, a, config.failure_prob, eps),
    });
    let solver_fail = config.failure_prob / (n * a) as f64;
    let builder = ReportBuilder::start(env);
    let start = crate::learners::ibr_run(env, config)?;
    let mut sets: Vec<Vec<usize>> = start.profile.0.iter().map(|&b| vec![b]).collect();
    let mut history = vec![sets.clone()];
    let mut calls = 0;
    let dist = loop {
        calls += 1;
        let dist = {
            let mut sub = SubgameEnv::new(env, sets.clone())?;
            solver.solve(&mut sub, eps, solver_fail)?
        };
        if dist.check_shape(game.action_counts()).is_err() || !dist.supported_within(&sets) {
            return Err(Error::SolverContract(format!(
                "solver {:?} returned a distribution outside {sets:?}",
                solver.name()
            )));
        }
        let mut next = sets.clone();
        for i in 0..n {
            match kind {
                EquilibriumKind::Cce => {
                    let sampler = ComponentSampler::new(dist.components().iter().map(|c| c.weight).collect())
                        .ok_or_else(|| Error::SolverContract("zero-weight distribution".into()))?;
                    let br = empirical_best_response(env, &dist, &sampler, i, m)?;
                    insert_sorted(&mut next[i], br);
                }
                EquilibriumKind::Ce => {
                    let marginal = dist.marginal(i);
                    for &rec in &sets[i] {
                        if marginal[rec] <= 0.0 {
                            continue;
                        }
                        let sampler = conditional_sampler(&dist, i, rec)?;
                        let br = empirical_best_response(env, &dist, &sampler, i, m)?;
                        insert_sorted(&mut next[i], br);
                    }
                }
            }
        }
        if next == sets {
            break dist;
        }
        sets = next;
        history.push(sets.clone());
    };
    let parameters = Parameters {
        l_bound: Some(start.l_bound),
        ibr_minibatch: Some(start.minibatch),
        minibatch: Some(m),
        subgame_epsilon: Some(eps),
        subgame_failure_prob: Some(solver_fail),
        solver: Some(solver.name().to_string()),
        ..Parameters::default()
    };
    let name = match kind {
        EquilibriumKind::Cce => "cce-reduce",
        EquilibriumKind::Ce => "ce-reduce",
    };
    let mut report = builder.finish(
        name,
        env,
        config,
        LearnerOutput::Distribution(dist),
        start.samples,
        parameters,
    );
    report.solver_calls = Some(calls);
    report.support_history = Some(history);
    Ok(report)
}

pub fn cce_reduction(
    env: &mut BanditEnv<'_>,
    config: &LearnerConfig,
    solver: &dyn SubgameSolver,
) -> Result<RunReport> {
    reduction(env, config, solver, EquilibriumKind::Cce)
}

/// As [`cce_reduction`], but each recommendation with positive marginal is
/// tested separately against the conditional `Π | a_i`; the best response
/// still ranges over all of `A_i`.
pub fn ce_reduction(
    env: &mut BanditEnv<'_>,
    config: &LearnerConfig,
    solver: &dyn SubgameSolver,
) -> Result<RunReport> {
    reduction(env, config, solver, EquilibriumKind::Ce)
}
