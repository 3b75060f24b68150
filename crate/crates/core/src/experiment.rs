//! Reproducible trials: game sources, algorithm dispatch, success criteria
//! and summary statistics.

use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bandit::{BanditEnv, Noise};
use crate::error::{invalid, Error, Result};
use crate::game::{
    gen_chain_game, gen_dominated_pennies, gen_hardness_game, gen_lower_bound_game,
    gen_matching_pennies, gen_prisoners_dilemma, gen_random_game, load_game, HardnessVariant,
    LowerBoundVariant, NormalFormGame,
};
use crate::ide::try_compute_ladder;
use crate::learners::{
    adaptive_hedge_ce, hedge_cce, iterative_best_response, naive_learn, EquilibriumKind,
    LearnerConfig, LearnerOutput, RunReport,
};
use crate::reductions::{ce_reduction, cce_reduction, solver_by_name};
use crate::verify::{ce_gap, cce_gap, VERIFY_TOL};

pub const RECORD_SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Ibr,
    NaiveCce,
    NaiveCe,
    Cce,
    Ce,
    CceReduce,
    CeReduce,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Ibr,
        Algorithm::NaiveCce,
        Algorithm::NaiveCe,
        Algorithm::Cce,
        Algorithm::Ce,
        Algorithm::CceReduce,
        Algorithm::CeReduce,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Ibr => "ibr",
            Algorithm::NaiveCce => "naive-cce",
            Algorithm::NaiveCe => "naive-ce",
            Algorithm::Cce => "cce",
            Algorithm::Ce => "ce",
            Algorithm::CceReduce => "cce-reduce",
            Algorithm::CeReduce => "ce-reduce",
        }
    }

    /// The equilibrium notion the output is judged by; `None` for IBR.
    pub fn target(self) -> Option<EquilibriumKind> {
        match self {
            Algorithm::Ibr => None,
            Algorithm::NaiveCce | Algorithm::Cce | Algorithm::CceReduce => Some(EquilibriumKind::Cce),
            Algorithm::NaiveCe | Algorithm::Ce | Algorithm::CeReduce => Some(EquilibriumKind::Ce),
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| invalid(format!("unknown algorithm {s:?}")))
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// A named fixture generator with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", rename_all = "kebab-case")]
pub enum GeneratorSpec {
    Pd,
    MatchingPennies,
    DominatedPennies,
    LowerBound {
        players: usize,
        actions: usize,
        delta: f64,
        /// `(player, action)` of the bonus variant; absent for the base game.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        bonus: Option<(usize, usize)>,
    },
    Hardness {
        players: usize,
        actions: usize,
        delta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        target: Option<Vec<usize>>,
    },
    Chain {
        actions: usize,
        delta: f64,
    },
    Random {
        actions: Vec<usize>,
        seed: u64,
    },
}

impl GeneratorSpec {
    pub fn generate(&self) -> Result<NormalFormGame> {
        match self {
            GeneratorSpec::Pd => Ok(gen_prisoners_dilemma()),
            GeneratorSpec::MatchingPennies => Ok(gen_matching_pennies()),
            GeneratorSpec::DominatedPennies => Ok(gen_dominated_pennies()),
            GeneratorSpec::LowerBound { players, actions, delta, bonus } => {
                let variant = match bonus {
                    None => LowerBoundVariant::Base,
                    Some((player, action)) => LowerBoundVariant::Bonus {
                        player: *player,
                        action: *action,
                    },
                };
                gen_lower_bound_game(*players, *actions, *delta, &variant)
            }
            GeneratorSpec::Hardness { players, actions, delta, target } => {
                let variant = match target {
                    None => HardnessVariant::Base,
                    Some(t) => HardnessVariant::Target(t.clone()),
                };
                gen_hardness_game(*players, *actions, *delta, &variant)
            }
            GeneratorSpec::Chain { actions, delta } => gen_chain_game(*actions, *delta),
            GeneratorSpec::Random { actions, seed } => {
                if actions.is_empty() || actions.contains(&0) {
                    return Err(invalid("random game needs positive action counts"));
                }
                let profiles = actions.iter().try_fold(1usize, |acc, &c| acc.checked_mul(c));
                if profiles.map_or(true, |p| p > crate::game::MAX_PROFILES) {
                    return Err(Error::TooLarge(format!("random game with actions {actions:?}")));
                }
                Ok(gen_random_game(actions.len(), actions, *seed))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameSource {
    Generator(GeneratorSpec),
    File(PathBuf),
}

impl GameSource {
    pub fn load(&self) -> Result<NormalFormGame> {
        match self {
            GameSource::Generator(g) => g.generate(),
            GameSource::File(p) => load_game(p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub game: GameSource,
    pub algorithm: Algorithm,
    #[serde(default = "default_solver")]
    pub solver: String,
    /// Template config; trial `k` runs with seed `seed_base + k`.
    pub learner: LearnerConfig,
    #[serde(default)]
    pub noise: Noise,
    pub trials: usize,
    pub seed_base: u64,
}

fn default_solver() -> String {
    "default".into()
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trial count must be at least 1".into()));
        }
        self.learner.validate()?;
        if let Some(kind) = self.algorithm.target() {
            if matches!(self.algorithm, Algorithm::CceReduce | Algorithm::CeReduce)
                && solver_by_name(&self.solver, kind).is_none()
            {
                return Err(Error::Config(format!("unknown solver {:?}", self.solver)));
            }
        }
        Ok(())
    }

    pub fn trial_config(&self, trial: usize) -> LearnerConfig {
        let mut c = self.learner.clone();
        c.seed = self.seed_base.wrapping_add(trial as u64);
        c
    }
}

/// Run one algorithm on a fresh env seeded from `config.seed`.
pub fn run_algorithm(
    game: &NormalFormGame,
    algorithm: Algorithm,
    solver: &str,
    config: &LearnerConfig,
    noise: Noise,
) -> Result<RunReport> {
    let mut env = BanditEnv::new(game, config.seed, noise);
    let plugin = |kind| {
        solver_by_name(solver, kind).ok_or_else(|| Error::Config(format!("unknown solver {solver:?}")))
    };
    match algorithm {
        Algorithm::Ibr => iterative_best_response(&mut env, config),
        Algorithm::NaiveCce => naive_learn(&mut env, config, EquilibriumKind::Cce),
        Algorithm::NaiveCe => naive_learn(&mut env, config, EquilibriumKind::Ce),
        Algorithm::Cce => hedge_cce(&mut env, config),
        Algorithm::Ce => adaptive_hedge_ce(&mut env, config),
        Algorithm::CceReduce => cce_reduction(&mut env, config, plugin(EquilibriumKind::Cce)?.as_ref()),
        Algorithm::CeReduce => ce_reduction(&mut env, config, plugin(EquilibriumKind::Ce)?.as_ref()),
    }
}

/// Exact verdict on a run's output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub success: bool,
    /// Probability of playing a Δ-IDA (0 or 1 for a profile).
    pub ida_mass: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gap: Option<f64>,
}

/// Success means: no Δ-IDA is ever played and, for equilibrium learners,
/// the exact gap of the target notion is at most ε.
pub fn evaluate(game: &NormalFormGame, algorithm: Algorithm, report: &RunReport) -> Result<Evaluation> {
    let config = &report.config;
    let ladder = try_compute_ladder(game, config.delta)?;
    match &report.output {
        LearnerOutput::Profile(p) => {
            game.check_profile(p.actions())?;
            let bad = p.actions().iter().enumerate().any(|(i, &a)| ladder.is_eliminated(i, a));
            Ok(Evaluation {
                success: !bad,
                ida_mass: if bad { 1.0 } else { 0.0 },
                gap: None,
            })
        }
        LearnerOutput::Distribution(d) => {
            d.check_shape(game.action_counts())?;
            let ida_mass = ladder.ida_mass(d);
            let gap = match algorithm.target() {
                Some(EquilibriumKind::Ce) => ce_gap(game, d)?.max_gap,
                _ => cce_gap(game, d)?.max_gap,
            };
            Ok(Evaluation {
                success: ida_mass == 0.0 && gap <= config.epsilon + VERIFY_TOL,
                ida_mass,
                gap: Some(gap),
            })
        }
    }
}

/// Everything needed to audit or replay one trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub schema_version: u32,
    pub code_version: String,
    pub experiment: ExperimentConfig,
    pub trial: usize,
    pub game: NormalFormGame,
    pub report: RunReport,
    pub evaluation: Evaluation,
}

pub fn run_trial(experiment: &ExperimentConfig, game: &NormalFormGame, trial: usize) -> Result<TrialRecord> {
    let config = experiment.trial_config(trial);
    let report = run_algorithm(game, experiment.algorithm, &experiment.solver, &config, experiment.noise)?;
    let evaluation = evaluate(game, experiment.algorithm, &report)?;
    Ok(TrialRecord {
        schema_version: RECORD_SCHEMA_VERSION,
        code_version: crate::CODE_VERSION.to_string(),
        experiment: experiment.clone(),
        trial,
        game: game.clone(),
        report,
        evaluation,
    })
}

/// Re-run a recorded trial from its embedded game and config.
pub fn replay(record: &TrialRecord) -> Result<RunReport> {
    run_algorithm(
        &record.game,
        record.experiment.algorithm,
        &record.experiment.solver,
        &record.report.config,
        record.report.noise,
    )
}

/// True when the replayed report equals the recorded one up to wall time.
pub fn replay_matches(record: &TrialRecord) -> Result<bool> {
    Ok(replay(record)?.canonical_json() == record.report.canonical_json())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub alg: String,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "A")]
    pub a: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub delta: f64,
    pub epsilon: f64,
    pub trials: usize,
    pub success_rate: f64,
    pub mean_samples: f64,
    pub p95_samples: u64,
}

/// Aggregate trials of one configuration. `L` is the exact ladder length at Δ.
pub fn summarize(game: &NormalFormGame, experiment: &ExperimentConfig, records: &[TrialRecord]) -> Result<SummaryRow> {
    if records.is_empty() {
        return Err(invalid("no trials to summarize"));
    }
    let ladder = try_compute_ladder(game, experiment.learner.delta)?;
    let mut samples: Vec<u64> = records.iter().map(|r| r.report.samples_used).collect();
    samples.sort_unstable();
    let k = samples.len();
    // nearest-rank percentile
    let rank = ((0.95 * k as f64).ceil() as usize).clamp(1, k);
    Ok(SummaryRow {
        alg: experiment.algorithm.name().to_string(),
        n: game.num_players(),
        a: game.max_actions(),
        l: ladder.length,
        delta: experiment.learner.delta,
        epsilon: experiment.learner.epsilon,
        trials: k,
        success_rate: records.iter().filter(|r| r.evaluation.success).count() as f64 / k as f64,
        mean_samples: samples.iter().map(|&s| s as f64).sum::<f64>() / k as f64,
        p95_samples: samples[rank - 1],
    })
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
