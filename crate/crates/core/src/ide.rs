//! Exact Δ-iterated dominance elimination.
//!
//! An action `a` of player `i` is Δ-dominated against a set of admissible
//! opponent profiles when some mixture `x ∈ Δ(A_i)` beats it by at least Δ on
//! every one of those profiles. The largest such advantage (the *dominance
//! margin*) is a maximin linear program over the explicitly enumerated
//! admissible profiles. The never-best-response margin is the same quantity
//! seen from the other side (min over correlated opponent beliefs of the best
//! reply advantage) and is solved as a separate LP; by the minimax theorem
//! the two agree.

use serde::{Deserialize, Serialize};

use crate::error::{dim, invalid, Error, Result};
use crate::game::{ActionProfile, JointDistribution, MixedStrategy, NormalFormGame, ProfileIter};
use crate::lp::{LinearProgram, Relation, Sense};

/// Slack for LP feasibility and for comparing a margin against Δ.
pub const LP_TOL: f64 = 1e-9;

/// Elimination test: margin at least Δ (ties eliminate) and strictly positive.
///
/// The positivity requirement matters only for Δ = 0, where every action
/// trivially "dominates itself" with margin 0; there it reduces to ordinary
/// strict dominance.
pub fn margin_eliminates(margin: f64, delta: f64) -> bool {
    margin > LP_TOL && margin >= delta - LP_TOL
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DominanceCertificate {
    pub dominating_mixture: MixedStrategy,
    /// `min_{a_{-i}} u_i(x, a_{-i}) - u_i(a, a_{-i})` over the admissible set.
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EliminationLadder {
    pub delta: f64,
    /// `rounds[l]` holds the `(player, action)` pairs first removed in round `l + 1`.
    pub rounds: Vec<Vec<(usize, usize)>>,
    /// Minimum elimination length: the number of nonempty rounds.
    pub length: usize,
    pub survivors: Vec<Vec<usize>>,
}

impl EliminationLadder {
    /// True if the action lies in `E_L` (is a Δ-IDA).
    pub fn is_eliminated(&self, player: usize, action: usize) -> bool {
        !self.survivors[player].contains(&action)
    }

    /// 1-based round in which the action was removed.
    pub fn elimination_round(&self, player: usize, action: usize) -> Option<usize> {
        self.rounds
            .iter()
            .position(|r| r.contains(&(player, action)))
            .map(|l| l + 1)
    }

    /// The cumulative set `E_l` (sorted `(player, action)` pairs).
    pub fn cumulative(&self, l: usize) -> Vec<(usize, usize)> {
        let mut set: Vec<(usize, usize)> =
            self.rounds.iter().take(l).flatten().copied().collect();
        set.sort_unstable();
        set
    }

    /// Player `i`'s Δ-IDAs, sorted.
    pub fn eliminated(&self, player: usize, num_actions: usize) -> Vec<usize> {
        (0..num_actions)
            .filter(|a| !self.survivors[player].contains(a))
            .collect()
    }

    /// Probability a product strategy profile puts on profiles touching `E_L`.
    pub fn ida_mass_of_product(&self, strategies: &[MixedStrategy]) -> f64 {
        let clean: f64 = strategies
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let bad: f64 = (0..s.len())
                    .filter(|&a| self.is_eliminated(i, a))
                    .map(|a| s.prob(a))
                    .sum();
                1.0 - bad
            })
            .product();
        1.0 - clean
    }

    /// Exact probability that `dist` plays a profile with at least one Δ-IDA.
    pub fn ida_mass(&self, dist: &JointDistribution) -> f64 {
        dist.components()
            .iter()
            .map(|c| c.weight * self.ida_mass_of_product(&c.strategies))
            .sum()
    }
}

fn check_admissible(
    game: &NormalFormGame,
    player: usize,
    action: usize,
    admissible: &[Vec<usize>],
) -> Result<()> {
    if player >= game.num_players() || action >= game.num_actions(player) {
        return Err(invalid(format!("no action {action} for player {player}")));
    }
    if admissible.len() != game.num_players() {
        return Err(dim(format!(
            "admissible sets: expected {} lists, got {}",
            game.num_players(),
            admissible.len()
        )));
    }
    for (j, set) in admissible.iter().enumerate() {
        if j == player {
            continue;
        }
        if set.is_empty() {
            return Err(invalid(format!("admissible set of player {j} is empty")));
        }
        if let Some(a) = set.iter().find(|&&a| a >= game.num_actions(j)) {
            return Err(invalid(format!("admissible action {a} out of range for player {j}")));
        }
    }
    Ok(())
}

/// `d[p][k] = u_i(k, p) - u_i(action, p)` for each admissible opponent profile `p`.
fn advantage_rows(
    game: &NormalFormGame,
    player: usize,
    action: usize,
    admissible: &[Vec<usize>],
) -> Vec<Vec<f64>> {
    let sizes: Vec<usize> = (0..game.num_players())
        .map(|j| if j == player { 1 } else { admissible[j].len() })
        .collect();
    let stride = game.stride(player);
    let table = game.table(player);
    let mut profile = vec![0; game.num_players()];
    ProfileIter::new(&sizes)
        .map(|local| {
            for (j, &k) in local.iter().enumerate() {
                profile[j] = if j == player { 0 } else { admissible[j][k] };
            }
            let base = game.flat_index(&profile);
            let own = table[base + action * stride];
            (0..game.num_actions(player))
                .map(|k| table[base + k * stride] - own)
                .collect()
        })
        .collect()
}

/// Largest Δ for which `action` is Δ-dominated against the admissible
/// opponent sets, with a dominating mixture attaining it.
///
/// `admissible` has one entry per player; the entry for `player` itself is
/// ignored (the dominating mixture ranges over all of `A_i`).
pub fn dominance_margin(
    game: &NormalFormGame,
    player: usize,
    action: usize,
    admissible: &[Vec<usize>],
) -> Result<(f64, DominanceCertificate)> {
    check_admissible(game, player, action, admissible)?;
    let n = game.num_actions(player);
    let trivial = || {
        (
            0.0,
            DominanceCertificate {
                dominating_mixture: MixedStrategy::pure(n, action),
                margin: 0.0,
            },
        )
    };
    if n == 1 {
        return Ok(trivial());
    }
    let rows = advantage_rows(game, player, action, admissible);
    // variables: x_0..x_{n-1}, margin
    let mut objective = vec![0.0; n + 1];
    objective[n] = 1.0;
    let mut lp = LinearProgram::new(Sense::Maximize, objective);
    for d in &rows {
        let mut coeffs: Vec<f64> = d.iter().map(|v| -v).collect();
        coeffs.push(1.0);
        lp.add_constraint(coeffs, Relation::Le, 0.0);
    }
    let mut simplex = vec![1.0; n + 1];
    simplex[n] = 0.0;
    lp.add_constraint(simplex, Relation::Eq, 1.0);
    let sol = lp
        .solve()
        .map_err(|e| Error::Internal(format!("dominance LP: {e}")))?;
    let Ok(mixture) = MixedStrategy::from_weights(sol.x[..n].to_vec()) else {
        return Ok(trivial());
    };
    let margin = replay_margin(&rows, &mixture);
    if margin <= 0.0 {
        return Ok(trivial());
    }
    if (margin - sol.objective).abs() > LP_TOL {
        return Err(Error::Internal(format!(
            "certificate replay {margin} disagrees with LP value {}",
            sol.objective
        )));
    }
    Ok((
        margin,
        DominanceCertificate {
            dominating_mixture: mixture,
            margin,
        },
    ))
}

fn replay_margin(rows: &[Vec<f64>], x: &MixedStrategy) -> f64 {
    rows.iter()
        .map(|d| d.iter().zip(x.probs()).map(|(v, p)| v * p).sum::<f64>())
        .fold(f64::INFINITY, f64::min)
}

/// Replay a certificate against the admissible profiles: the minimum advantage
/// of its mixture over `action`.
pub fn replay_certificate(
    game: &NormalFormGame,
    player: usize,
    action: usize,
    admissible: &[Vec<usize>],
    mixture: &MixedStrategy,
) -> Result<f64> {
    check_admissible(game, player, action, admissible)?;
    if mixture.len() != game.num_actions(player) {
        return Err(dim("mixture length differs from the player's action count"));
    }
    Ok(replay_margin(
        &advantage_rows(game, player, action, admissible),
        mixture,
    ))
}

/// `min_{Π_{-i}} max_{x} u_i(x, Π_{-i}) - u_i(action, Π_{-i})`, with `Π_{-i}`
/// ranging over correlated beliefs on the admissible opponent profiles.
pub fn never_best_response_margin(
    game: &NormalFormGame,
    player: usize,
    action: usize,
    admissible: &[Vec<usize>],
) -> Result<f64> {
    check_admissible(game, player, action, admissible)?;
    let n = game.num_actions(player);
    if n == 1 {
        return Ok(0.0);
    }
    let rows = advantage_rows(game, player, action, admissible);
    let np = rows.len();
    // variables: belief π_0..π_{P-1}, value v
    let mut objective = vec![0.0; np + 1];
    objective[np] = 1.0;
    let mut lp = LinearProgram::new(Sense::Minimize, objective);
    for k in 0..n {
        let mut coeffs: Vec<f64> = rows.iter().map(|d| d[k]).collect();
        coeffs.push(-1.0);
        lp.add_constraint(coeffs, Relation::Le, 0.0);
    }
    let mut simplex = vec![1.0; np + 1];
    simplex[np] = 0.0;
    lp.add_constraint(simplex, Relation::Eq, 1.0);
    let sol = lp
        .solve()
        .map_err(|e| Error::Internal(format!("never-best-response LP: {e}")))?;
    let belief = MixedStrategy::from_weights(sol.x[..np].to_vec())
        .map_err(|e| Error::Internal(format!("degenerate belief: {e}")))?;
    // replay: best reply advantage against the belief
    let value = (0..n)
        .map(|k| {
            rows.iter()
                .zip(belief.probs())
                .map(|(d, p)| d[k] * p)
                .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(value.max(0.0))
}

/// Actions removed by one simultaneous elimination round against `survivors`.
pub fn elimination_round(
    game: &NormalFormGame,
    delta: f64,
    survivors: &[Vec<usize>],
) -> Result<Vec<(usize, usize)>> {
    let mut removed = Vec::new();
    for (i, alive) in survivors.iter().enumerate() {
        if alive.len() <= 1 {
            continue;
        }
        for &a in alive {
            let (margin, _) = dominance_margin(game, i, a, survivors)?;
            if margin_eliminates(margin, delta) {
                removed.push((i, a));
            }
        }
    }
    Ok(removed)
}

/// Run Δ-IDE to its fixpoint, removing every Δ-dominated action in each
/// round simultaneously.
pub fn try_compute_ladder(game: &NormalFormGame, delta: f64) -> Result<EliminationLadder> {
    if !(delta >= 0.0) {
        return Err(invalid(format!("Δ must be nonnegative, got {delta}")));
    }
    let mut survivors: Vec<Vec<usize>> = game
        .action_counts()
        .iter()
        .map(|&c| (0..c).collect())
        .collect();
    let mut rounds = Vec::new();
    loop {
        let removed = elimination_round(game, delta, &survivors)?;
        if removed.is_empty() {
            break;
        }
        for &(i, a) in &removed {
            survivors[i].retain(|&b| b != a);
        }
        rounds.push(removed);
    }
    Ok(EliminationLadder {
        delta,
        length: rounds.len(),
        rounds,
        survivors,
    })
}

/// [`try_compute_ladder`] for inputs known to be valid.
///
/// # Panics
/// On negative Δ or an internal LP failure.
pub fn compute_ladder(game: &NormalFormGame, delta: f64) -> EliminationLadder {
    try_compute_ladder(game, delta).expect("elimination ladder")
}

pub fn is_profile_rationalizable(
    game: &NormalFormGame,
    delta: f64,
    profile: &ActionProfile,
) -> Result<bool> {
    game.check_profile(profile.actions())?;
    let ladder = try_compute_ladder(game, delta)?;
    Ok(profile
        .actions()
        .iter()
        .enumerate()
        .all(|(i, &a)| !ladder.is_eliminated(i, a)))
}

pub fn support_mass_on_idas(
    game: &NormalFormGame,
    delta: f64,
    dist: &JointDistribution,
) -> Result<f64> {
    dist.check_shape(game.action_counts())?;
    Ok(try_compute_ladder(game, delta)?.ida_mass(dist))
}
