//! Exact equilibrium and rationalizability checks against the true game.
//!
//! Expectations distribute over the product components of a
//! [`JointDistribution`]; for each component the vector
//! `v_c[a] = u_i(a, θ_{-i}^c)` is computed once per player, and every gap is
//! a linear functional of these vectors.

use serde::{Deserialize, Serialize};

use crate::error::{dim, Result};
use crate::game::{JointDistribution, MixedStrategy, NormalFormGame};
use crate::ide::try_compute_ladder;

/// Comparison slack for verifier outputs.
pub const VERIFY_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    /// Best deviation gain of each player (never negative).
    pub per_player: Vec<f64>,
    pub max_gap: f64,
    /// Best deviation per player: a single action for CCE and Nash gaps, one
    /// swap target per recommendation for CE gaps.
    pub best_deviation: Vec<Vec<usize>>,
}

impl GapReport {
    fn from_players(per_player: Vec<f64>, best_deviation: Vec<Vec<usize>>) -> Self {
        let max_gap = per_player.iter().copied().fold(0.0, f64::max);
        GapReport {
            per_player,
            max_gap,
            best_deviation,
        }
    }
}

fn argmax(v: &[f64]) -> (usize, f64) {
    let mut best = 0;
    for k in 1..v.len() {
        if v[k] > v[best] {
            best = k;
        }
    }
    (best, v[best])
}

/// `(w_c, θ_i^c, v_c)` for every component and the given player.
fn component_values<'d>(
    game: &'d NormalFormGame,
    dist: &'d JointDistribution,
    player: usize,
) -> impl Iterator<Item = (f64, &'d MixedStrategy, Vec<f64>)> + 'd {
    dist.components()
        .iter()
        .filter(|c| c.weight > 0.0)
        .map(move |c| (c.weight, &c.strategies[player], game.action_values(player, &c.strategies)))
}

/// Largest gain from a fixed deviation `a'` for any player.
pub fn cce_gap(game: &NormalFormGame, dist: &JointDistribution) -> Result<GapReport> {
    dist.check_shape(game.action_counts())?;
    let mut per_player = Vec::with_capacity(game.num_players());
    let mut best = Vec::with_capacity(game.num_players());
    for i in 0..game.num_players() {
        let mut deviation = vec![0.0; game.num_actions(i)];
        let mut played = 0.0;
        for (w, own, v) in component_values(game, dist, i) {
            for (d, x) in deviation.iter_mut().zip(&v) {
                *d += w * x;
            }
            played += w * own.probs().iter().zip(&v).map(|(p, x)| p * x).sum::<f64>();
        }
        let (a, top) = argmax(&deviation);
        per_player.push((top - played).max(0.0));
        best.push(vec![a]);
    }
    Ok(GapReport::from_players(per_player, best))
}

/// Largest gain from a swap function `φ: A_i → A_i` for any player. The best
/// swap decomposes over recommendations.
pub fn ce_gap(game: &NormalFormGame, dist: &JointDistribution) -> Result<GapReport> {
    dist.check_shape(game.action_counts())?;
    let mut per_player = Vec::with_capacity(game.num_players());
    let mut best = Vec::with_capacity(game.num_players());
    for i in 0..game.num_players() {
        let k = game.num_actions(i);
        // table[b][a] = Σ_c w_c θ_i^c(b) v_c[a]
        let mut table = vec![vec![0.0; k]; k];
        for (w, own, v) in component_values(game, dist, i) {
            for (b, row) in table.iter_mut().enumerate() {
                let wb = w * own.prob(b);
                if wb == 0.0 {
                    continue;
                }
                for (t, x) in row.iter_mut().zip(&v) {
                    *t += wb * x;
                }
            }
        }
        let mut gain = 0.0;
        let mut phi = Vec::with_capacity(k);
        for (b, row) in table.iter().enumerate() {
            let (a, top) = argmax(row);
            let g = top - row[b];
            if g > 0.0 {
                gain += g;
                phi.push(a);
            } else {
                phi.push(b);
            }
        }
        per_player.push(gain);
        best.push(phi);
    }
    Ok(GapReport::from_players(per_player, best))
}

fn check_strategies(game: &NormalFormGame, strategies: &[MixedStrategy]) -> Result<()> {
    let counts: Vec<usize> = strategies.iter().map(MixedStrategy::len).collect();
    if counts != game.action_counts() {
        return Err(dim(format!(
            "strategy shape {counts:?} does not match game {:?}",
            game.action_counts()
        )));
    }
    Ok(())
}

/// Largest gain from a unilateral deviation against a product profile.
pub fn nash_gap(game: &NormalFormGame, strategies: &[MixedStrategy]) -> Result<GapReport> {
    check_strategies(game, strategies)?;
    let mut per_player = Vec::with_capacity(strategies.len());
    let mut best = Vec::with_capacity(strategies.len());
    for (i, s) in strategies.iter().enumerate() {
        let v = game.action_values(i, strategies);
        let played: f64 = s.probs().iter().zip(&v).map(|(p, x)| p * x).sum();
        let (a, top) = argmax(&v);
        per_player.push((top - played).max(0.0));
        best.push(vec![a]);
    }
    Ok(GapReport::from_players(per_player, best))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NashMassCheck {
    pub passed: bool,
    /// `2Lε/Δ`.
    pub bound: f64,
    /// Each player's probability on its Δ-IDAs.
    pub masses: Vec<f64>,
    pub ladder_length: usize,
}

/// Checks that an ε-Nash equilibrium puts at most `2Lε/Δ` mass on each
/// player's Δ-IDAs.
pub fn nash_mass_bound_check(
    game: &NormalFormGame,
    delta: f64,
    strategies: &[MixedStrategy],
    epsilon: f64,
) -> Result<NashMassCheck> {
    check_strategies(game, strategies)?;
    let ladder = try_compute_ladder(game, delta)?;
    let bound = 2.0 * ladder.length as f64 * epsilon / delta;
    let masses: Vec<f64> = strategies
        .iter()
        .enumerate()
        .map(|(i, s)| s.mass_on(ladder.eliminated(i, s.len())))
        .collect();
    Ok(NashMassCheck {
        passed: masses.iter().all(|&m| m <= bound + VERIFY_TOL),
        bound,
        masses,
        ladder_length: ladder.length,
    })
}

/// Unnormalised expected external and swap regret of `player` along a
/// sequence of product strategy profiles.
pub fn regret_trace(
    game: &NormalFormGame,
    rounds: &[Vec<MixedStrategy>],
    player: usize,
) -> Result<(f64, f64)> {
    if player >= game.num_players() {
        return Err(crate::error::invalid(format!("no player {player}")));
    }
    let k = game.num_actions(player);
    let mut fixed = vec![0.0; k];
    let mut played = 0.0;
    let mut table = vec![vec![0.0; k]; k];
    for theta in rounds {
        check_strategies(game, theta)?;
        let v = game.action_values(player, theta);
        let own = &theta[player];
        for (f, x) in fixed.iter_mut().zip(&v) {
            *f += x;
        }
        played += own.probs().iter().zip(&v).map(|(p, x)| p * x).sum::<f64>();
        for (b, row) in table.iter_mut().enumerate() {
            let pb = own.prob(b);
            for (t, x) in row.iter_mut().zip(&v) {
                *t += pb * x;
            }
        }
    }
    let external = argmax(&fixed).1 - played;
    let swap: f64 = table
        .iter()
        .enumerate()
        .map(|(b, row)| argmax(row).1 - row[b])
        .sum();
    Ok((external, swap))
}
