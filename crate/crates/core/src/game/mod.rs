//! Dense N-player normal-form games and the strategy types built on them.

mod fixtures;
mod format;
pub(crate) mod strategy;

pub use fixtures::{
    gen_chain_game, gen_dominated_pennies, gen_hardness_game, gen_lower_bound_game,
    gen_matching_pennies, gen_prisoners_dilemma, gen_random_game, HardnessVariant,
    LowerBoundVariant,
};
pub use format::{load_game, save_game, GameFile, GAME_FORMAT, GAME_LAYOUT};
pub use strategy::{JointDistribution, MixedStrategy, ProductComponent, PROB_TOL};

use serde::{Deserialize, Serialize};

use crate::error::{dim, invalid, Error, Result};

/// Upper bound on joint profiles for anything that enumerates the full tensor.
pub const MAX_PROFILES: usize = 1_000_000;

/// One pure action per player, 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionProfile(pub Vec<usize>);

impl ActionProfile {
    pub fn new(actions: Vec<usize>) -> Self {
        ActionProfile(actions)
    }

    pub fn actions(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The same profile with player `player`'s action replaced.
    pub fn with_action(&self, player: usize, action: usize) -> ActionProfile {
        let mut actions = self.0.clone();
        actions[player] = action;
        ActionProfile(actions)
    }
}

impl From<Vec<usize>> for ActionProfile {
    fn from(v: Vec<usize>) -> Self {
        ActionProfile(v)
    }
}

/// An N-player game with payoffs in `[0, 1]`.
///
/// Each player's utility table is stored flattened in row-major order: the
/// flat index of `(a_1, ..., a_N)` is `((a_1 * |A_2| + a_2) * |A_3| + a_3) ...`,
/// so the last player's action varies fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalFormGame {
    action_counts: Vec<usize>,
    strides: Vec<usize>,
    utilities: Vec<Vec<f64>>,
}

impl NormalFormGame {
    pub fn new(action_counts: Vec<usize>, utilities: Vec<Vec<f64>>) -> Result<Self> {
        if action_counts.len() < 2 {
            return Err(Error::Shape(format!(
                "a game needs at least 2 players, got {}",
                action_counts.len()
            )));
        }
        if let Some(i) = action_counts.iter().position(|&c| c == 0) {
            return Err(Error::Shape(format!("player {i} has no actions")));
        }
        let num_profiles = action_counts
            .iter()
            .try_fold(1usize, |acc, &c| acc.checked_mul(c))
            .filter(|&n| n <= MAX_PROFILES)
            .ok_or_else(|| {
                Error::TooLarge(format!("{action_counts:?} exceeds {MAX_PROFILES} profiles"))
            })?;
        if utilities.len() != action_counts.len() {
            return Err(Error::Shape(format!(
                "expected {} utility tables, got {}",
                action_counts.len(),
                utilities.len()
            )));
        }
        for (i, table) in utilities.iter().enumerate() {
            if table.len() != num_profiles {
                return Err(Error::Shape(format!(
                    "player {i}'s table has {} entries, expected {num_profiles}",
                    table.len()
                )));
            }
            if let Some(k) = table.iter().position(|u| !(0.0..=1.0).contains(u)) {
                return Err(Error::PayoffRange(format!(
                    "player {i}, entry {k}: {} is outside [0, 1]",
                    table[k]
                )));
            }
        }
        let mut strides = vec![1; action_counts.len()];
        for i in (0..action_counts.len() - 1).rev() {
            strides[i] = strides[i + 1] * action_counts[i + 1];
        }
        Ok(NormalFormGame {
            action_counts,
            strides,
            utilities,
        })
    }

    /// Build a game by evaluating `f(player, profile)` on every profile.
    pub fn from_fn(
        action_counts: Vec<usize>,
        mut f: impl FnMut(usize, &[usize]) -> f64,
    ) -> Result<Self> {
        let n = action_counts.len();
        let total: usize = action_counts.iter().product();
        let mut utilities = vec![Vec::with_capacity(total); n];
        for profile in ProfileIter::new(&action_counts) {
            for (i, table) in utilities.iter_mut().enumerate() {
                table.push(f(i, &profile));
            }
        }
        NormalFormGame::new(action_counts, utilities)
    }

    pub fn num_players(&self) -> usize {
        self.action_counts.len()
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    pub fn num_actions(&self, player: usize) -> usize {
        self.action_counts[player]
    }

    /// `A = max_i |A_i|`.
    pub fn max_actions(&self) -> usize {
        self.action_counts.iter().copied().max().unwrap_or(0)
    }

    pub fn num_profiles(&self) -> usize {
        self.utilities[0].len()
    }

    /// Player `player`'s flattened utility table.
    pub fn table(&self, player: usize) -> &[f64] {
        &self.utilities[player]
    }

    pub fn tables(&self) -> &[Vec<f64>] {
        &self.utilities
    }

    pub fn flat_index(&self, actions: &[usize]) -> usize {
        actions.iter().zip(&self.strides).map(|(a, s)| a * s).sum()
    }

    pub fn stride(&self, player: usize) -> usize {
        self.strides[player]
    }

    pub fn profiles(&self) -> ProfileIter {
        ProfileIter::new(&self.action_counts)
    }

    pub fn check_profile(&self, profile: &[usize]) -> Result<()> {
        if profile.len() != self.num_players() {
            return Err(invalid(format!(
                "profile has {} actions, game has {} players",
                profile.len(),
                self.num_players()
            )));
        }
        for (i, (&a, &c)) in profile.iter().zip(&self.action_counts).enumerate() {
            if a >= c {
                return Err(invalid(format!(
                    "player {i} action {a} out of range (has {c})"
                )));
            }
        }
        Ok(())
    }

    fn check_player(&self, player: usize) -> Result<()> {
        if player >= self.num_players() {
            return Err(invalid(format!(
                "player {player} out of range (game has {})",
                self.num_players()
            )));
        }
        Ok(())
    }

    pub fn utility(&self, profile: &ActionProfile, player: usize) -> Result<f64> {
        self.check_player(player)?;
        self.check_profile(&profile.0)?;
        Ok(self.utilities[player][self.flat_index(&profile.0)])
    }

    /// Unchecked lookup for hot loops; `actions` must be a valid profile.
    #[inline]
    pub fn utility_at(&self, player: usize, actions: &[usize]) -> f64 {
        self.utilities[player][self.flat_index(actions)]
    }

    /// `u_i(action, θ_{-i})` where `opponents` lists one strategy per
    /// opponent in player order, skipping `player`.
    pub fn expected_utility(
        &self,
        player: usize,
        action: usize,
        opponents: &[MixedStrategy],
    ) -> Result<f64> {
        self.check_player(player)?;
        if action >= self.action_counts[player] {
            return Err(invalid(format!(
                "player {player} action {action} out of range"
            )));
        }
        if opponents.len() + 1 != self.num_players() {
            return Err(dim(format!(
                "expected {} opponent strategies, got {}",
                self.num_players() - 1,
                opponents.len()
            )));
        }
        let mut full: Vec<&MixedStrategy> = Vec::with_capacity(self.num_players());
        let mut it = opponents.iter();
        for j in 0..self.num_players() {
            if j == player {
                // placeholder, never read
                full.push(&opponents[0]);
            } else {
                let s = it.next().unwrap();
                if s.len() != self.action_counts[j] {
                    return Err(dim(format!(
                        "strategy for player {j} has {} entries, expected {}",
                        s.len(),
                        self.action_counts[j]
                    )));
                }
                full.push(s);
            }
        }
        Ok(self.action_values_refs(player, &full)[action])
    }

    /// `u_i(a, θ_{-i})` for every `a ∈ A_i`, with `strategies` holding one
    /// strategy per player (entry `player` is ignored).
    pub fn action_values(&self, player: usize, strategies: &[MixedStrategy]) -> Vec<f64> {
        let refs: Vec<&MixedStrategy> = strategies.iter().collect();
        self.action_values_refs(player, &refs)
    }

    fn action_values_refs(&self, player: usize, strategies: &[&MixedStrategy]) -> Vec<f64> {
        let n = self.num_players();
        let table = &self.utilities[player];
        let mut values = vec![0.0; self.action_counts[player]];
        // Enumerate opponent profiles only; the player's own action is the inner loop.
        let mut opp = vec![0usize; n];
        loop {
            let mut w = 1.0;
            for j in 0..n {
                if j != player {
                    w *= strategies[j].prob(opp[j]);
                }
            }
            if w != 0.0 {
                let base = self.flat_index(&opp);
                let stride = self.strides[player];
                for (a, v) in values.iter_mut().enumerate() {
                    *v += w * table[base + a * stride];
                }
            }
            // advance the mixed-radix counter over j != player
            let mut j = n;
            loop {
                if j == 0 {
                    return values;
                }
                j -= 1;
                if j == player {
                    continue;
                }
                opp[j] += 1;
                if opp[j] < self.action_counts[j] {
                    break;
                }
                opp[j] = 0;
            }
        }
    }

    /// Restrict to the product of the given per-player action lists. Action
    /// `k` of player `i` in the result is `actions[i][k]` in `self`.
    pub fn subgame(&self, actions: &[Vec<usize>]) -> Result<NormalFormGame> {
        if actions.len() != self.num_players() {
            return Err(dim("one action list per player required"));
        }
        for (i, list) in actions.iter().enumerate() {
            if list.is_empty() || list.iter().any(|&a| a >= self.action_counts[i]) {
                return Err(invalid(format!("bad action list for player {i}: {list:?}")));
            }
        }
        let counts = actions.iter().map(Vec::len).collect();
        let mut global = vec![0; self.num_players()];
        NormalFormGame::from_fn(counts, |i, local| {
            for (j, &k) in local.iter().enumerate() {
                global[j] = actions[j][k];
            }
            self.utility_at(i, &global)
        })
    }
}

/// Row-major enumeration of all joint profiles (last player fastest).
#[derive(Clone, Debug)]
pub struct ProfileIter {
    counts: Vec<usize>,
    next: Option<Vec<usize>>,
}

impl ProfileIter {
    pub fn new(counts: &[usize]) -> Self {
        let next = if counts.iter().all(|&c| c > 0) {
            Some(vec![0; counts.len()])
        } else {
            None
        };
        ProfileIter {
            counts: counts.to_vec(),
            next,
        }
    }
}

impl Iterator for ProfileIter {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        let mut j = succ.len();
        let mut done = true;
        while j > 0 {
            j -= 1;
            succ[j] += 1;
            if succ[j] < self.counts[j] {
                done = false;
                break;
            }
            succ[j] = 0;
        }
        if !done {
            self.next = Some(succ);
        }
        Some(current)
    }
}
