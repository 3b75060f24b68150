//! Bandit-feedback simulator over a ground-truth game.
//!
//! Learners never see utilities directly: every query plays one joint profile
//! and returns noisy payoffs whose means are the true utilities. One pull is
//! one sample, however many players observe it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{dim, invalid, Result};
use crate::game::{ActionProfile, MixedStrategy, NormalFormGame};

/// Identifier of the generator behind every env, recorded in reports.
pub const RNG_ALGORITHM: &str = "chacha8";

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Noise {
    /// Observation is 1 with probability `u`, else 0.
    #[default]
    Bernoulli,
    /// Observation equals `u`.
    Deterministic,
}

impl std::str::FromStr for Noise {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bernoulli" => Ok(Noise::Bernoulli),
            "deterministic" => Ok(Noise::Deterministic),
            _ => Err(invalid(format!("unknown noise model {s:?}"))),
        }
    }
}

/// Query access shared by the full env and restricted subgame views.
pub trait MixedFeedback {
    fn action_counts(&self) -> &[usize];

    /// Play `action` for `player` against opponents drawn from `opponents`
    /// (one strategy per opponent, player order, skipping `player`) and
    /// return the player's observed payoff. Costs one sample.
    fn pull_mixed(&mut self, player: usize, action: usize, opponents: &[MixedStrategy])
        -> Result<f64>;

    /// Mean of `m` independent [`pull_mixed`](Self::pull_mixed) observations.
    fn pull_mixed_mean(
        &mut self,
        player: usize,
        action: usize,
        opponents: &[MixedStrategy],
        m: u64,
    ) -> Result<f64> {
        let mut sum = 0.0;
        for _ in 0..m {
            sum += self.pull_mixed(player, action, opponents)?;
        }
        Ok(sum / m as f64)
    }

    fn sample_count(&self) -> u64;
}

#[derive(Clone, Debug)]
pub struct BanditEnv<'g> {
    game: &'g NormalFormGame,
    noise: Noise,
    seed: u64,
    rng: ChaCha8Rng,
    samples: u64,
    scratch: Vec<usize>,
}

impl<'g> BanditEnv<'g> {
    pub fn new(game: &'g NormalFormGame, seed: u64, noise: Noise) -> Self {
        BanditEnv {
            game,
            noise,
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            samples: 0,
            scratch: vec![0; game.num_players()],
        }
    }

    pub fn game(&self) -> &'g NormalFormGame {
        self.game
    }

    pub fn noise(&self) -> Noise {
        self.noise
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The env's generator, for learners that randomise their queries.
    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// Rewind to the freshly constructed state.
    pub fn reset(&mut self) {
        self.rng = ChaCha8Rng::seed_from_u64(self.seed);
        self.samples = 0;
    }

    #[inline]
    fn observe(&mut self, mean: f64) -> f64 {
        match self.noise {
            Noise::Deterministic => mean,
            Noise::Bernoulli => {
                if self.rng.gen::<f64>() < mean {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Play a joint profile; every player observes an independent draw.
    pub fn pull(&mut self, profile: &ActionProfile) -> Result<Vec<f64>> {
        self.game.check_profile(profile.actions())?;
        self.samples += 1;
        let idx = self.game.flat_index(profile.actions());
        (0..self.game.num_players())
            .map(|i| Ok(self.observe(self.game.table(i)[idx])))
            .collect()
    }

    /// Play a joint profile and return only `player`'s observation.
    pub fn pull_player(&mut self, player: usize, profile: &[usize]) -> Result<f64> {
        if player >= self.game.num_players() {
            return Err(invalid(format!("no player {player}")));
        }
        self.game.check_profile(profile)?;
        self.samples += 1;
        let u = self.game.utility_at(player, profile);
        Ok(self.observe(u))
    }

    /// Mean of `m` observations of `player` at a fixed profile.
    pub fn pull_player_mean(&mut self, player: usize, profile: &[usize], m: u64) -> Result<f64> {
        if player >= self.game.num_players() {
            return Err(invalid(format!("no player {player}")));
        }
        self.game.check_profile(profile)?;
        let u = self.game.utility_at(player, profile);
        let mut sum = 0.0;
        for _ in 0..m {
            sum += self.observe(u);
        }
        self.samples += m;
        Ok(sum / m as f64)
    }

    /// Per-player mean observations over `m` pulls of one profile.
    pub fn pull_profile_means(&mut self, profile: &[usize], m: u64) -> Result<Vec<f64>> {
        self.game.check_profile(profile)?;
        let idx = self.game.flat_index(profile);
        let n = self.game.num_players();
        let mut sums = vec![0.0; n];
        for _ in 0..m {
            for (i, s) in sums.iter_mut().enumerate() {
                *s += self.observe(self.game.table(i)[idx]);
            }
        }
        self.samples += m;
        Ok(sums.into_iter().map(|s| s / m as f64).collect())
    }

    fn check_mixed(&self, player: usize, action: usize, opponents: &[MixedStrategy]) -> Result<()> {
        let n = self.game.num_players();
        if player >= n || action >= self.game.num_actions(player) {
            return Err(invalid(format!("no action {action} for player {player}")));
        }
        if opponents.len() + 1 != n {
            return Err(dim(format!(
                "expected {} opponent strategies, got {}",
                n - 1,
                opponents.len()
            )));
        }
        for (j, s) in (0..n).filter(|&j| j != player).zip(opponents) {
            if s.len() != self.game.num_actions(j) {
                return Err(dim(format!(
                    "strategy for player {j} has {} entries, expected {}",
                    s.len(),
                    self.game.num_actions(j)
                )));
            }
        }
        Ok(())
    }

    #[inline]
    fn pull_mixed_unchecked(&mut self, player: usize, action: usize, opponents: &[MixedStrategy]) -> f64 {
        let mut profile = std::mem::take(&mut self.scratch);
        let mut it = opponents.iter();
        for (j, slot) in profile.iter_mut().enumerate() {
            *slot = if j == player {
                action
            } else {
                it.next().unwrap().sample(&mut self.rng)
            };
        }
        self.samples += 1;
        let u = self.game.utility_at(player, &profile);
        self.scratch = profile;
        self.observe(u)
    }
}

impl MixedFeedback for BanditEnv<'_> {
    fn action_counts(&self) -> &[usize] {
        self.game.action_counts()
    }

    fn pull_mixed(&mut self, player: usize, action: usize, opponents: &[MixedStrategy]) -> Result<f64> {
        self.check_mixed(player, action, opponents)?;
        Ok(self.pull_mixed_unchecked(player, action, opponents))
    }

    fn pull_mixed_mean(
        &mut self,
        player: usize,
        action: usize,
        opponents: &[MixedStrategy],
        m: u64,
    ) -> Result<f64> {
        self.check_mixed(player, action, opponents)?;
        let mut sum = 0.0;
        for _ in 0..m {
            sum += self.pull_mixed_unchecked(player, action, opponents);
        }
        Ok(sum / m as f64)
    }

    fn sample_count(&self) -> u64 {
        self.samples
    }
}
