//! Canonical games: textbook fixtures and the lower-bound constructions.
//!
//! Action indices are 0-based, so "action 1" of a construction is index 0.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::NormalFormGame;
use crate::error::{invalid, Error, Result};
use crate::ide::compute_ladder;

/// Prisoner's dilemma with actions `C = 0`, `D = 1`. D strictly dominates C
/// by exactly 0.2 for both players.
pub fn gen_prisoners_dilemma() -> NormalFormGame {
    // row player's payoff u(own, other)
    const ROW: [[f64; 2]; 2] = [[0.6, 0.0], [0.8, 0.2]];
    NormalFormGame::from_fn(vec![2, 2], |i, p| {
        let (own, other) = if i == 0 { (p[0], p[1]) } else { (p[1], p[0]) };
        ROW[own][other]
    })
    .expect("static fixture")
}

/// Matching pennies rescaled to `{0, 1}`: the row player wins on a match.
pub fn gen_matching_pennies() -> NormalFormGame {
    NormalFormGame::from_fn(vec![2, 2], |i, p| {
        let row_wins = if p[0] == p[1] { 1.0 } else { 0.0 };
        if i == 0 {
            row_wins
        } else {
            1.0 - row_wins
        }
    })
    .expect("static fixture")
}

/// Constant-sum 3x3 game: matching pennies on actions {0, 1} plus a third
/// action per player that is dominated by the uniform mix of the other two
/// (margin 0.3 for the row player, 0.25 for the column player). The unique
/// rationalizable subgame is matching pennies.
pub fn gen_dominated_pennies() -> NormalFormGame {
    const ROW: [[f64; 3]; 3] = [[1.0, 0.0, 0.75], [0.0, 1.0, 0.75], [0.2, 0.2, 0.45]];
    NormalFormGame::from_fn(vec![3, 3], |i, p| {
        let u = ROW[p[0]][p[1]];
        if i == 0 {
            u
        } else {
            1.0 - u
        }
    })
    .expect("static fixture")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LowerBoundVariant {
    /// `G_0`: every player earns Δ for action 0, nothing otherwise.
    Base,
    /// `G_{j,a}`: as `G_0`, but player `j` additionally earns 2Δ for action
    /// `a` when every opponent plays action 0.
    Bonus { player: usize, action: usize },
}

/// Instances from the Ω(NA/Δ²) lower bound for finding one rationalizable
/// profile.
pub fn gen_lower_bound_game(
    num_players: usize,
    num_actions: usize,
    delta: f64,
    variant: &LowerBoundVariant,
) -> Result<NormalFormGame> {
    if num_players < 2 || num_actions < 2 {
        return Err(invalid("lower-bound game needs N >= 2 and A >= 2"));
    }
    if !(delta > 0.0 && delta <= 1.0 / 3.0) {
        return Err(invalid(format!("lower-bound game needs 0 < Δ <= 1/3, got {delta}")));
    }
    if let LowerBoundVariant::Bonus { player, action } = *variant {
        if player >= num_players || action >= num_actions || action == 0 {
            return Err(invalid(format!(
                "bonus variant needs player < N and 0 < action < A, got ({player}, {action})"
            )));
        }
    }
    NormalFormGame::from_fn(vec![num_actions; num_players], |i, p| {
        let mut u = if p[i] == 0 { delta } else { 0.0 };
        if let LowerBoundVariant::Bonus { player, action } = *variant {
            let others_at_zero = p.iter().enumerate().all(|(k, &a)| k == i || a == 0);
            if i == player && others_at_zero && p[i] == action {
                u += 2.0 * delta;
            }
        }
        u
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HardnessVariant {
    /// `G_0`: the last player's action 0 is Δ-dominated.
    Base,
    /// `G_{a*}`: the last player's action 0 pays 2Δ against opponent
    /// profile `astar`, which makes it rationalizable.
    Target(Vec<usize>),
}

/// Instances showing that deciding rationalizability of a single action
/// needs Ω(A^{N-1}) samples.
pub fn gen_hardness_game(
    num_players: usize,
    num_actions: usize,
    delta: f64,
    variant: &HardnessVariant,
) -> Result<NormalFormGame> {
    if num_players < 2 || num_actions < 2 {
        return Err(invalid("hardness game needs N >= 2 and A >= 2"));
    }
    if !(delta > 0.0 && delta < 0.1) {
        return Err(invalid(format!("hardness game needs 0 < Δ < 0.1, got {delta}")));
    }
    if let HardnessVariant::Target(astar) = variant {
        if astar.len() != num_players - 1 || astar.iter().any(|&a| a >= num_actions) {
            return Err(invalid(format!(
                "target profile {astar:?} must have N-1 entries below A"
            )));
        }
    }
    let last = num_players - 1;
    NormalFormGame::from_fn(vec![num_actions; num_players], |i, p| {
        if i != last {
            return 0.0;
        }
        if p[last] > 0 {
            return delta;
        }
        match variant {
            HardnessVariant::Base => 0.0,
            HardnessVariant::Target(astar) if &p[..last] == astar.as_slice() => 2.0 * delta,
            HardnessVariant::Target(_) => 0.0,
        }
    })
}

/// Two-player game whose Δ-elimination ladder removes exactly one action per
/// round, alternating players, for `L = 2(A - 1)` rounds.
///
/// With 1-based actions `k` (row) and `l` (column) and `c = 2Δ`:
/// `u_1(k, l) = c·min(k, l + 1)` and `u_2(k, l) = c·min(l, k)`. Row action
/// `j` is a best response to column `j - 1` and column `j` to row `j`, so
/// nothing leaves the ladder early; every elimination has margin exactly `c`.
/// The shape is checked against the exact elimination oracle before return.
pub fn gen_chain_game(num_actions: usize, delta: f64) -> Result<NormalFormGame> {
    if num_actions < 2 {
        return Err(invalid("chain game needs A >= 2"));
    }
    if !(delta > 0.0) {
        return Err(invalid(format!("chain game needs Δ > 0, got {delta}")));
    }
    let c = 2.0 * delta;
    if c * num_actions as f64 > 1.0 {
        return Err(invalid(format!(
            "chain game margins 2Δ·A = {} exceed the payoff range",
            c * num_actions as f64
        )));
    }
    let game = NormalFormGame::from_fn(vec![num_actions; 2], |i, p| {
        let (k, l) = (p[0] + 1, p[1] + 1);
        let steps = if i == 0 { k.min(l + 1) } else { l.min(k) };
        c * steps as f64
    })?;
    let ladder = compute_ladder(&game, delta);
    let expected = 2 * (num_actions - 1);
    let singleton = ladder.survivors.iter().all(|s| s.len() == 1);
    if ladder.length != expected || !singleton || ladder.rounds.iter().any(|r| r.len() != 1) {
        return Err(Error::Internal(format!(
            "chain game ladder has L = {} (expected {expected})",
            ladder.length
        )));
    }
    Ok(game)
}

/// I.i.d. uniform payoffs, deterministic in `seed`.
pub fn gen_random_game(num_players: usize, action_counts: &[usize], seed: u64) -> NormalFormGame {
    assert_eq!(num_players, action_counts.len(), "one action count per player");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total: usize = action_counts.iter().product();
    let utilities = (0..num_players)
        .map(|_| (0..total).map(|_| rng.gen::<f64>()).collect())
        .collect();
    NormalFormGame::new(action_counts.to_vec(), utilities).expect("uniform [0,1) payoffs")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::ActionProfile;
    use crate::ide::{compute_ladder, is_profile_rationalizable};

    fn all_in_unit_interval(g: &NormalFormGame) -> bool {
        g.tables().iter().flatten().all(|u| (0.0..=1.0).contains(u))
    }

    #[test]
    fn pd_ladder() {
        let g = gen_prisoners_dilemma();
        let l = compute_ladder(&g, 0.1);
        assert_eq!(l.length, 1);
        assert_eq!(l.rounds[0], vec![(0, 0), (1, 0)]);
        assert_eq!(l.survivors, vec![vec![1], vec![1]]);
        let l = compute_ladder(&g, 0.25);
        assert_eq!(l.length, 0);
        assert!(l.rounds.is_empty());
    }

    #[test]
    fn lower_bound_base_two_players() {
        let g = gen_lower_bound_game(2, 3, 0.1, &LowerBoundVariant::Base).unwrap();
        let l = compute_ladder(&g, 0.1);
        assert_eq!(l.survivors, vec![vec![0], vec![0]]);
        assert!(is_profile_rationalizable(&g, 0.1, &ActionProfile(vec![0, 0])).unwrap());
    }

    #[test]
    fn lower_bound_bonus_variant() {
        // G_{j=2, a=3} in 1-based indices
        let v = LowerBoundVariant::Bonus { player: 1, action: 2 };
        let g = gen_lower_bound_game(2, 3, 0.1, &v).unwrap();
        let l = compute_ladder(&g, 0.1);
        assert_eq!(l.survivors, vec![vec![0], vec![2]]);
        assert_eq!(l.length, 2);
    }

    #[test]
    fn lower_bound_base_three_players() {
        let g = gen_lower_bound_game(3, 2, 0.1, &LowerBoundVariant::Base).unwrap();
        let l = compute_ladder(&g, 0.1);
        assert_eq!(l.length, 1);
        assert_eq!(l.rounds[0], vec![(0, 1), (1, 1), (2, 1)]);
    }

    #[test]
    fn lower_bound_pairs_differ_in_one_cell() {
        for (n, a) in [(2, 3), (3, 2), (3, 3)] {
            let base = gen_lower_bound_game(n, a, 0.1, &LowerBoundVariant::Base).unwrap();
            for j in 0..n {
                for act in 1..a {
                    let v = LowerBoundVariant::Bonus { player: j, action: act };
                    let g = gen_lower_bound_game(n, a, 0.1, &v).unwrap();
                    let mut diffs = vec![];
                    for p in g.profiles() {
                        for i in 0..n {
                            if g.utility_at(i, &p) != base.utility_at(i, &p) {
                                diffs.push((i, p.clone()));
                            }
                        }
                    }
                    let mut cell = vec![0; n];
                    cell[j] = act;
                    assert_eq!(diffs, vec![(j, cell)]);
                }
            }
        }
    }

    #[test]
    fn lower_bound_parameter_checks() {
        assert!(gen_lower_bound_game(2, 3, 0.4, &LowerBoundVariant::Base).is_err());
        let v = LowerBoundVariant::Bonus { player: 0, action: 0 };
        assert!(gen_lower_bound_game(2, 3, 0.1, &v).is_err());
        let v = LowerBoundVariant::Bonus { player: 2, action: 1 };
        assert!(gen_lower_bound_game(2, 3, 0.1, &v).is_err());
    }

    #[test]
    fn hardness_base_and_target() {
        let base = gen_hardness_game(2, 2, 0.05, &HardnessVariant::Base).unwrap();
        let l = compute_ladder(&base, 0.05);
        assert!(l.rounds[0].contains(&(1, 0)));
        assert!(l.is_eliminated(1, 0));

        let tgt = gen_hardness_game(2, 2, 0.05, &HardnessVariant::Target(vec![1])).unwrap();
        let l = compute_ladder(&tgt, 0.05);
        assert!(!l.is_eliminated(1, 0));

        let base3 = gen_hardness_game(3, 2, 0.05, &HardnessVariant::Base).unwrap();
        let l = compute_ladder(&base3, 0.05);
        assert!(l.survivors[0].len() == 2 && l.survivors[1].len() == 2);
    }

    #[test]
    fn hardness_pairs_differ_only_at_target() {
        let base = gen_hardness_game(3, 3, 0.05, &HardnessVariant::Base).unwrap();
        let astar = vec![2, 1];
        let g = gen_hardness_game(3, 3, 0.05, &HardnessVariant::Target(astar.clone())).unwrap();
        let mut diffs = vec![];
        for p in g.profiles() {
            for i in 0..3 {
                if g.utility_at(i, &p) != base.utility_at(i, &p) {
                    diffs.push((i, p.clone()));
                }
            }
        }
        assert_eq!(diffs, vec![(2, vec![2, 1, 0])]);
    }

    #[test]
    fn hardness_parameter_checks() {
        assert!(gen_hardness_game(2, 2, 0.1, &HardnessVariant::Base).is_err());
        assert!(gen_hardness_game(2, 2, 0.05, &HardnessVariant::Target(vec![2])).is_err());
        assert!(gen_hardness_game(3, 2, 0.05, &HardnessVariant::Target(vec![1])).is_err());
    }

    #[test]
    fn chain_game_ladders() {
        let g = gen_chain_game(3, 0.05).unwrap();
        let l = compute_ladder(&g, 0.05);
        assert_eq!(l.length, 4);
        assert_eq!(l.survivors, vec![vec![2], vec![2]]);
        let g = gen_chain_game(2, 0.05).unwrap();
        assert_eq!(compute_ladder(&g, 0.05).length, 2);
        for a in 2..=6 {
            for delta in [0.01, 0.05, 0.9 / (2.0 * a as f64)] {
                let g = gen_chain_game(a, delta).unwrap();
                let l = compute_ladder(&g, delta);
                assert_eq!(l.length, 2 * (a - 1));
                let profile = ActionProfile(vec![l.survivors[0][0], l.survivors[1][0]]);
                assert!(is_profile_rationalizable(&g, delta, &profile).unwrap());
            }
        }
        assert!(gen_chain_game(1, 0.05).is_err());
        assert!(gen_chain_game(3, 0.2).is_err());
    }

    #[test]
    fn dominated_pennies_ladder() {
        let g = gen_dominated_pennies();
        let l = compute_ladder(&g, 0.2);
        assert_eq!(l.length, 1);
        assert_eq!(l.survivors, vec![vec![0, 1], vec![0, 1]]);
        for p in g.profiles() {
            assert!((g.utility_at(0, &p) + g.utility_at(1, &p) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn random_game_determinism() {
        let a = gen_random_game(3, &[2, 3, 4], 42);
        let b = gen_random_game(3, &[2, 3, 4], 42);
        let c = gen_random_game(3, &[2, 3, 4], 43);
        assert_eq!(a, b);
        assert_ne!(a.tables(), c.tables());
        assert!(all_in_unit_interval(&a));
    }

    #[test]
    fn every_fixture_in_range() {
        let mut games = vec![
            gen_prisoners_dilemma(),
            gen_matching_pennies(),
            gen_dominated_pennies(),
            gen_chain_game(4, 0.1).unwrap(),
        ];
        games.push(gen_lower_bound_game(3, 3, 1.0 / 3.0, &LowerBoundVariant::Bonus { player: 2, action: 2 }).unwrap());
        games.push(gen_hardness_game(3, 3, 0.09, &HardnessVariant::Target(vec![0, 2])).unwrap());
        assert!(games.iter().all(all_in_unit_interval));
    }
}
