mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ratl::bandit::{BanditEnv, Noise};
use ratl::game::{gen_random_game, ProfileIter};
use ratl::ide::{dominance_margin, elimination_round, replay_certificate, try_compute_ladder};
use ratl::learners::{softmax, stationary_distribution, ColumnStochastic};
use ratl::verify::{ce_gap, cce_gap, nash_gap, regret_trace};
use ratl::{ActionProfile, JointDistribution, MixedStrategy, NormalFormGame, ProductComponent};

use common::{advantages, maximin_by_vertices};

fn game_strategy() -> impl Strategy<Value = NormalFormGame> {
    (prop::collection::vec(1usize..=3, 2..=3), any::<u64>())
        .prop_map(|(counts, seed)| gen_random_game(counts.len(), &counts, seed))
}

fn strategy_for(k: usize) -> impl Strategy<Value = MixedStrategy> {
    prop::collection::vec(0.0f64..1.0, k).prop_map(|mut w| {
        w[0] += 1e-3;
        MixedStrategy::from_weights(w).unwrap()
    })
}

fn dist_for(counts: Vec<usize>) -> impl Strategy<Value = JointDistribution> {
    let component = counts.iter().map(|&k| strategy_for(k)).collect::<Vec<_>>();
    prop::collection::vec((0.01f64..1.0, component), 1..4).prop_map(|parts| {
        let total: f64 = parts.iter().map(|p| p.0).sum();
        JointDistribution::new(
            parts
                .into_iter()
                .map(|(w, strategies)| ProductComponent { weight: w / total, strategies })
                .collect(),
        )
        .unwrap()
    })
}

fn game_and_dist() -> impl Strategy<Value = (NormalFormGame, JointDistribution)> {
    game_strategy().prop_flat_map(|g| {
        let counts = g.action_counts().to_vec();
        (Just(g), dist_for(counts))
    })
}

/// Gaps by enumerating every joint profile of the full tensor.
fn brute_force_gaps(game: &NormalFormGame, dist: &JointDistribution) -> (f64, f64) {
    let counts = game.action_counts().to_vec();
    let profiles: Vec<(Vec<usize>, f64)> = ProfileIter::new(&counts).map(|p| {
        let q = dist.prob_of_profile(&p);
        (p, q)
    }).collect();
    let mut cce: f64 = 0.0;
    let mut ce: f64 = 0.0;
    for i in 0..game.num_players() {
        let base: f64 = profiles.iter().map(|(p, q)| q * game.utility_at(i, p)).sum();
        let mut best_fixed = f64::NEG_INFINITY;
        for dev in 0..counts[i] {
            let v: f64 = profiles
                .iter()
                .map(|(p, q)| {
                    let mut d = p.clone();
                    d[i] = dev;
                    q * game.utility_at(i, &d)
                })
                .sum();
            best_fixed = best_fixed.max(v);
        }
        cce = cce.max((best_fixed - base).max(0.0));
        let mut swap = 0.0;
        for rec in 0..counts[i] {
            let on: Vec<&(Vec<usize>, f64)> = profiles.iter().filter(|(p, _)| p[i] == rec).collect();
            let stay: f64 = on.iter().map(|(p, q)| q * game.utility_at(i, p)).sum();
            let best = (0..counts[i])
                .map(|dev| {
                    on.iter()
                        .map(|(p, q)| {
                            let mut d = p.clone();
                            d[i] = dev;
                            q * game.utility_at(i, &d)
                        })
                        .sum::<f64>()
                })
                .fold(f64::NEG_INFINITY, f64::max);
            swap += (best - stay).max(0.0);
        }
        ce = ce.max(swap);
    }
    (cce, ce)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dominance_margin_matches_vertex_oracle(g in game_strategy()) {
        let sets: Vec<Vec<usize>> = g.action_counts().iter().map(|&c| (0..c).collect()).collect();
        for i in 0..g.num_players() {
            for a in 0..g.num_actions(i) {
                let (m, cert) = dominance_margin(&g, i, a, &sets).unwrap();
                prop_assert!(m >= 0.0);
                let replayed = replay_certificate(&g, i, a, &sets, &cert.dominating_mixture).unwrap();
                prop_assert!((replayed - m).abs() <= 1e-9);
                let (exact, _) = maximin_by_vertices(&advantages(&g, i, a, &sets));
                prop_assert!((m - exact.max(0.0)).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn ladder_reaches_a_fixpoint(g in game_strategy(), delta in 0.0f64..0.3) {
        let ladder = try_compute_ladder(&g, delta).unwrap();
        prop_assert!(ladder.survivors.iter().all(|s| !s.is_empty()));
        prop_assert!(elimination_round(&g, delta, &ladder.survivors).unwrap().is_empty());
        prop_assert_eq!(ladder.length, ladder.rounds.len());
        let total: usize = ladder.rounds.iter().map(Vec::len).sum();
        let removed: usize = g.action_counts().iter().zip(&ladder.survivors).map(|(c, s)| c - s.len()).sum();
        prop_assert_eq!(total, removed);
        // every surviving profile is rationalizable
        let p = ActionProfile(ladder.survivors.iter().map(|s| s[0]).collect());
        prop_assert!(ratl::ide::is_profile_rationalizable(&g, delta, &p).unwrap());
    }

    #[test]
    fn gap_relations((g, d) in game_and_dist()) {
        let cce = cce_gap(&g, &d).unwrap();
        let ce = ce_gap(&g, &d).unwrap();
        prop_assert!(cce.max_gap >= 0.0 && ce.max_gap >= 0.0);
        prop_assert!(ce.max_gap >= cce.max_gap - 1e-12);
        for (p, q) in ce.per_player.iter().zip(&cce.per_player) {
            prop_assert!(p >= &(q - 1e-12));
        }
        let (bf_cce, bf_ce) = brute_force_gaps(&g, &d);
        prop_assert!((cce.max_gap - bf_cce).abs() <= 1e-12);
        prop_assert!((ce.max_gap - bf_ce).abs() <= 1e-12);
    }

    #[test]
    fn product_cce_gap_is_nash_gap((g, d) in game_and_dist()) {
        let x = d.components()[0].strategies.clone();
        let prod = JointDistribution::product(x.clone()).unwrap();
        prop_assert!((cce_gap(&g, &prod).unwrap().max_gap - nash_gap(&g, &x).unwrap().max_gap).abs() <= 1e-12);
    }

    #[test]
    fn point_mass_ce_equals_cce(g in game_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = JointDistribution::product(g.action_counts().iter().map(|&c| MixedStrategy::uniform(c)).collect())
            .unwrap()
            .sample(&mut rng);
        let d = JointDistribution::point_mass(g.action_counts(), &p).unwrap();
        prop_assert_eq!(cce_gap(&g, &d).unwrap().max_gap, ce_gap(&g, &d).unwrap().max_gap);
    }

    #[test]
    fn swap_regret_dominates_external(g in game_strategy(), seed in any::<u64>(), t in 1usize..20) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rounds: Vec<Vec<MixedStrategy>> = (0..t)
            .map(|_| {
                g.action_counts()
                    .iter()
                    .map(|&c| {
                        let w = (0..c).map(|_| rand::Rng::gen::<f64>(&mut rng) + 1e-3).collect();
                        MixedStrategy::from_weights(w).unwrap()
                    })
                    .collect()
            })
            .collect();
        for i in 0..g.num_players() {
            let (ext, swap) = regret_trace(&g, &rounds, i).unwrap();
            prop_assert!(swap >= ext - 1e-12);
        }
    }

    #[test]
    fn softmax_matrices_have_exact_fixed_points(
        scores in prop::collection::vec(prop::collection::vec(-50.0f64..50.0, 4), 4),
        eta in 0.0f64..1e4,
    ) {
        let cols: Vec<Vec<f64>> = scores.iter().map(|s| softmax(s, eta).probs().to_vec()).collect();
        let m = ColumnStochastic::from_columns(&cols).unwrap();
        let (x, r) = stationary_distribution(&m, &MixedStrategy::uniform(4), 1e-12).unwrap();
        prop_assert!(r <= 1e-12);
        prop_assert!((x.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        prop_assert!(x.probs().iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn clipping_keeps_a_valid_strategy(s in strategy_for(5), frac in 0.0f64..1.0) {
        let p = frac / 5.0 * 0.999;
        let c = s.clipped(p).unwrap();
        prop_assert!((c.probs().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        for (a, &q) in s.probs().iter().enumerate() {
            prop_assert_eq!(c.prob(a) == 0.0, q <= p);
        }
    }

    #[test]
    fn equal_seeds_equal_observations(seed in any::<u64>(), g in game_strategy()) {
        let profile: Vec<usize> = vec![0; g.num_players()];
        let mut a = BanditEnv::new(&g, seed, Noise::Bernoulli);
        let mut b = BanditEnv::new(&g, seed, Noise::Bernoulli);
        let opp: Vec<MixedStrategy> = g.action_counts()[1..].iter().map(|&c| MixedStrategy::uniform(c)).collect();
        for _ in 0..50 {
            prop_assert_eq!(a.pull(&ActionProfile(profile.clone())).unwrap(), b.pull(&ActionProfile(profile.clone())).unwrap());
            use ratl::MixedFeedback;
            prop_assert_eq!(a.pull_mixed(0, 0, &opp).unwrap(), b.pull_mixed(0, 0, &opp).unwrap());
        }
    }

    #[test]
    fn game_json_round_trip(g in game_strategy()) {
        let back = NormalFormGame::from_json(&g.to_json()).unwrap();
        prop_assert_eq!(back, g);
    }
}

/// On dyadic inputs every product and partial sum is exact, so the
/// component-wise verifier and full-tensor enumeration agree bitwise.
#[test]
fn dyadic_gaps_match_brute_force_bitwise() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let counts = vec![2, 3];
        let utilities = (0..2)
            .map(|_| (0..6).map(|_| rand::Rng::gen_range(&mut rng, 0..=8) as f64 / 8.0).collect())
            .collect();
        let g = NormalFormGame::new(counts, utilities).unwrap();
        let d = JointDistribution::new(vec![
            ProductComponent {
                weight: 0.5,
                strategies: vec![MixedStrategy::new(vec![0.25, 0.75]).unwrap(), MixedStrategy::new(vec![0.5, 0.25, 0.25]).unwrap()],
            },
            ProductComponent {
                weight: 0.5,
                strategies: vec![MixedStrategy::pure(2, 1), MixedStrategy::new(vec![0.0, 0.5, 0.5]).unwrap()],
            },
        ])
        .unwrap();
        let (bf_cce, bf_ce) = brute_force_gaps(&g, &d);
        assert_eq!(cce_gap(&g, &d).unwrap().max_gap, bf_cce);
        assert_eq!(ce_gap(&g, &d).unwrap().max_gap, bf_ce);
    }
}
