//! Acceptance suite: one line per criterion. Pass criterion numbers as
//! arguments to run a subset, e.g. `cargo test --test acceptance -- 3 5`.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ratl::bandit::{BanditEnv, Noise};
use ratl::experiment::{
    log_log_slope, replay_matches, run_trial, summarize, Algorithm, ExperimentConfig, GameSource,
    GeneratorSpec, TrialRecord,
};
use ratl::game::{
    gen_chain_game, gen_dominated_pennies, gen_lower_bound_game, gen_prisoners_dilemma,
    gen_random_game, LowerBoundVariant,
};
use ratl::ide::{dominance_margin, never_best_response_margin, replay_certificate};
use ratl::learners::{adaptive_hedge_ce, hedge_cce, iterative_best_response, RunReport};
use ratl::reductions::{ce_reduction, cce_reduction, default_solvers};
use ratl::verify::{ce_gap, cce_gap, nash_gap};
use ratl::{compute_ladder, LearnerConfig, MixedStrategy, NormalFormGame};

use common::{advantages, bimatrix_nash, grid_steps, maximin_by_grid, maximin_by_vertices, oracle_survivors};

type Verdict = (bool, String);

fn pct(k: usize, n: usize) -> String {
    format!("{k}/{n} = {:.1}%", 100.0 * k as f64 / n as f64)
}

/// The 200 random games shared by criteria 1 and 2, with their Δ.
fn random_suite() -> Vec<(NormalFormGame, f64)> {
    let deltas = [0.0, 0.02, 0.05, 0.1];
    (0..200u64)
        .map(|seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(10_000 + seed);
            let n = if seed % 2 == 0 { 2 } else { 3 };
            let counts: Vec<usize> = (0..n).map(|_| rng.gen_range(2..=4)).collect();
            (gen_random_game(n, &counts, seed), deltas[(seed / 2) as usize % deltas.len()])
        })
        .collect()
}

fn full_sets(game: &NormalFormGame) -> Vec<Vec<usize>> {
    game.action_counts().iter().map(|&c| (0..c).collect()).collect()
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut mismatched = 0;
    let mut margin_err: f64 = 0.0;
    let mut grid_excess: f64 = f64::NEG_INFINITY;
    let mut replay_err: f64 = 0.0;
    let mut eliminated = 0;
    for (game, delta) in random_suite() {
        let ladder = compute_ladder(&game, delta);
        eliminated += ladder.rounds.iter().map(Vec::len).sum::<usize>();
        if ladder.survivors != oracle_survivors(&game, delta) {
            mismatched += 1;
        }
        let sets = full_sets(&game);
        for i in 0..game.num_players() {
            for a in 0..game.num_actions(i) {
                let (m, cert) = dominance_margin(&game, i, a, &sets).unwrap();
                let rows = advantages(&game, i, a, &sets);
                let (exact, _) = maximin_by_vertices(&rows);
                let grid = maximin_by_grid(&rows, grid_steps(game.num_actions(i)));
                margin_err = margin_err.max((m - exact.max(0.0)).abs());
                grid_excess = grid_excess.max(grid - m);
                let r = replay_certificate(&game, i, a, &sets, &cert.dominating_mixture).unwrap();
                replay_err = replay_err.max((r - m).abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let ok = mismatched == 0 && margin_err <= 1e-9 && grid_excess <= 1e-9 && replay_err <= 1e-9 && secs < 120.0;
    (
        ok,
        format!(
            "survivor mismatches {mismatched}/200 ({eliminated} eliminations), max |LP - vertex oracle| {margin_err:.1e}, \
             max grid - LP {grid_excess:.1e}, max replay error {replay_err:.1e}, {secs:.1}s"
        ),
    )
}

fn criterion_2() -> Verdict {
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for (game, delta) in random_suite() {
        let ladder = compute_ladder(&game, delta);
        let mut stages = vec![full_sets(&game)];
        stages.push(ladder.survivors.clone());
        for sets in &stages {
            for i in 0..game.num_players() {
                for a in 0..game.num_actions(i) {
                    let (m, _) = dominance_margin(&game, i, a, sets).unwrap();
                    let v = never_best_response_margin(&game, i, a, sets).unwrap();
                    worst = worst.max((m - v).abs());
                    pairs += 1;
                }
            }
        }
    }
    (worst <= 1e-7, format!("max |dominance - never-best-response| = {worst:.1e} over {pairs} pairs"))
}

fn criterion_3() -> Verdict {
    let fixtures: Vec<(&str, NormalFormGame, f64)> = vec![
        ("pd", gen_prisoners_dilemma(), 0.2),
        ("chain A=3", gen_chain_game(3, 0.05).unwrap(), 0.05),
        (
            "lower-bound G0 N=2 A=3",
            gen_lower_bound_game(2, 3, 0.1, &LowerBoundVariant::Base).unwrap(),
            0.1,
        ),
    ];
    let trials = 200;
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, game, delta) in fixtures {
        let ladder = compute_ladder(&game, delta);
        let sum_a: u64 = game.action_counts().iter().map(|&c| c as u64).sum();
        let mut wins = 0;
        let mut exact_count = true;
        for seed in 0..trials {
            let cfg = LearnerConfig::new(delta, delta, 0.05, seed).with_l_bound(ladder.length);
            let mut env = BanditEnv::new(&game, seed, Noise::Bernoulli);
            let r = iterative_best_response(&mut env, &cfg).unwrap();
            let p = r.output.profile().unwrap();
            if p.0.iter().enumerate().all(|(i, &a)| !ladder.is_eliminated(i, a)) {
                wins += 1;
            }
            let m = r.parameters.ibr_minibatch.unwrap();
            exact_count &= r.samples_used == ladder.length as u64 * sum_a * m;
        }
        let rate = wins as f64 / trials as f64;
        ok &= rate >= 0.904 && exact_count;
        parts.push(format!("{name}: {} (exact counts: {exact_count})", pct(wins, trials as usize)));
    }
    (ok, parts.join("; "))
}

fn criterion_4() -> Verdict {
    let mut points = Vec::new();
    let mut exact = true;
    for delta in [0.4, 0.2, 0.1] {
        let exp = ExperimentConfig {
            game: GameSource::Generator(GeneratorSpec::Pd),
            algorithm: Algorithm::Ibr,
            solver: "default".into(),
            learner: LearnerConfig::new(delta, delta, 0.05, 0).with_l_bound(1),
            noise: Noise::Bernoulli,
            trials: 20,
            seed_base: 500,
        };
        let game = exp.game.load().unwrap();
        let recs: Vec<TrialRecord> = (0..exp.trials).map(|k| run_trial(&exp, &game, k).unwrap()).collect();
        let row = summarize(&game, &exp, &recs).unwrap();
        let m = recs[0].report.parameters.ibr_minibatch.unwrap();
        exact &= row.mean_samples == (4 * m) as f64;
        points.push((delta, row.mean_samples));
    }
    let slope = log_log_slope(&points);
    (
        (slope + 2.0).abs() <= 0.3 && exact,
        format!("slope {slope:.4} over Δ = 0.4, 0.2, 0.1; mean samples {:?}", points.iter().map(|p| p.1).collect::<Vec<_>>()),
    )
}

struct Fixture {
    name: &'static str,
    game: NormalFormGame,
    l: usize,
}

fn hedge_fixtures() -> Vec<Fixture> {
    vec![
        Fixture { name: "pd", game: gen_prisoners_dilemma(), l: 1 },
        Fixture { name: "chain A=3", game: gen_chain_game(3, 0.1).unwrap(), l: 4 },
    ]
}

/// Largest IDA probability in any traced unclipped iterate.
fn max_iterate_ida_mass(report: &RunReport, game: &NormalFormGame, delta: f64) -> f64 {
    let ladder = compute_ladder(game, delta);
    let mut worst: f64 = 0.0;
    for rec in report.trace.iter().flatten() {
        for (i, s) in rec.strategies.iter().enumerate() {
            for (a, &p) in s.iter().enumerate() {
                if ladder.is_eliminated(i, a) {
                    worst = worst.max(p);
                }
            }
        }
    }
    worst
}

fn hedge_criterion(ce: bool) -> Verdict {
    let (eps, delta, fail, trials) = (0.2, 0.2, 0.05, 50u64);
    let mut ok = true;
    let mut parts = Vec::new();
    for fx in hedge_fixtures() {
        let ladder = compute_ladder(&fx.game, delta);
        let (mut good, mut suppressed, mut accounted) = (0, 0, 0);
        let mut worst_residual: f64 = 0.0;
        let mut worst_gap: f64 = 0.0;
        for seed in 0..trials {
            let cfg = LearnerConfig::new(delta, eps, fail, seed).with_l_bound(fx.l).with_trace_every(1);
            let mut env = BanditEnv::new(&fx.game, seed, Noise::Bernoulli);
            let r = if ce {
                adaptive_hedge_ce(&mut env, &cfg).unwrap()
            } else {
                hedge_cce(&mut env, &cfg).unwrap()
            };
            let d = r.output.distribution().unwrap();
            let gap = if ce { ce_gap(&fx.game, d) } else { cce_gap(&fx.game, d) }.unwrap().max_gap;
            worst_gap = worst_gap.max(gap);
            if ladder.ida_mass(d) == 0.0 && gap <= eps {
                good += 1;
            }
            let p = r.parameters.clip_threshold.unwrap();
            if max_iterate_ida_mass(&r, &fx.game, delta) <= p + 1e-12 {
                suppressed += 1;
            }
            let pulled: u64 = r
                .trace
                .as_ref()
                .unwrap()
                .iter()
                .map(|rec| rec.minibatch.iter().zip(&rec.payoffs).map(|(m, u)| m * u.len() as u64).sum::<u64>())
                .sum();
            if r.samples_used == r.ibr_samples + pulled && r.samples_used == env_samples(&env) {
                accounted += 1;
            }
            if let Some(res) = r.max_stationary_residual {
                worst_residual = worst_residual.max(res);
            }
        }
        let n = trials as usize;
        ok &= good as f64 >= 0.9 * n as f64 && suppressed as f64 >= 0.9 * n as f64 && accounted == n;
        let mut line = format!(
            "{}: rationalizable and gap <= ε in {}, iterate suppression in {}, exact accounting {accounted}/{n}, worst gap {worst_gap:.4}",
            fx.name,
            pct(good, n),
            pct(suppressed, n)
        );
        if ce {
            ok &= worst_residual <= 1e-12;
            line.push_str(&format!(", max stationary residual {worst_residual:.1e}"));
        }
        parts.push(line);
    }
    (ok, parts.join("; "))
}

fn env_samples(env: &BanditEnv<'_>) -> u64 {
    use ratl::MixedFeedback;
    env.sample_count()
}

fn criterion_7() -> Verdict {
    let (eps, delta, fail, trials) = (0.2, 0.2, 0.05, 50u64);
    let fixtures = vec![
        Fixture { name: "pd", game: gen_prisoners_dilemma(), l: 1 },
        Fixture { name: "chain A=3", game: gen_chain_game(3, 0.1).unwrap(), l: 4 },
        Fixture { name: "dominated pennies", game: gen_dominated_pennies(), l: 1 },
    ];
    let solvers = default_solvers();
    let mut ok = true;
    let mut parts = Vec::new();
    for fx in &fixtures {
        let ladder = compute_ladder(&fx.game, delta);
        let na = fx.game.num_players() * fx.game.max_actions();
        for ce in [false, true] {
            let (mut good, mut calls_ok, mut max_calls) = (0, 0, 0);
            for seed in 0..trials {
                let cfg = LearnerConfig::new(delta, eps, fail, seed).with_l_bound(fx.l);
                let mut env = BanditEnv::new(&fx.game, seed, Noise::Bernoulli);
                let r = if ce {
                    ce_reduction(&mut env, &cfg, solvers.ce.as_ref()).unwrap()
                } else {
                    cce_reduction(&mut env, &cfg, solvers.cce.as_ref()).unwrap()
                };
                let calls = r.solver_calls.unwrap();
                max_calls = max_calls.max(calls);
                if calls <= na {
                    calls_ok += 1;
                }
                let d = r.output.distribution().unwrap();
                let gap = if ce { ce_gap(&fx.game, d) } else { cce_gap(&fx.game, d) }.unwrap().max_gap;
                let within = r
                    .support_history
                    .as_ref()
                    .unwrap()
                    .iter()
                    .all(|sets| sets.iter().enumerate().all(|(i, s)| s.iter().all(|&a| !ladder.is_eliminated(i, a))));
                if gap <= eps && within && d.supported_within(&ladder.survivors) {
                    good += 1;
                }
            }
            let n = trials as usize;
            ok &= calls_ok == n && good as f64 >= 0.9 * n as f64;
            parts.push(format!(
                "{} {}: success {}, max solver calls {max_calls} <= NA = {na}",
                fx.name,
                if ce { "ce" } else { "cce" },
                pct(good, n)
            ));
        }
    }
    (ok, parts.join("; "))
}

fn criterion_8() -> Verdict {
    let game = gen_dominated_pennies();
    let (eps, delta, trials) = (0.2, 0.2, 50u64);
    let mut good = 0;
    let mut worst: f64 = 0.0;
    for seed in 0..trials {
        let cfg = LearnerConfig::new(delta, eps, 0.05, seed).with_l_bound(1);
        let mut env = BanditEnv::new(&game, seed, Noise::Bernoulli);
        let r = hedge_cce(&mut env, &cfg).unwrap();
        let d = r.output.distribution().unwrap();
        let marginals: Vec<MixedStrategy> = (0..2).map(|i| MixedStrategy::from_weights(d.marginal(i)).unwrap()).collect();
        let g = nash_gap(&game, &marginals).unwrap().max_gap;
        worst = worst.max(g);
        if g <= 2.0 * eps {
            good += 1;
        }
    }
    let n = trials as usize;
    (good as f64 >= 0.9 * n as f64, format!("nash gap of marginals <= 2ε in {}, worst {worst:.4}", pct(good, n)))
}

fn criterion_9() -> Verdict {
    let mut violations = 0;
    let mut equilibria = 0;
    let mut empty = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(20_000 + seed);
        let counts = [rng.gen_range(2..=3), rng.gen_range(2..=3)];
        let game = gen_random_game(2, &counts, 30_000 + seed);
        let survivors = compute_ladder(&game, 0.0).survivors;
        let nash = bimatrix_nash(&game);
        if nash.is_empty() {
            empty += 1;
        }
        for (x, y) in &nash {
            equilibria += 1;
            for (i, s) in [x, y].iter().enumerate() {
                if s.iter().enumerate().any(|(a, &p)| p > 1e-12 && !survivors[i].contains(&a)) {
                    violations += 1;
                }
            }
        }
    }
    (
        violations == 0 && empty == 0,
        format!("{equilibria} equilibria in 100 games, {violations} support violations, {empty} games without an equilibrium"),
    )
}

fn criterion_10() -> Verdict {
    let mut identical = 0;
    let mut total = 0;
    for alg in Algorithm::ALL {
        for (spec, l) in [(GeneratorSpec::Pd, 1), (GeneratorSpec::Chain { actions: 3, delta: 0.1 }, 4)] {
            let mut learner = LearnerConfig::new(0.2, 0.2, 0.05, 0).with_l_bound(l);
            if matches!(alg, Algorithm::Cce | Algorithm::Ce) {
                learner = learner.with_trace_every(1000);
            }
            let exp = ExperimentConfig {
                game: GameSource::Generator(spec),
                algorithm: alg,
                solver: "default".into(),
                learner,
                noise: Noise::Bernoulli,
                trials: 1,
                seed_base: 77,
            };
            let game = exp.game.load().unwrap();
            let rec = run_trial(&exp, &game, 0).unwrap();
            let parsed: TrialRecord = serde_json::from_str(&serde_json::to_string(&rec).unwrap()).unwrap();
            total += 1;
            if replay_matches(&parsed).unwrap() {
                identical += 1;
            }
        }
    }
    (identical == total, format!("{identical}/{total} replays byte-identical (excluding wall time)"))
}

fn main() -> ExitCode {
    let criteria: [(u32, &str, fn() -> Verdict); 10] = [
        (1, "IDE oracle vs brute force", criterion_1),
        (2, "minimax equivalence", criterion_2),
        (3, "IBR returns a rationalizable profile", criterion_3),
        (4, "IBR sample scaling in Δ", criterion_4),
        (5, "Hedge rationalizable ε-CCE", || hedge_criterion(false)),
        (6, "adaptive Hedge rationalizable ε-CE", || hedge_criterion(true)),
        (7, "black-box reductions", criterion_7),
        (8, "zero-sum Nash from CCE marginals", criterion_8),
        (9, "exact NE supports are rationalizable", criterion_9),
        (10, "deterministic replay", criterion_10),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (id, name, run) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let (ok, detail) = run();
        println!(
            "criterion {id:>2} {} {name}: {detail} [{:.1}s]",
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
        if !ok {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
