use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::ValueEnum;
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;

use ratl::experiment::{
    log_log_slope, replay, run_trial, summarize, Algorithm, ExperimentConfig, GameSource, GeneratorSpec,
    SummaryRow, TrialRecord, RECORD_SCHEMA_VERSION,
};
use ratl::game::{load_game, save_game};
use ratl::ide::{dominance_margin, try_compute_ladder};
use ratl::learners::LearnerOutput;
use ratl::verify::{ce_gap, cce_gap, nash_gap, VERIFY_TOL};
use ratl::{ActionProfile, JointDistribution, LearnerConfig, Noise, NormalFormGame, RunReport};

use crate::{
    BenchArgs, Cli, Command, GameArgs, GapKind, GenArgs, GenParams, GeneratorName, IdeArgs, LearnArgs, NoiseArg,
    TuningArgs, VerifyArgs,
};

pub fn run(cli: Cli) -> Result<ExitCode> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .context("building the trial thread pool")?;
    match cli.command {
        Command::Gen(a) => gen(a),
        Command::Ide(a) => ide(a),
        Command::Learn(a) => pool.install(|| learn(a)),
        Command::Verify(a) => verify(a),
        Command::Bench(a) => pool.install(|| bench(a)),
    }
}

fn generator_spec(name: GeneratorName, p: &GenParams, delta: Option<f64>) -> Result<GeneratorSpec> {
    let label = name.to_possible_value().expect("named generator").get_name().to_string();
    let need = |v: Option<usize>, flag: &str| v.ok_or_else(|| anyhow!("generator {label} needs --{flag}"));
    let need_delta = || delta.ok_or_else(|| anyhow!("generator {label} needs a Δ"));
    Ok(match name {
        GeneratorName::Pd => GeneratorSpec::Pd,
        GeneratorName::MatchingPennies => GeneratorSpec::MatchingPennies,
        GeneratorName::DominatedPennies => GeneratorSpec::DominatedPennies,
        GeneratorName::LowerBound => GeneratorSpec::LowerBound {
            players: need(p.players, "players")?,
            actions: need(p.actions, "actions")?,
            delta: need_delta()?,
            bonus: match p.bonus.as_deref() {
                None => None,
                Some(&[j, a]) => Some((j, a)),
                Some(_) => bail!("--bonus takes player,action"),
            },
        },
        GeneratorName::Hardness => GeneratorSpec::Hardness {
            players: need(p.players, "players")?,
            actions: need(p.actions, "actions")?,
            delta: need_delta()?,
            target: p.target.clone(),
        },
        GeneratorName::Chain => GeneratorSpec::Chain {
            actions: need(p.actions, "actions")?,
            delta: need_delta()?,
        },
        GeneratorName::Random => GeneratorSpec::Random {
            actions: p.counts.clone().ok_or_else(|| anyhow!("generator random needs --counts"))?,
            seed: p.gen_seed,
        },
    })
}

fn game_source(args: &GameArgs, delta: f64) -> Result<GameSource> {
    match (&args.game, args.gen) {
        (Some(path), _) => Ok(GameSource::File(path.clone())),
        (None, Some(name)) => Ok(GameSource::Generator(generator_spec(
            name,
            &args.params,
            Some(args.gen_delta.unwrap_or(delta)),
        )?)),
        (None, None) => bail!("give either --game FILE or --gen NAME"),
    }
}

fn parse_algorithm(name: &str) -> Result<Algorithm> {
    if name == "naive" {
        return Ok(Algorithm::NaiveCce);
    }
    name.parse().map_err(|_| {
        let known: Vec<&str> = Algorithm::ALL.iter().map(|a| a.name()).collect();
        anyhow!("unknown algorithm {name:?}; expected one of {}", known.join(", "))
    })
}

fn learner_config(delta: f64, epsilon: f64, seed: u64, t: &TuningArgs, trace_every: usize) -> LearnerConfig {
    let mut c = LearnerConfig::new(delta, epsilon, t.fail_prob, seed).with_trace_every(trace_every);
    c.l_bound = t.l_bound;
    c.rounds = t.rounds;
    c.minibatch = t.minibatch;
    c.learning_rate = t.eta;
    c.clip_threshold = t.clip;
    c
}

fn noise(n: NoiseArg) -> Noise {
    match n {
        NoiseArg::Bernoulli => Noise::Bernoulli,
        NoiseArg::Deterministic => Noise::Deterministic,
    }
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn csv_sink(path: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(io::stdout()),
    };
    Ok(csv::Writer::from_writer(sink))
}

fn fmt_probs(p: &[f64]) -> String {
    let parts: Vec<String> = p.iter().map(|x| format!("{x:.4}")).collect();
    format!("[{}]", parts.join(", "))
}

fn ladder_table(game: &NormalFormGame, delta: f64) -> Result<(ratl::EliminationLadder, String)> {
    let ladder = try_compute_ladder(game, delta)?;
    let mut out = String::new();
    writeln!(out, "delta {delta}, ladder length {}", ladder.length)?;
    writeln!(out, "{:>5}  {:>6}  {:>6}  {:>10}  dominating mixture", "round", "player", "action", "margin")?;
    let mut sets: Vec<Vec<usize>> = game.action_counts().iter().map(|&c| (0..c).collect()).collect();
    for (l, round) in ladder.rounds.iter().enumerate() {
        for &(i, a) in round {
            let (margin, cert) = dominance_margin(game, i, a, &sets)?;
            writeln!(
                out,
                "{:>5}  {:>6}  {:>6}  {:>10.6}  {}",
                l + 1,
                i,
                a,
                margin,
                fmt_probs(cert.dominating_mixture.probs())
            )?;
        }
        for &(i, a) in round {
            sets[i].retain(|&x| x != a);
        }
    }
    writeln!(out, "survivors")?;
    for (i, s) in ladder.survivors.iter().enumerate() {
        writeln!(out, "  player {i}: {s:?}")?;
    }
    Ok((ladder, out))
}

fn gen(a: GenArgs) -> Result<ExitCode> {
    let game = generator_spec(a.generator, &a.params, a.delta)?.generate()?;
    let table = if a.with_ladder {
        let d = a
            .ladder_delta
            .or(a.delta)
            .ok_or_else(|| anyhow!("--with-ladder needs --ladder-delta or --delta"))?;
        Some(ladder_table(&game, d)?.1)
    } else {
        None
    };
    match &a.out {
        Some(p) => save_game(&game, p)?,
        None => println!("{}", game.to_json()),
    }
    if let Some(t) = table {
        // keep stdout a valid game file when it carries one
        if a.out.is_some() {
            print!("{t}");
        } else {
            eprint!("{t}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn ide(a: IdeArgs) -> Result<ExitCode> {
    let game = load_game(&a.game)?;
    let (ladder, table) = ladder_table(&game, a.delta)?;
    print!("{table}");
    if let Some(p) = &a.json {
        write_json(p, &ladder)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn run_trials(experiment: &ExperimentConfig, game: &NormalFormGame) -> Result<Vec<TrialRecord>> {
    // indexed collect keeps trial order regardless of completion order
    let records = (0..experiment.trials)
        .into_par_iter()
        .map(|k| run_trial(experiment, game, k))
        .collect::<ratl::Result<Vec<_>>>()?;
    Ok(records)
}

#[derive(Serialize)]
struct TrialRow {
    schema_version: u32,
    trial: usize,
    seed: u64,
    alg: String,
    success: bool,
    samples_used: u64,
    ida_mass: f64,
    gap: Option<f64>,
    wall_time_secs: f64,
}

#[derive(Serialize)]
struct TraceRow {
    round: usize,
    player: usize,
    action: usize,
    probability: f64,
    estimated_payoff: Option<f64>,
}

fn write_trace(path: &Path, report: &RunReport) -> Result<()> {
    let mut w = csv_sink(Some(path))?;
    for rec in report.trace.iter().flatten() {
        for (player, probs) in rec.strategies.iter().enumerate() {
            for (action, &probability) in probs.iter().enumerate() {
                w.serialize(TraceRow {
                    round: rec.round,
                    player,
                    action,
                    probability,
                    estimated_payoff: rec.payoffs.get(player).and_then(|u| u.get(action)).copied(),
                })?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn learn(a: LearnArgs) -> Result<ExitCode> {
    if let Some(path) = &a.replay {
        let record: TrialRecord = read_json(path)?;
        let same = replay(&record)?.canonical_json() == record.report.canonical_json();
        println!(
            "trial {} (seed {}): replay {}",
            record.trial,
            record.report.seed,
            if same { "identical" } else { "differs" }
        );
        return Ok(if same { ExitCode::SUCCESS } else { ExitCode::from(1) });
    }
    let trace_every = if a.trace && a.trace_every == 0 { 1 } else { a.trace_every };
    let experiment = match &a.config {
        Some(p) => read_json::<ExperimentConfig>(p)?,
        None => {
            let algorithm = parse_algorithm(a.alg.as_deref().expect("required by clap"))?;
            let delta = a.delta.expect("required by clap");
            let epsilon = a.epsilon.unwrap_or(delta);
            ExperimentConfig {
                game: game_source(&a.game, delta)?,
                algorithm,
                solver: a.tuning.solver.clone(),
                learner: learner_config(delta, epsilon, a.seed, &a.tuning, trace_every),
                noise: noise(a.tuning.noise),
                trials: a.trials,
                seed_base: a.seed,
            }
        }
    };
    experiment.validate()?;
    let game = experiment.game.load()?;
    let records = run_trials(&experiment, &game)?;

    let summary_path = match &a.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            for r in &records {
                write_json(&dir.join(format!("trial-{:04}.json", r.trial)), r)?;
                if a.trace {
                    write_trace(&dir.join(format!("trace-{:04}.csv", r.trial)), &r.report)?;
                }
            }
            Some(dir.join("summary.csv"))
        }
        None => None,
    };
    let mut w = csv_sink(summary_path.as_deref())?;
    for r in &records {
        w.serialize(TrialRow {
            schema_version: RECORD_SCHEMA_VERSION,
            trial: r.trial,
            seed: r.report.seed,
            alg: experiment.algorithm.name().to_string(),
            success: r.evaluation.success,
            samples_used: r.report.samples_used,
            ida_mass: r.evaluation.ida_mass,
            gap: r.evaluation.gap,
            wall_time_secs: r.report.wall_time_secs,
        })?;
    }
    w.flush()?;

    let ok = records.iter().filter(|r| r.evaluation.success).count();
    let row = summarize(&game, &experiment, &records)?;
    eprintln!(
        "{}: {ok}/{} trials verified, mean samples {:.1}, p95 samples {}",
        row.alg, row.trials, row.mean_samples, row.p95_samples
    );
    Ok(if a.strict && ok < records.len() { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

fn read_distribution(path: &Path, game: &NormalFormGame) -> Result<JointDistribution> {
    let value: serde_json::Value = read_json(path)?;
    let output = if value.get("report").is_some() {
        serde_json::from_value::<TrialRecord>(value)?.report.output
    } else if value.get("output").is_some() {
        serde_json::from_value::<RunReport>(value)?.output
    } else if value.get("components").is_some() {
        LearnerOutput::Distribution(serde_json::from_value(value)?)
    } else if value.is_array() {
        LearnerOutput::Profile(serde_json::from_value::<ActionProfile>(value)?)
    } else {
        bail!("{}: expected a distribution, profile, run report or trial record", path.display());
    };
    Ok(match output {
        LearnerOutput::Distribution(d) => d,
        LearnerOutput::Profile(p) => JointDistribution::point_mass(game.action_counts(), p.actions())?,
    })
}

fn verify(a: VerifyArgs) -> Result<ExitCode> {
    let game = load_game(&a.game)?;
    let dist = read_distribution(&a.dist, &game)?;
    dist.check_shape(game.action_counts())?;
    let ladder = try_compute_ladder(&game, a.delta)?;
    let cce = cce_gap(&game, &dist)?;
    let ce = ce_gap(&game, &dist)?;
    let nash = match dist.components() {
        [only] => Some(nash_gap(&game, &only.strategies)?),
        _ => None,
    };

    println!(
        "{:>6}  {:>12}  {:>12}  {:>12}  {:>12}",
        "player", "cce_gap", "ce_gap", "nash_gap", "ida_mass"
    );
    for i in 0..game.num_players() {
        let marginal = dist.marginal(i);
        let mass: f64 = ladder.eliminated(i, game.num_actions(i)).iter().map(|&a| marginal[a]).sum();
        let nash_i = nash.as_ref().map_or("-".to_string(), |g| format!("{:.3e}", g.per_player[i]));
        println!(
            "{:>6}  {:>12.3e}  {:>12.3e}  {:>12}  {:>12.3e}",
            i, cce.per_player[i], ce.per_player[i], nash_i, mass
        );
    }
    let ida = ladder.ida_mass(&dist);
    println!("ladder length      {}", ladder.length);
    println!("max cce gap        {:.6e}", cce.max_gap);
    println!("max ce gap         {:.6e}", ce.max_gap);
    println!("ida mass           {ida:.6e}");
    println!("rationalizable     {:.6e}", 1.0 - ida);

    let mut ok = ida == 0.0;
    if let Some(eps) = a.epsilon {
        let gap = match a.kind {
            GapKind::Cce => cce.max_gap,
            GapKind::Ce => ce.max_gap,
        };
        ok &= gap <= eps + VERIFY_TOL;
    }
    println!("verdict            {}", if ok { "pass" } else { "fail" });
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn bench(a: BenchArgs) -> Result<ExitCode> {
    let algorithms = a.alg.iter().map(|s| parse_algorithm(s)).collect::<Result<Vec<_>>>()?;
    let mut rows: Vec<(usize, SummaryRow)> = Vec::new();
    for &algorithm in &algorithms {
        for &delta in &a.delta {
            let epsilons = a.epsilon.clone().unwrap_or_else(|| vec![delta]);
            for (e, &epsilon) in epsilons.iter().enumerate() {
                let experiment = ExperimentConfig {
                    game: game_source(&a.game, delta)?,
                    algorithm,
                    solver: a.tuning.solver.clone(),
                    learner: learner_config(delta, epsilon, a.seed_base, &a.tuning, 0),
                    noise: noise(a.tuning.noise),
                    trials: a.trials,
                    seed_base: a.seed_base,
                };
                experiment.validate()?;
                let game = experiment.game.load()?;
                let records = run_trials(&experiment, &game)?;
                let row = summarize(&game, &experiment, &records)?;
                eprintln!(
                    "{} delta {delta} epsilon {epsilon}: success {:.3}, mean samples {:.1}",
                    row.alg, row.success_rate, row.mean_samples
                );
                rows.push((e, row));
            }
        }
    }
    let mut w = csv_sink(a.out.as_deref())?;
    for (_, row) in &rows {
        w.serialize(row)?;
    }
    w.flush()?;

    if a.delta.len() > 1 {
        let groups = a.epsilon.as_ref().map_or(1, Vec::len);
        for alg in &algorithms {
            for e in 0..groups {
                let points: Vec<(f64, f64)> = rows
                    .iter()
                    .filter(|(k, r)| *k == e && r.alg == alg.name())
                    .map(|(_, r)| (r.delta, r.mean_samples))
                    .collect();
                eprintln!("{}: log-log slope of mean samples in delta {:.3}", alg.name(), log_log_slope(&points));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}
