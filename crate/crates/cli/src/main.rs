use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;

/// Learn rationalizable profiles and equilibria from bandit feedback, and
/// check the results exactly.
#[derive(Parser, Debug)]
#[command(name = "ratl", version, about)]
pub struct Cli {
    /// Worker threads for running trials; 0 uses every core.
    #[arg(long, global = true, env = "RATL_THREADS", default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a fixture game to a file (or stdout).
    Gen(GenArgs),
    /// Print the exact elimination ladder of a game.
    Ide(IdeArgs),
    /// Run a learner for one or more seeded trials.
    Learn(LearnArgs),
    /// Check a distribution or profile against a game.
    Verify(VerifyArgs),
    /// Sweep algorithms and accuracy targets, writing one CSV row per cell.
    Bench(BenchArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GeneratorName {
    Pd,
    MatchingPennies,
    DominatedPennies,
    LowerBound,
    Hardness,
    Chain,
    Random,
}

/// Generator parameters; which ones are required depends on the generator.
#[derive(Args, Debug, Clone, Default)]
pub struct GenParams {
    /// Number of players (lower-bound, hardness).
    #[arg(long)]
    pub players: Option<usize>,
    /// Actions per player (lower-bound, hardness, chain).
    #[arg(long)]
    pub actions: Option<usize>,
    /// Per-player action counts, comma separated (random).
    #[arg(long, value_delimiter = ',')]
    pub counts: Option<Vec<usize>>,
    /// Bonus cell `player,action` of a lower-bound variant; omit for the base game.
    #[arg(long, value_delimiter = ',')]
    pub bonus: Option<Vec<usize>>,
    /// Target profile of a hardness variant, comma separated; omit for the base game.
    #[arg(long, value_delimiter = ',')]
    pub target: Option<Vec<usize>>,
    /// Seed of the random generator.
    #[arg(long, default_value_t = 0)]
    pub gen_seed: u64,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Fixture to generate.
    pub generator: GeneratorName,
    #[command(flatten)]
    pub params: GenParams,
    /// Gap Δ of the lower-bound, hardness and chain generators.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Output file; stdout when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Also print the exact elimination ladder.
    #[arg(long)]
    pub with_ladder: bool,
    /// Δ of the printed ladder; defaults to --delta.
    #[arg(long, requires = "with_ladder")]
    pub ladder_delta: Option<f64>,
}

#[derive(Args, Debug)]
pub struct IdeArgs {
    /// Game file.
    #[arg(long)]
    pub game: PathBuf,
    /// Dominance gap Δ.
    #[arg(long)]
    pub delta: f64,
    /// Write the ladder as JSON to this file.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

/// Game given either as a file or as a generator.
#[derive(Args, Debug, Clone)]
pub struct GameArgs {
    /// Game file.
    #[arg(long, conflicts_with = "gen")]
    pub game: Option<PathBuf>,
    /// Generate the game instead of reading it.
    #[arg(long)]
    pub gen: Option<GeneratorName>,
    #[command(flatten)]
    pub params: GenParams,
    /// Gap of the generated game; defaults to the learner Δ.
    #[arg(long)]
    pub gen_delta: Option<f64>,
}

/// Overrides of the formula-derived learner parameters.
#[derive(Args, Debug, Clone)]
pub struct TuningArgs {
    /// Failure probability δ.
    #[arg(long, default_value_t = 0.05)]
    pub fail_prob: f64,
    /// Elimination-length bound L.
    #[arg(long = "L")]
    pub l_bound: Option<usize>,
    /// Number of Hedge rounds T.
    #[arg(long = "T")]
    pub rounds: Option<usize>,
    /// Fixed minibatch M.
    #[arg(long = "M")]
    pub minibatch: Option<u64>,
    /// Constant learning rate η.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Clipping threshold p.
    #[arg(long)]
    pub clip: Option<f64>,
    /// Subgame solver of the reductions.
    #[arg(long, default_value = "default")]
    pub solver: String,
    /// Bernoulli draws with the true payoff as mean, or the payoff itself.
    #[arg(long, value_enum, default_value_t = NoiseArg::Bernoulli)]
    pub noise: NoiseArg,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseArg {
    Bernoulli,
    Deterministic,
}

#[derive(Args, Debug)]
pub struct LearnArgs {
    /// ibr, naive-cce (alias naive), naive-ce, cce, ce, cce-reduce or ce-reduce.
    #[arg(long, required_unless_present_any = ["replay", "config"])]
    pub alg: Option<String>,
    #[command(flatten)]
    pub game: GameArgs,
    /// Rationalizability gap Δ.
    #[arg(long, required_unless_present_any = ["replay", "config"])]
    pub delta: Option<f64>,
    /// Equilibrium accuracy ε; defaults to Δ.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[command(flatten)]
    pub tuning: TuningArgs,
    /// Seed of trial 0; trial k uses seed + k.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Number of independent trials.
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    /// Record every k-th round in the reports.
    #[arg(long, default_value_t = 0)]
    pub trace_every: usize,
    /// Also write each trial's trace as CSV (needs --out).
    #[arg(long, requires = "out")]
    pub trace: bool,
    /// Directory for trial records, traces and summary.csv.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
    /// Read the whole experiment from a JSON file instead of flags.
    #[arg(long, conflicts_with = "replay")]
    pub config: Option<PathBuf>,
    /// Re-run a trial record and compare it with the recorded report.
    #[arg(long)]
    pub replay: Option<PathBuf>,
    /// Exit 1 if any trial fails verification.
    #[arg(long)]
    pub strict: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum GapKind {
    Cce,
    Ce,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Game file.
    #[arg(long)]
    pub game: PathBuf,
    /// Joint distribution, action profile, run report or trial record (JSON).
    #[arg(long)]
    pub dist: PathBuf,
    /// Dominance gap Δ of the rationalizability check.
    #[arg(long)]
    pub delta: f64,
    /// Gap tolerance; only rationalizability is checked when omitted.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Which gap is compared with ε.
    #[arg(long, value_enum, default_value_t = GapKind::Cce)]
    pub kind: GapKind,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Algorithms, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub alg: Vec<String>,
    #[command(flatten)]
    pub game: GameArgs,
    /// Δ values, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub delta: Vec<f64>,
    /// ε values, comma separated; defaults to each Δ.
    #[arg(long, value_delimiter = ',')]
    pub epsilon: Option<Vec<f64>>,
    #[command(flatten)]
    pub tuning: TuningArgs,
    /// Seed of trial 0 in every cell.
    #[arg(long, default_value_t = 0)]
    pub seed_base: u64,
    /// Trials per cell.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    /// CSV output; stdout when omitted.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
