//! `cmpg`: generate attack games, solve them, and cross-check the results.
//!
//! Exit codes: 0 converged (or success), 2 stalled, 3 iteration limit,
//! 64 usage, 65 malformed data, 66 unreadable input, 1 anything else.

mod experiment;
mod report;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::anyhow;
use clap::{Args, Parser, Subcommand, ValueEnum};

use cmpg::io::{game_from_json, game_to_json, strategy_from_json, strategy_to_json, ReportFile};
use cmpg::models::{
    gen_block_withholding, gen_double_spend, gen_proof_of_stake, gen_rps, BlockWithholdingParams, DoubleSpendParams,
    ProofOfStakeParams,
};
use cmpg::{simulate_profile, solve, Game, Options, Player, SimulationConfig, Termination};

const EX_USAGE: u8 = 64;
const EX_DATAERR: u8 = 65;
const EX_NOINPUT: u8 = 66;
const THREADS_VAR: &str = "CMPG_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    /// Block withholding between two mining pools
    Bw,
    /// Zero-confirmation double spending
    Ds,
    /// Proof-of-stake signing attack
    Pos,
    /// Repeated rock-paper-scissors with network noise
    Rps,
}

#[derive(Parser)]
#[command(name = "cmpg", version, about = "Ergodic concurrent mean-payoff games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write one of the built-in games as JSON
    Generate(GenerateArgs),
    /// Bracket the value of a game file
    Solve(SolveArgs),
    /// Monte-Carlo estimate of a strategy profile's mean payoff
    Simulate(SimulateArgs),
    /// Solve a model at several sizes and tabulate the runs
    Experiment(ExperimentArgs),
    /// Check a game file for structural problems
    Validate { game: PathBuf },
}

#[derive(Args)]
struct GenerateArgs {
    model: Model,
    /// Grid size (bw, pos) or number of network states besides the shuffle state (ds)
    #[arg(long)]
    n: Option<usize>,
    /// ds only: total state count, overrides --n
    #[arg(long, conflicts_with = "n")]
    states: Option<usize>,
    /// pos only: connectivity grid spacing
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    /// rps only: probability that a round is decided by the network
    #[arg(long, default_value_t = 0.1)]
    noise: f64,
    /// rps only: pay −1 for laps won by player 2
    #[arg(long)]
    symmetric: bool,
    /// Output file; stdout if omitted
    #[arg(long, short)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    game: PathBuf,
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// State whose potential is pinned to zero
    #[arg(long, default_value_t = 0)]
    target: usize,
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    /// Start from seeded random strategies instead of uniform ones
    #[arg(long)]
    seed: Option<u64>,
    /// Print the report as JSON
    #[arg(long)]
    json: bool,
    /// Skip the ergodicity check
    #[arg(long)]
    assume_ergodic: bool,
    /// Also write PREFIX.p1.json and PREFIX.p2.json
    #[arg(long, value_name = "PREFIX")]
    save_strategies: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    game: PathBuf,
    /// Player 1 strategy file (uniform if omitted)
    #[arg(long)]
    p1: Option<PathBuf>,
    /// Player 2 strategy file (uniform if omitted)
    #[arg(long)]
    p2: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    steps: u64,
    #[arg(long, default_value_t = 32)]
    batches: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    start: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ExperimentArgs {
    model: Model,
    /// Sizes: grid size for bw and pos, total states for ds. Accepts
    /// lists and ranges, e.g. `10,14` or `100..900:100`.
    #[arg(long = "n", alias = "sizes", value_name = "SIZES")]
    sizes: String,
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    /// pos only: connectivity grid spacing
    #[arg(long, default_value_t = 0.1)]
    step: f64,
    /// Also write the rows as CSV
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Run rows concurrently
    #[arg(long)]
    parallel: bool,
}

struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn usage(msg: impl Into<String>) -> Self {
        Failure {
            code: EX_USAGE,
            error: anyhow!(msg.into()),
        }
    }
}

impl From<cmpg::Error> for Failure {
    fn from(e: cmpg::Error) -> Self {
        let code = match e {
            cmpg::Error::Format(_) | cmpg::Error::Json(_) | cmpg::Error::Dimension(_) => EX_DATAERR,
            cmpg::Error::Io(_) => EX_NOINPUT,
            _ => 1,
        };
        Failure { code, error: e.into() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: 1,
            error: e.into(),
        }
    }
}

type CmdResult = Result<u8, Failure>;

fn read_input(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure {
        code: EX_NOINPUT,
        error: anyhow!("cannot read {}: {e}", path.display()),
    })
}

fn load_game(path: &Path) -> Result<Game, Failure> {
    let text = read_input(path)?;
    game_from_json(&text).map_err(|e| Failure {
        code: EX_DATAERR,
        error: anyhow!("{}: {e}", path.display()),
    })
}

/// Writes to stdout; a closed pipe (`cmpg solve … | head`) is not an error.
fn emit(text: &str) -> Result<(), Failure> {
    match std::io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

macro_rules! out {
    ($($t:tt)*) => { emit(&format!($($t)*)) };
}

macro_rules! outln {
    ($($t:tt)*) => { emit(&format!("{}\n", format_args!($($t)*))) };
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => {
            emit(text)?;
            emit("\n")?;
        }
    }
    Ok(())
}

fn generate(args: GenerateArgs) -> CmdResult {
    let invalid = |e: cmpg::Error| Failure::usage(e.to_string());
    let game: Game = match args.model {
        Model::Bw => gen_block_withholding(&BlockWithholdingParams::new(args.n.unwrap_or(10)).map_err(invalid)?),
        Model::Ds => {
            let params = match args.states {
                Some(k) => DoubleSpendParams::with_states(k),
                None => DoubleSpendParams::new(args.n.unwrap_or(100)),
            };
            gen_double_spend(&params.map_err(invalid)?)
        }
        Model::Pos => {
            gen_proof_of_stake(&ProofOfStakeParams::with_step(args.n.unwrap_or(3), args.step).map_err(invalid)?)
        }
        Model::Rps => gen_rps(args.noise, args.symmetric),
    }
    .map_err(invalid)?;
    write_output(args.out.as_deref(), &game_to_json(&game))?;
    let summary = format!("states: {}\ntransitions: {}", game.n_states(), game.transition_count());
    if args.out.is_some() {
        outln!("{summary}")?;
    } else {
        eprintln!("{summary}");
    }
    Ok(0)
}

fn solve_cmd(args: SolveArgs) -> CmdResult {
    if args.epsilon.is_nan() || args.epsilon <= 0.0 {
        return Err(Failure::usage("--epsilon must be positive"));
    }
    let game = load_game(&args.game)?;
    let options = Options {
        epsilon: args.epsilon,
        target: args.target,
        max_iters: args.max_iters,
        assume_ergodic: args.assume_ergodic,
        seed: args.seed,
        ..Options::default()
    };
    let report = solve(&game, &options)?;
    if args.json {
        let doc = serde_json::to_string_pretty(&ReportFile::from_report(&game, &report)).map_err(|e| Failure {
            code: 1,
            error: e.into(),
        })?;
        outln!("{doc}")?;
    } else {
        out!("{}", report::render_solve(&game, &report))?;
    }
    eprintln!("time: {:.3}s", report.wall_time.as_secs_f64());
    if let Some(prefix) = args.save_strategies {
        for (tag, strat) in [("p1", &report.strategy_p1), ("p2", &report.strategy_p2)] {
            let mut path = prefix.clone().into_os_string();
            path.push(format!(".{tag}.json"));
            fs::write(PathBuf::from(path), strategy_to_json(&game, strat))?;
        }
    }
    Ok(match report.termination {
        Termination::Converged => 0,
        Termination::Stalled => 2,
        Termination::MaxIters => 3,
    })
}

fn simulate_cmd(args: SimulateArgs) -> CmdResult {
    let game = load_game(&args.game)?;
    let load = |path: &Option<PathBuf>, player: Player| -> Result<_, Failure> {
        let strat = match path {
            None => game.uniform_strategy(player),
            Some(p) => strategy_from_json(&game, &read_input(p)?).map_err(|e| Failure {
                code: EX_DATAERR,
                error: anyhow!("{}: {e}", p.display()),
            })?,
        };
        if strat.owner() != player {
            return Err(Failure {
                code: EX_DATAERR,
                error: anyhow!(
                    "strategy file for --{} belongs to {}",
                    if player == Player::One { "p1" } else { "p2" },
                    strat.owner()
                ),
            });
        }
        Ok(strat)
    };
    let s1 = load(&args.p1, Player::One)?;
    let s2 = load(&args.p2, Player::Two)?;
    if args.steps == 0 || args.batches < 2 {
        return Err(Failure::usage("need --steps ≥ 1 and --batches ≥ 2"));
    }
    if args.start >= game.n_states() {
        return Err(Failure::usage(format!("--start {} out of range", args.start)));
    }
    let config = SimulationConfig {
        start: args.start,
        steps: args.steps,
        batches: args.batches,
        seed: args.seed,
    };
    let res = simulate_profile(&game, &s1, &s2, &config)?;
    if args.json {
        outln!(
            "{}",
            serde_json::to_string_pretty(&res).map_err(|e| Failure {
                code: 1,
                error: e.into()
            })?
        )?;
    } else {
        out!("{}", report::render_simulation(&res))?;
    }
    Ok(0)
}

fn experiment_cmd(args: ExperimentArgs) -> CmdResult {
    if args.model == Model::Rps {
        return Err(Failure::usage("experiment supports bw, ds and pos"));
    }
    if args.epsilon.is_nan() || args.epsilon <= 0.0 {
        return Err(Failure::usage("--epsilon must be positive"));
    }
    let sizes = experiment::parse_sizes(&args.sizes).map_err(Failure::usage)?;
    let options = Options {
        epsilon: args.epsilon,
        max_iters: args.max_iters,
        ..Options::default()
    };
    let rows = experiment::run(args.model, &sizes, args.step, &options, args.parallel);
    out!("{}", experiment::render_table(&rows))?;
    if let Some(path) = args.csv {
        let file = fs::File::create(&path)?;
        experiment::write_csv(&rows, file).map_err(|e| Failure {
            code: 1,
            error: e.into(),
        })?;
    }
    Ok(0)
}

fn validate_cmd(path: &Path) -> CmdResult {
    let game = load_game(path)?;
    outln!(
        "ok: {} states, {} transitions",
        game.n_states(),
        game.transition_count()
    )?;
    outln!(
        "ergodicity check: {}",
        if game.ergodic_sufficient() {
            "passed"
        } else {
            "not established"
        }
    )?;
    Ok(0)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Failure::usage(format!("{THREADS_VAR} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure {
            code: 1,
            error: e.into(),
        })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EX_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Simulate(a) => simulate_cmd(a),
        Command::Experiment(a) => experiment_cmd(a),
        Command::Validate { game } => validate_cmd(&game),
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
