use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod cli;

#[derive(Parser)]
#[command(name = "procmachine", version, about = "Run, measure and compare programs of the process machine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a program and print its visible actions.
    Run(RunArgs),
    /// Print time, space and input size of every output event.
    Report(ReportArgs),
    /// Check "works in time f and space g" over a suite of input scripts.
    Check(CheckArgs),
    /// Compile a machine description to a program.
    Encode(EncodeArgs),
    /// Compare two behaviors (programs, or `.tab` function tables) up to weak bisimilarity.
    Compare(CompareArgs),
    /// Print the explored labelled transition system of a program.
    Explore(ExploreArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Scheduler {
    /// Lowest processor tag first.
    Fifo,
    /// Uniformly random among enabled transitions.
    Random,
}

#[derive(Args)]
struct Exec {
    /// Input script: lines `channel <name>: <word> …`.
    #[arg(long)]
    script: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "fifo")]
    scheduler: Scheduler,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    step_limit: usize,
}

#[derive(Args)]
struct RunArgs {
    program: PathBuf,
    #[command(flatten)]
    exec: Exec,
    /// Ask for each input word on the terminal instead of reading a script.
    #[arg(long, conflicts_with = "script")]
    interactive: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceArg {
    Observed,
    Exact,
}

#[derive(Args)]
struct Space {
    #[arg(long = "space-mode", value_enum, default_value = "observed")]
    mode: SpaceArg,
    /// Largest downset for which exact space is computed; larger ones fall back to observed.
    #[arg(long, env = "PROCM_EXACT_LIMIT", default_value_t = 12)]
    exact_limit: usize,
}

#[derive(Args)]
struct ReportArgs {
    program: PathBuf,
    #[command(flatten)]
    exec: Exec,
    #[command(flatten)]
    space: Space,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CheckArgs {
    program: PathBuf,
    /// Directory of input scripts (`*.in`), run in name order.
    #[arg(long)]
    suite: Option<PathBuf>,
    /// Extra input scripts.
    #[arg(long = "input")]
    inputs: Vec<PathBuf>,
    /// Time bound f(n), e.g. `3*n + 2`.
    #[arg(long)]
    time: String,
    /// Space bound g(n).
    #[arg(long)]
    space: String,
    #[command(flatten)]
    space_opts: Space,
    #[arg(long, value_enum, default_value = "fifo")]
    scheduler: Scheduler,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    step_limit: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Tm,
    Atm,
    Ram,
    Pram,
    Circuit,
    Rtm,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    spec: PathBuf,
    /// Write the program here instead of standard output.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    left: PathBuf,
    right: PathBuf,
    /// Input words offered while exploring programs, comma separated (`""` is ε).
    /// Defaults to the table domain, or ε, 0 and 1.
    #[arg(long, value_delimiter = ',')]
    inputs: Option<Vec<String>>,
    #[arg(long, default_value_t = 10_000)]
    state_limit: usize,
    /// Only explore traces with at most this many visible actions.
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    div_sensitive: bool,
}

#[derive(Args)]
struct ExploreArgs {
    program: PathBuf,
    #[arg(long, value_delimiter = ',')]
    inputs: Option<Vec<String>>,
    #[arg(long, default_value_t = 10_000)]
    state_limit: usize,
    #[arg(long)]
    depth: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run(a) => cli::run(a),
        Command::Report(a) => cli::report(a),
        Command::Check(a) => cli::check(a),
        Command::Encode(a) => cli::encode(a),
        Command::Compare(a) => cli::compare(a),
        Command::Explore(a) => cli::explore(a),
    };
    ExitCode::from(code)
}
