//! `morrey-lab`: Morrey and block norms, duality checks, Hausdorff content,
//! axiom checks and the example gallery from the command line.
//!
//! Exit codes: 0 when the computation succeeds and every check it runs holds,
//! 1 when a check fails or the solver stops short of its tolerance, 2 on
//! usage or input errors.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use output::Format;

/// Environment variable read when `--threads` is not given.
pub const THREADS_ENV: &str = "MORREY_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "morrey-lab", version, about = "Morrey and block space norms on grids")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads (default: all cores, or the MORREY_LAB_THREADS variable).
    #[arg(long, global = true, env = THREADS_ENV)]
    threads: Option<usize>,

    /// JSON object of flag values; flags on the command line take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args, Serialize)]
struct Exponents {
    #[arg(long)]
    p: f64,
    #[arg(long)]
    q: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Family {
    All,
    Dyadic,
}

impl From<Family> for morrey_core::CubeFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::All => Self::All,
            Family::Dyadic => Self::Dyadic,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Morrey norm of a grid function.
    Norm(NormArgs),
    /// Block norm certificate of a grid function.
    Blocknorm(BlockNormArgs),
    /// Associate norms, the second associate and the duality gap.
    Duality(DualityArgs),
    /// Hausdorff content of a set, optionally with the capacity bound.
    Hausdorff(HausdorffArgs),
    /// Randomized checks of the function-norm axioms.
    Axioms(AxiomArgs),
    /// Block norms along monotone truncations of a function.
    Fatou(FatouArgs),
    /// Tables for the worked examples.
    Gallery(GalleryArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct NormArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pq: Exponents,
    #[arg(long, value_enum, default_value_t = Family::All)]
    family: Family,
}

#[derive(Debug, Args, Serialize)]
pub struct BlockNormArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pq: Exponents,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Family::All)]
    family: Family,
    #[arg(long, default_value_t = 2000)]
    max_rounds: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum DualityCheck {
    Associate,
    SecondAssociate,
    Gap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum OracleChoice {
    Morrey,
    Block,
}

#[derive(Debug, Args, Serialize)]
pub struct DualityArgs {
    #[arg(long, value_enum)]
    check: DualityCheck,
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pq: Exponents,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Norm whose associate is taken.
    #[arg(long, value_enum, default_value_t = OracleChoice::Morrey)]
    oracle: OracleChoice,
    #[arg(long, value_enum, default_value_t = Family::All)]
    family: Family,
}

#[derive(Debug, Args, Serialize)]
pub struct HausdorffArgs {
    /// Interval list `[[a, b], ...]` or a grid cell set.
    #[arg(long)]
    set: PathBuf,
    #[arg(long)]
    d: f64,
    /// Covers use cubes of side below `r` (default: unrestricted).
    #[arg(long)]
    r: Option<f64>,
    /// Compare the dynamic program against enumeration of merge patterns.
    #[arg(long)]
    brute_force: bool,
    /// Function for the capacity bound `int_E |f| <= content * norm`: a grid
    /// function, or a step function `{breakpoints, values}` for interval sets.
    #[arg(long, requires = "p")]
    input: Option<PathBuf>,
    #[arg(long, requires = "q")]
    p: Option<f64>,
    #[arg(long, requires = "p")]
    q: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
pub struct AxiomArgs {
    #[arg(long, value_enum, default_value_t = OracleChoice::Morrey)]
    oracle: OracleChoice,
    #[command(flatten)]
    #[serde(flatten)]
    pq: Exponents,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    dimension: usize,
    #[arg(long, default_value_t = 16)]
    cells: usize,
    #[arg(long, default_value_t = 1.0)]
    cell_side: f64,
    /// Certificate tolerance of the block oracle.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Also tabulate the empirical P5 constants of the example sets with
    /// this many groups.
    #[arg(long)]
    p5_groups: Option<usize>,
}

#[derive(Debug, Args, Serialize)]
pub struct FatouArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pq: Exponents,
    #[arg(long, default_value_t = 8)]
    steps: usize,
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum GalleryKind {
    P5Failure,
    NonDense,
    FunctionalSeq,
    Power,
}

#[derive(Debug, Args, Serialize)]
pub struct GalleryArgs {
    #[arg(value_enum)]
    kind: GalleryKind,
    #[command(flatten)]
    #[serde(flatten)]
    pq: Exponents,
    #[arg(long, default_value_t = 6)]
    groups: usize,
    #[arg(long, default_value_t = 100.0)]
    alpha: f64,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 10)]
    levels: u32,
    /// Step function `{breakpoints, values}` for the functional sequence
    /// (default: the indicator of the example set).
    #[arg(long)]
    input: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = match config::merge(std::env::args().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot set up {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = commands::run(&cli.command, cli.seed);
    match outcome {
        Ok((report, passed)) => {
            if let Err(e) = output::emit(&report, cli.format, cli.out.as_deref()) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
