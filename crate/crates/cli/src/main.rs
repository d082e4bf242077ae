use std::path::PathBuf;
use std::process;

use clap::{Parser, Subcommand, ValueEnum};
use ramify_cli::commands::{self, CompetitorArgs, Format, Globals, Method};
use ramify_cli::format::emit;
use ramify_cli::{CliError, ExitCode};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutArg {
    Json,
    Svg,
    Csv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MethodArg {
    Oracle,
    Local,
}

/// Branched transport toolkit.
#[derive(Debug, Parser)]
#[command(name = "ramify", version)]
struct Cli {
    /// Override the cost exponent of the input.
    #[arg(long, global = true)]
    alpha: Option<f64>,
    /// Override the ambient dimension of the input.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Solver tolerance.
    #[arg(long, global = true, default_value_t = 1e-10)]
    tol: f64,
    /// Seed for every randomized step.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    out: OutArg,
    /// Write here instead of stdout.
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimal traffic path between the marginals of an instance.
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "oracle")]
        method: MethodArg,
        /// Iterations of local search.
        #[arg(long, default_value_t = 200)]
        budget: usize,
    },
    /// Good decomposition of the instance path into weighted curves.
    Decompose { instance: PathBuf },
    /// Flat distance between the paths (or boundaries) of two instances.
    Flatnorm {
        a: PathBuf,
        b: PathBuf,
        /// Grid spacing; 1/64 of the bounding box by default.
        #[arg(long)]
        h: Option<f64>,
    },
    /// Stability trial from an experiment configuration.
    Stability { config: PathBuf },
    /// Competitor construction on a synthetic suboptimal member.
    Competitor {
        instance: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        energy_gap: f64,
        #[arg(long, default_value_t = 1e-8)]
        shift: f64,
        #[arg(long, default_value_t = 1e-24)]
        eps1: f64,
        #[arg(long, default_value_t = 1e-7)]
        eps2: f64,
        #[arg(long, default_value_t = 1e-2)]
        delta: f64,
        #[arg(long, default_value_t = 2.0 * std::f64::consts::PI)]
        sphere_constant: f64,
        #[arg(long)]
        mass_bound: Option<f64>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = Globals {
        alpha: cli.alpha,
        dim: cli.dim,
        tol: cli.tol,
        seed: cli.seed,
        out: match cli.out {
            OutArg::Json => Format::Json,
            OutArg::Svg => Format::Svg,
            OutArg::Csv => Format::Csv,
        },
    };
    let text = match &cli.command {
        Command::Solve { instance, method, budget } => {
            let m = match method {
                MethodArg::Oracle => Method::Oracle,
                MethodArg::Local => Method::Local,
            };
            commands::solve(instance, m, *budget, &g)?
        }
        Command::Decompose { instance } => commands::decompose(instance, &g)?,
        Command::Flatnorm { a, b, h } => commands::flatnorm(a, b, *h, &g)?,
        Command::Stability { config } => commands::stability(config, &g)?,
        Command::Competitor { instance, energy_gap, shift, eps1, eps2, delta, sphere_constant, mass_bound } => {
            let args = CompetitorArgs {
                energy_gap: *energy_gap,
                shift: *shift,
                eps1: *eps1,
                eps2: *eps2,
                delta: *delta,
                sphere_constant: *sphere_constant,
                mass_bound: *mass_bound,
            };
            commands::competitor(instance, &args, &g)?
        }
    };
    emit(cli.output.as_deref(), &text)
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        process::exit(e.exit_code() as i32);
    }
    process::exit(ExitCode::Ok as i32);
}
