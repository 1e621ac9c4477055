use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use reticulate::commands;
use reticulate::{netfile, CliError, Outcome, EXIT_ERROR};
use reticulate_core::{fixtures, AdaptOptions, FluctuationModel, Medium, Network};

#[derive(Parser)]
#[command(name = "reticulate", version, about = "Effective conductance of periodic network media")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Effective tensor, kernel and cycle-lattice classification.
    Analyze {
        path: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        tol_rank: f64,
        /// Skip node insertion at crossings (two-dimensional inputs only).
        #[arg(long)]
        no_planarize: bool,
    },
    /// Node balance against maximality of the effective tensor.
    Stationarity { path: PathBuf },
    /// Window tensors of the periodic extension, as CSV.
    Homogenize {
        path: PathBuf,
        #[arg(long = "R", value_delimiter = ',', required = true)]
        radii: Vec<usize>,
    },
    /// Ball-mass ratios around centers sampled on the support.
    Monotonicity {
        path: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 20)]
        centers: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Profile CSV destination; printed after the report when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Conductance adaptation under fluctuating sources and sinks.
    Adapt {
        path: PathBuf,
        #[arg(long, default_value_t = 100)]
        steps: usize,
        #[arg(long, default_value_t = 8)]
        samples: usize,
        #[arg(long, default_value_t = 0.1)]
        dt: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `random` or `fixed:NODE`.
        #[arg(long, default_value = "random")]
        mode: String,
        #[arg(long, default_value_t = 0)]
        source: usize,
        #[arg(long, default_value_t = 4)]
        patches: usize,
        #[arg(long, default_value_t = 1.0)]
        strength: f64,
        #[arg(long, default_value_t = 1)]
        stride: usize,
        /// Trace CSV destination; printed after the summary when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Writes a trace-one PSD matrix as a mixture of rank-k projections.
    Realize {
        /// Upper triangle, row-major, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        #[arg(long)]
        k: usize,
    },
    /// Effective tensors of the connected components.
    Decompose { path: PathBuf },
    /// Prints a built-in network as a network file.
    Fixture {
        name: FixtureName,
        #[arg(long, value_enum, default_value_t = Mode::Tangential)]
        mode: Mode,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FixtureName {
    SquareGrid,
    Honeycomb,
    SkewedHoneycomb,
    DiagonalLoop,
    OpenSegment,
    TJunction,
    ParallelLoops,
    DiamondChain,
    TriangulatedGrid,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Tangential,
    Isotropic,
}

fn fixture(name: FixtureName) -> Network {
    match name {
        FixtureName::SquareGrid => fixtures::square_grid(1.0),
        FixtureName::Honeycomb => fixtures::honeycomb(1.0),
        FixtureName::SkewedHoneycomb => fixtures::skewed_honeycomb(),
        FixtureName::DiagonalLoop => fixtures::diagonal_loop(1.0),
        FixtureName::OpenSegment => fixtures::open_segment(1.0),
        FixtureName::TJunction => fixtures::t_junction(),
        FixtureName::ParallelLoops => fixtures::parallel_loops(1.0, 2.0),
        FixtureName::DiamondChain => fixtures::diamond_chain(7),
        FixtureName::TriangulatedGrid => fixtures::triangulated_grid(8, 1.0),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Report to stdout, data either to `out` or appended to stdout.
fn with_data(outcome: Outcome, data: String, out: Option<&Path>) -> Result<Outcome, CliError> {
    match out {
        Some(path) => {
            write_file(path, &data)?;
            Ok(outcome)
        }
        None => Ok(Outcome {
            stdout: outcome.stdout + &data,
            code: outcome.code,
        }),
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    reticulate::init_threads()?;
    match cli.command {
        Command::Analyze {
            path,
            tol_rank,
            no_planarize,
        } => commands::analyze(&netfile::read(&path)?, tol_rank, !no_planarize),
        Command::Stationarity { path } => commands::stationarity(&netfile::read(&path)?),
        Command::Homogenize { path, radii } => commands::homogenize(&netfile::read(&path)?, &radii),
        Command::Monotonicity {
            path,
            alpha,
            centers,
            seed,
            out,
        } => {
            let (outcome, csv) = commands::monotonicity(&netfile::read(&path)?, alpha, centers, seed)?;
            with_data(outcome, csv, out.as_deref())
        }
        Command::Adapt {
            path,
            steps,
            samples,
            dt,
            seed,
            mode,
            source,
            patches,
            strength,
            stride,
            out,
        } => {
            let model = FluctuationModel {
                source,
                patch_count: patches,
                patch_strength: strength,
                mode: commands::parse_mode(&mode)?,
                seed,
            };
            let opts = AdaptOptions {
                steps,
                samples_per_step: samples,
                dt,
                trace_stride: stride,
            };
            let (outcome, csv) = commands::adaptation(&netfile::read(&path)?, &model, &opts)?;
            with_data(outcome, csv, out.as_deref())
        }
        Command::Realize { matrix, k } => commands::realize(&commands::parse_matrix(&matrix)?, k),
        Command::Decompose { path } => commands::decompose(&netfile::read(&path)?),
        Command::Fixture { name, mode } => {
            let net = fixture(name);
            let medium = match mode {
                Mode::Tangential => Medium::tangential(net),
                Mode::Isotropic => Medium::isotropic(net),
            };
            Ok(Outcome {
                stdout: netfile::write(&medium),
                code: 0,
            })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(outcome.stdout.as_bytes());
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
