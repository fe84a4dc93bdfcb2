//! `ddes`: simulate delay difference equations with a leakage delay term and
//! certify their global exponential stability.
//!
//! See `ddes <subcommand> --help` for flags; `ddes example --out DIR` runs
//! the bundled two-channel model end to end and is the quickest tour.

mod commands;
mod csvio;
mod report;
mod seeds;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use csvio::SeriesFormat;

#[derive(Parser)]
#[command(
    name = "ddes",
    version,
    about = "Simulation and stability certificates for delay difference equations \
             with leakage delay",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Data series as CSV; human-readable summaries on stdout
    Csv,
    /// Data series as JSON; `certify` prints its report as JSON
    Json,
}

impl From<Format> for SeriesFormat {
    fn from(f: Format) -> SeriesFormat {
        match f {
            Format::Csv => SeriesFormat::Csv,
            Format::Json => SeriesFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compute a stability certificate and write certificate.json
    Certify {
        /// Model description file (TOML)
        #[arg(long)]
        model: PathBuf,
        /// Directory for output files
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Truncation depth of the direct decay-weighted sum estimate
        #[arg(long, default_value_t = 200)]
        lambda_depth: i64,
    },
    /// Run the model forward and write the trajectory
    Simulate {
        #[arg(long)]
        model: PathBuf,
        /// Number of steps to simulate
        #[arg(long)]
        horizon: i64,
        /// Initial window, one entry per channel: `[SCALE*]FORM` with FORM
        /// in zero|cos|sin|exp|const:V|table:v;v;... (default: all zero)
        #[arg(long)]
        seed: Option<String>,
        /// Read the initial window from a previously written trajectory or
        /// orbit CSV instead
        #[arg(long, value_name = "FILE", conflicts_with = "seed")]
        seed_csv: Option<PathBuf>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Locate a periodic orbit by fixed-point iteration of the period map
    Periodic {
        #[arg(long)]
        model: PathBuf,
        /// Convergence tolerance on the period-map residual
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        /// Iteration cap for the period map
        #[arg(long, default_value_t = 500)]
        max_iters: u32,
        /// Starting window for the iteration (default: all zero)
        #[arg(long)]
        seed: Option<String>,
        /// Start the iteration from a previously written trajectory or
        /// orbit CSV
        #[arg(long, value_name = "FILE", conflicts_with = "seed")]
        seed_csv: Option<PathBuf>,
        /// Search even when the model carries no stability certificate
        #[arg(long)]
        force: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Check the certified decay envelope and partial-sum bounds along
    /// simulated trajectory pairs
    VerifyBounds {
        #[arg(long)]
        model: PathBuf,
        /// Steps to compare each pair over
        #[arg(long, default_value_t = 500)]
        horizon: i64,
        /// Explicit pair of initial windows `SEED@SEED`; repeatable
        #[arg(long = "seed-pair", value_name = "A@B")]
        seed_pair: Vec<String>,
        /// Number of random pairs to add (default: 8 when no --seed-pair
        /// is given, otherwise 0)
        #[arg(long)]
        pairs: Option<u32>,
        /// RNG seed for the random pairs
        #[arg(long, default_value_t = 7)]
        rand_seed: u64,
        /// Run the partial-sum check even without a certificate (skips the
        /// envelope check)
        #[arg(long)]
        force: bool,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Write the bundled two-channel model and exercise it end to end
    Example {
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

fn main() -> ExitCode {
    // Die quietly on a closed pipe (`ddes ... | head`) like other Unix tools
    // instead of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Certify {
            model,
            out,
            format,
            lambda_depth,
        } => commands::cmd_certify(&model, &out, format.into(), lambda_depth),
        Command::Simulate {
            model,
            horizon,
            seed,
            seed_csv,
            out,
            format,
        } => commands::cmd_simulate(
            &model,
            horizon,
            seed.as_deref(),
            seed_csv.as_deref(),
            &out,
            format.into(),
        ),
        Command::Periodic {
            model,
            tol,
            max_iters,
            seed,
            seed_csv,
            force,
            out,
            format,
        } => commands::cmd_periodic(
            &model,
            tol,
            max_iters,
            seed.as_deref(),
            seed_csv.as_deref(),
            force,
            &out,
            format.into(),
        ),
        Command::VerifyBounds {
            model,
            horizon,
            seed_pair,
            pairs,
            rand_seed,
            force,
            out,
            format,
        } => commands::cmd_verify_bounds(
            &model,
            horizon,
            &seed_pair,
            pairs,
            rand_seed,
            force,
            &out,
            format.into(),
        ),
        Command::Example { out, format } => commands::cmd_example(&out, format.into()),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
