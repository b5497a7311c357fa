//! `adsquake`: builds cone surfaces from JSON, runs earthquakes, inversions,
//! diagram and volume checks, and writes JSON reports.
//!
//! Exit codes: 0 when every asserted tolerance is met, 1 on a tolerance
//! failure, 2 on unreadable or invalid input, 3 on an internal error.

mod commands;
mod input;
mod report;
mod selftest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use adsquake::earthquake::Side;

use report::{Failure, Report};

#[derive(Parser)]
#[command(name = "adsquake", version, about = "Earthquakes and AdS holonomy pairs on hyperbolic cone surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    options: Options,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Options {
    /// Override the tolerance asserted by the subcommand.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Quadrature panels for volumes.
    #[arg(long, global = true)]
    pub resolution: Option<usize>,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Refuse multicurves the twist route cannot handle instead of falling back.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Write report.json and any extra files here instead of printing.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Emit the solver iterates as CSV.
    #[arg(long, global = true)]
    pub trace: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SideArg {
    Right,
    Left,
}

#[derive(Subcommand)]
enum Command {
    /// Assemble a surface and report its holonomy, spectrum and area.
    Build { surface: PathBuf },
    /// Earthquake along a weighted multicurve.
    Earthquake {
        surface: PathBuf,
        multicurve: PathBuf,
        #[arg(long, value_enum, default_value = "right")]
        side: SideArg,
    },
    /// Solve for the weights of a right earthquake between two surfaces.
    Invert { problem: PathBuf },
    /// Check the left and right metrics of bending data against earthquakes.
    Diagram { bend: PathBuf },
    /// Holonomy pair from its left and right metrics.
    MessInverse { pair: PathBuf },
    /// Volume of the domain over a boundary component with given bending.
    Volume {
        surface: PathBuf,
        multicurve: PathBuf,
        /// Bending length of the other boundary component, for the total identity.
        #[arg(long)]
        past_length: Option<f64>,
    },
    /// Lengths along a ray of right earthquakes against the linear lower bound.
    Probe {
        surface: PathBuf,
        multicurve: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "1,10,100")]
        scales: Vec<f64>,
    },
    /// Quick acceptance checks on the built-in fixtures.
    Selftest,
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    let o = &cli.options;
    match &cli.command {
        Command::Build { surface } => commands::build(surface, o),
        Command::Earthquake { surface, multicurve, side } => {
            let side = match side {
                SideArg::Right => Side::Right,
                SideArg::Left => Side::Left,
            };
            commands::earthquake(surface, multicurve, side, o)
        }
        Command::Invert { problem } => commands::invert(problem, o),
        Command::Diagram { bend } => commands::diagram(bend, o),
        Command::MessInverse { pair } => commands::mess(pair, o),
        Command::Volume { surface, multicurve, past_length } => commands::volume(surface, multicurve, *past_length, o),
        Command::Probe { surface, multicurve, scales } => commands::probe(surface, multicurve, scales, o),
        Command::Selftest => selftest::run(o),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("QF_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if let Err(e) = report.write(cli.options.out.as_deref()) {
                eprintln!("error: writing report: {e}");
                return ExitCode::from(3);
            }
            if report.passed {
                ExitCode::SUCCESS
            } else {
                eprint!("tolerance failure\n{}", report.table());
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("invalid input: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
