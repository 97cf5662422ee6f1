mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ssys_core::dynamics::Method;

use config::ConfigError;

/// Stability, center and limit-cycle analysis of planar S-systems.
#[derive(Parser, Debug)]
#[command(name = "ssys", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Full classification report (report.json).
    Classify(Common),
    /// Nullclines, seed-grid trajectories and an SVG overlay.
    Portrait(Common),
    /// Return map on a section over a sweep of section coordinates.
    Poincare(Common),
    /// Two-stage perturbation search for two nested limit cycles.
    BautinDemo(Common),
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Flat TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    max_time: Option<f64>,
    /// Section ray angle in radians.
    #[arg(long, allow_hyphen_values = true)]
    section: Option<f64>,
    #[arg(long, value_parser = parse_method)]
    method: Option<Method>,
}

fn parse_method(s: &str) -> Result<Method, String> {
    match s {
        "dormand_prince" | "dp5" => Ok(Method::DormandPrince),
        "rosenbrock" => Ok(Method::Rosenbrock),
        _ => Err(format!("unknown method `{s}` (dormand_prince, rosenbrock)")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = match &cli.command {
        Command::Classify(c) => commands::classify(c),
        Command::Portrait(c) => commands::portrait(c),
        Command::Poincare(c) => commands::poincare(c),
        Command::BautinDemo(c) => commands::bautin_demo(c),
    };
    match run {
        Ok(written) => {
            for p in written {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) if e.downcast_ref::<ConfigError>().is_some() => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
