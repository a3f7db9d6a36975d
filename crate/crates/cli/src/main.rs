//! `permea`: finite type analysis, witness paths, carpet checks and SVG scenes.

mod analyze;
mod builtins;
mod carpet;
mod error;
mod output;
mod path;
mod render;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use error::CliError;

#[derive(Parser)]
#[command(name = "permea", version, about = "Permeability analysis for self-similar and planar obstacle sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Finite type closure, intersection points, cover constants and box dimension of an IFS.
    Analyze(analyze::Args),
    /// Witness paths between two points across obstacle levels.
    Path(path::Args),
    /// Window check, measures and crossing bounds of a Bedford-McMullen pattern.
    Carpet(carpet::Args),
    /// SVG scene from a render spec, a path report or a builtin scene.
    Render(render::Args),
}

/// Where a command's JSON goes.
#[derive(clap::Args, Clone, Debug)]
pub struct OutArgs {
    /// Write JSON here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("PERMEA_THREADS") else { return Ok(()) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Input(format!("PERMEA_THREADS = {v:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Input(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    init_threads()?;
    match cli.command {
        Command::Analyze(a) => analyze::run(a),
        Command::Path(a) => path::run(a),
        Command::Carpet(a) => carpet::run(a),
        Command::Render(a) => render::run(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("permea: {e}");
            e.exit_code()
        }
    }
}
