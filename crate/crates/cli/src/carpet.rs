use std::path::PathBuf;
use std::process::ExitCode;

use serde::Serialize;

use permea_core::num::rational_string;
use permea_core::obstacles::{bmc_window_check, min_crossing_variation, BmcCells, CrossingBound, WindowCheck};

use crate::builtins::{load_pattern, Source};
use crate::error::{input, CliError};
use crate::output::{emit, SCHEMA_VERSION};
use crate::path::{parse_levels, Levels};

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Pattern file or builtin name.
    #[arg(long, default_value = "bmc")]
    pub pattern: String,
    /// Check every window of the doubled pattern.
    #[arg(long)]
    pub check_window: bool,
    /// Levels of the crossing-variation bound; `lo..hi` or a comma list.
    #[arg(long, value_parser = parse_levels)]
    pub crossing_level: Option<Levels>,
    /// Levels whose exact measure is reported.
    #[arg(long, default_value = "1..4", value_parser = parse_levels)]
    pub measure_levels: Levels,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct PatternInfo {
    source: Source,
    n: u32,
    m: u32,
    cells: usize,
}

#[derive(Serialize)]
struct Measure {
    level: u32,
    rectangles: String,
    measure: String,
}

#[derive(Serialize)]
struct CarpetReport {
    schema_version: u32,
    command: &'static str,
    pattern: PatternInfo,
    window: Option<WindowCheck>,
    measures: Vec<Measure>,
    crossing: Vec<CrossingBound>,
    warnings: Vec<String>,
}

pub fn run(args: Args) -> Result<ExitCode, CliError> {
    let (source, p) = load_pattern(&args.pattern)?;
    let mut warnings = Vec::new();
    let window = if args.check_window {
        match bmc_window_check(&p) {
            Ok(w) => Some(w),
            Err(e) => {
                warnings.push(format!("window check: {e}"));
                None
            }
        }
    } else {
        None
    };
    let measures = args
        .measure_levels
        .0
        .iter()
        .map(|&l| {
            let c = BmcCells::new(&p, l, 1).map_err(input)?;
            Ok(Measure { level: l, rectangles: c.rectangle_count().to_string(), measure: rational_string(&c.measure()) })
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let crossing = match &args.crossing_level {
        Some(levels) => levels
            .0
            .iter()
            .map(|&l| min_crossing_variation(&p, l).map_err(input))
            .collect::<Result<Vec<_>, _>>()?,
        None => Vec::new(),
    };
    let report = CarpetReport {
        schema_version: SCHEMA_VERSION,
        command: "carpet",
        pattern: PatternInfo { source, n: p.n(), m: p.m(), cells: p.len() },
        window,
        measures,
        crossing,
        warnings,
    };
    emit(args.out.as_deref(), &report)?;
    Ok(ExitCode::SUCCESS)
}
