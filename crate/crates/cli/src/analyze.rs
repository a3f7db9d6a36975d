use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use serde::Serialize;

use permea_core::covers::{box_counts, box_dimension, cover_sequence, select_delta_k, BoxCount, DeltaK, DimensionEstimate};
use permea_core::ifs::IfsSystem;
use permea_core::neighbors::{
    epsilon_sweep, intersection_points, neighbor_closure, pairwise_finiteness, ClosureParams, ClosureStatus,
    FinitenessStatus, PairReport, PairVerdict,
};
use permea_core::num::Real;

use crate::builtins::{load_ifs, Source};
use crate::error::{input, CliError, EXIT_INCONCLUSIVE};
use crate::output::{emit, SCHEMA_VERSION};

/// Enclosure radius asked of intersection points.
const H_RADIUS: f64 = 1e-6;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// IFS file or builtin name.
    pub input: String,
    /// ε of the neighbor closure.
    #[arg(long, default_value_t = 0.0)]
    pub eps: f64,
    /// Approximation level of the overlap test.
    #[arg(long, default_value_t = 4)]
    pub level: u32,
    #[arg(long, default_value_t = 5000)]
    pub max_maps: usize,
    /// ε used for δ and k.
    #[arg(long, default_value_t = 0.5)]
    pub cover_eps: f64,
    /// Cover layers built to measure c; 0 skips the cover sequence.
    #[arg(long, default_value_t = 2)]
    pub cover_layers: u32,
    /// Levels of the pairwise screening, as `lo..hi`.
    #[arg(long, default_value = "3..6", value_parser = parse_range)]
    pub pair_levels: (u32, u32),
    /// Box-counting levels, as `lo..hi`.
    #[arg(long, default_value = "1..6", value_parser = parse_range)]
    pub dim_levels: (u32, u32),
    /// Include wall-clock timings; they make the output vary between runs.
    #[arg(long)]
    pub timing: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// `lo..hi` (inclusive) or a single level.
pub fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let bad = || format!("expected lo..hi, got {s:?}");
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range {s:?}"));
    }
    Ok((lo, hi))
}

#[derive(Serialize)]
struct InputInfo {
    source: Source,
    name: Option<String>,
    dim: usize,
    maps: usize,
    r_min: String,
    r_max: String,
    exact: bool,
}

#[derive(Serialize)]
struct FiniteType {
    status: ClosureStatus,
    maps: usize,
    eps: f64,
    level: u32,
    growth: Vec<usize>,
    /// Largest ε found to give the same closure; a heuristic.
    sweep_eps: Option<f64>,
}

#[derive(Serialize)]
struct HPoint {
    center: Vec<f64>,
    radius: f64,
}

#[derive(Serialize)]
struct HReport {
    status: FinitenessStatus,
    depth: u32,
    target_radius: f64,
    points: Vec<HPoint>,
}

#[derive(Serialize)]
struct LayerSummary {
    n: u32,
    added: usize,
    total: usize,
    boundary_length: f64,
    bound: f64,
}

#[derive(Serialize)]
struct Constants {
    #[serde(flatten)]
    delta_k: DeltaK,
    /// Largest `#P_n` over the built layers; null when no cover was built.
    c: Option<usize>,
    c_grows: Option<bool>,
    grid_count: Option<usize>,
    layers: Vec<LayerSummary>,
}

#[derive(Serialize)]
struct Dimension {
    box_counts: Vec<BoxCount>,
    box_dimension: Option<DimensionEstimate>,
}

#[derive(Serialize, Default)]
struct Timing {
    closure_ms: u128,
    pairs_ms: u128,
    points_ms: u128,
    constants_ms: u128,
    dimension_ms: u128,
}

#[derive(Serialize)]
struct AnalysisReport {
    schema_version: u32,
    command: &'static str,
    input: InputInfo,
    finite_type: FiniteType,
    pairs: Vec<PairReport>,
    h: Option<HReport>,
    constants: Option<Constants>,
    dimension: Dimension,
    warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    timing: Option<Timing>,
}

fn real_string(r: &Real) -> String {
    r.to_string()
}

fn constants(
    ifs: &IfsSystem,
    closure: &permea_core::neighbors::NeighborClosure,
    h: &permea_core::neighbors::IntersectionSet,
    args: &Args,
    warnings: &mut Vec<String>,
) -> Option<Constants> {
    let dk = match select_delta_k(ifs, closure, h, args.cover_eps) {
        Ok(dk) => dk,
        Err(e) => {
            warnings.push(format!("delta/k: {e}"));
            return None;
        }
    };
    let mut out = Constants { delta_k: dk, c: None, c_grows: None, grid_count: None, layers: Vec::new() };
    if args.cover_layers == 0 {
        return Some(out);
    }
    match cover_sequence(ifs, h, &out.delta_k, args.cover_layers) {
        Ok(seq) => {
            out.c = Some(seq.c);
            out.c_grows = Some(seq.c_grows);
            out.grid_count = Some(seq.grid_count);
            out.layers = seq
                .layers
                .iter()
                .map(|l| LayerSummary {
                    n: l.n,
                    added: l.added,
                    total: l.total,
                    boundary_length: l.boundary_length,
                    bound: l.bound,
                })
                .collect();
        }
        Err(e) => warnings.push(format!("cover sequence: {e}")),
    }
    Some(out)
}

pub fn run(args: Args) -> Result<ExitCode, CliError> {
    let (source, spec, ifs) = load_ifs(&args.input)?;
    let mut warnings = Vec::new();
    let mut timing = Timing::default();

    let t = Instant::now();
    let closure = neighbor_closure(&ifs, ClosureParams { eps: args.eps, level: args.level, max_maps: args.max_maps })
        .map_err(input)?;
    let sweep_eps = if closure.is_stabilized() {
        epsilon_sweep(&ifs, &closure).map_err(input)?.eps
    } else {
        warnings.push(format!("neighbor closure overflowed at {} maps", args.max_maps));
        None
    };
    timing.closure_ms = t.elapsed().as_millis();

    let t = Instant::now();
    let pairs = pairwise_finiteness(&ifs, args.pair_levels.0..=args.pair_levels.1).map_err(input)?;
    timing.pairs_ms = t.elapsed().as_millis();
    let suspected = pairs.iter().filter(|p| p.verdict == PairVerdict::SuspectedInfinite).count();
    if suspected > 0 {
        warnings.push(format!("{suspected} pairs f_i(K) and f_j(K) look like they meet in infinitely many points"));
    }

    let t = Instant::now();
    let h = if closure.is_stabilized() { Some(intersection_points(&ifs, &closure, H_RADIUS).map_err(input)?) } else { None };
    timing.points_ms = t.elapsed().as_millis();
    if let Some(h) = &h {
        if !h.is_certified_finite() {
            warnings.push(format!("intersection points not certified finite ({})", status_name(h.status)));
        }
    }

    let t = Instant::now();
    let consts = match &h {
        Some(h) if h.is_certified_finite() && ifs.dim().get() == 2 => constants(&ifs, &closure, h, &args, &mut warnings),
        _ => None,
    };
    timing.constants_ms = t.elapsed().as_millis();

    let t = Instant::now();
    let counts = box_counts(&ifs, args.dim_levels.0..=args.dim_levels.1).map_err(input)?;
    let estimate = match box_dimension(&counts) {
        Ok(d) => Some(d),
        Err(e) => {
            warnings.push(format!("box dimension: {e}"));
            None
        }
    };
    timing.dimension_ms = t.elapsed().as_millis();

    let overflow = !closure.is_stabilized();
    let report = AnalysisReport {
        schema_version: SCHEMA_VERSION,
        command: "analyze",
        input: InputInfo {
            source,
            name: spec.name.clone(),
            dim: ifs.dim().get(),
            maps: ifs.len(),
            r_min: real_string(&ifs.r_min()),
            r_max: real_string(&ifs.r_max()),
            exact: ifs.is_exact(),
        },
        finite_type: FiniteType {
            status: closure.status,
            maps: closure.len(),
            eps: closure.eps,
            level: closure.level,
            growth: closure.growth.clone(),
            sweep_eps,
        },
        pairs,
        h: h.map(|h| HReport {
            status: h.status,
            depth: h.depth,
            target_radius: h.target_radius,
            points: h.points.iter().map(|e| HPoint { center: e.center.coords().to_vec(), radius: e.radius }).collect(),
        }),
        constants: consts,
        dimension: Dimension { box_counts: counts, box_dimension: estimate },
        warnings,
        timing: args.timing.then_some(timing),
    };
    emit(args.out.as_deref(), &report)?;
    Ok(if overflow { ExitCode::from(EXIT_INCONCLUSIVE) } else { ExitCode::SUCCESS })
}

fn status_name(s: FinitenessStatus) -> &'static str {
    match s {
        FinitenessStatus::CertifiedFinite => "certified-finite",
        FinitenessStatus::SuspectedInfinite => "suspected-infinite",
        FinitenessStatus::Unknown => "unknown",
    }
}

#[cfg(test)]
mod tests {
    use super::parse_range;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("3..6"), Ok((3, 6)));
        assert_eq!(parse_range("4"), Ok((4, 4)));
        assert!(parse_range("6..3").is_err());
        assert!(parse_range("a..b").is_err());
    }
}
