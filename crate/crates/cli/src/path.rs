use std::path::PathBuf;
use std::process::ExitCode;

use rayon::prelude::*;
use serde::Serialize;

use permea_core::covers::{cover_sequence, select_delta_k, surrounding_loop, LoopResult};
use permea_core::geom::{rasterize_box, Cell, CellOracle, CellSet, Dim, Norm, Point, Resolution};
use permea_core::ifs::{approximate, IfsSystem};
use permea_core::neighbors::{intersection_points, neighbor_closure, ClosureParams, IntersectionSet, NeighborClosure};
use permea_core::num::{Rational, Real};
use permea_core::obstacles::{cantor_level, svc_level, theta_squares, BmcCells, BmcPattern, IntervalSet};
use permea_core::permeability::{
    finite_type_witness_2d, witness_path, FiniteTypeWitness, LevelEntry, LevelOutcome, PermeabilityError,
    ProfileSeries, WitnessOptions,
};

use crate::builtins::{self, Source};
use crate::error::{input, CliError, EXIT_NO_PATH};
use crate::output::{emit, SCHEMA_VERSION};
use crate::svg::{cell_runs, render, Layer, RenderSpec, Style, Viewport};

/// Largest `lcm(n^l, m^l)` for which carpet cells align with the grid.
const ALIGNED_GRID_LIMIT: u64 = 8192;
/// Rectangles drawn for the obstacle layer of an SVG.
const SVG_RECT_LIMIT: usize = 400_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Finite-type construction for planar IFS obstacles that admit it, grid search otherwise.
    Auto,
    Grid,
    FiniteType,
}

#[derive(clap::Args, Debug)]
#[command(allow_negative_numbers = true)]
pub struct Args {
    /// IFS or pattern file, or a builtin: an IFS or pattern name, `cantor`, `svc` or `theta-squares`.
    /// Carpet patterns are stacked twice, filling [0,1] x [0,2].
    pub obstacle: String,
    /// Start point `x,y`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub from: [f64; 2],
    /// End point `x,y`.
    #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
    pub to: [f64; 2],
    /// Corridor half-width and excess tolerance.
    #[arg(long)]
    pub delta: f64,
    /// `lo..hi` or a comma list, increasing.
    #[arg(long, default_value = "3..6", value_parser = parse_levels)]
    pub levels: Levels,
    /// `euclidean`, `l1`, `linf` or `p=<p>`.
    #[arg(long, default_value = "euclidean", value_parser = parse_norm)]
    pub norm: Norm,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    pub method: Method,
    /// Obstacle cells a grid path may cross in one run.
    #[arg(long, default_value_t = 2)]
    pub crossing: u32,
    /// Also write an SVG of the obstacle at the last level and every path.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct Levels(pub Vec<u32>);

pub fn parse_levels(s: &str) -> Result<Levels, String> {
    let v: Vec<u32> = if let Some((a, b)) = s.split_once("..") {
        let (lo, hi) = crate::analyze::parse_range(&format!("{a}..{b}"))?;
        (lo..=hi).collect()
    } else {
        s.split(',').map(|t| t.trim().parse().map_err(|_| format!("bad level {t:?}"))).collect::<Result<_, _>>()?
    };
    if v.is_empty() || v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(format!("levels {s:?} must be non-empty and increasing"));
    }
    if v.iter().any(|l| *l > 30) {
        return Err("levels above 30 are not supported".into());
    }
    Ok(Levels(v))
}

pub fn parse_point(s: &str) -> Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected x,y, got {s:?}"));
    }
    let mut out = [0.0; 2];
    for (k, p) in parts.iter().enumerate() {
        out[k] = p.parse::<Real>().map_err(|e| e.to_string())?.to_f64();
    }
    Ok(out)
}

pub fn parse_norm(s: &str) -> Result<Norm, String> {
    match s {
        "euclidean" | "l2" => Ok(Norm::Euclidean),
        "l1" | "taxicab" => Ok(Norm::taxicab()),
        "linf" | "sup" => Ok(Norm::sup()),
        _ => {
            let p = s.strip_prefix("p=").ok_or_else(|| format!("unknown norm {s:?}"))?;
            let p: f64 = p.parse().map_err(|_| format!("bad exponent in {s:?}"))?;
            Norm::p(p).map_err(|e| e.to_string())
        }
    }
}

enum Kind {
    Ifs(IfsSystem),
    Cantor,
    Svc,
    Theta,
    Carpet(BmcPattern),
}

struct Obstacle {
    source: Source,
    kind: Kind,
}

impl Obstacle {
    fn load(arg: &str) -> Result<Obstacle, CliError> {
        let builtin = |k| Ok(Obstacle { source: Source::Builtin(arg.into()), kind: k });
        match arg {
            "cantor" => return builtin(Kind::Cantor),
            "svc" => return builtin(Kind::Svc),
            "theta-squares" => return builtin(Kind::Theta),
            _ => {}
        }
        if std::path::Path::new(arg).is_file() {
            let text = std::fs::read_to_string(arg).map_err(|e| CliError::Input(format!("{arg}: {e}")))?;
            let source = Source::File(arg.into());
            if builtins::is_pattern_file(&text) {
                let p = BmcPattern::from_json(&text).map_err(|e| CliError::Input(format!("{arg}: {e}")))?;
                return Ok(Obstacle { source, kind: Kind::Carpet(p) });
            }
            let (_, ifs) = builtins::parse_ifs(&text, arg)?;
            return Ok(Obstacle { source, kind: Kind::Ifs(ifs) });
        }
        if builtins::PATTERNS.iter().any(|(n, _)| *n == arg) {
            let (source, p) = builtins::load_pattern(arg)?;
            return Ok(Obstacle { source, kind: Kind::Carpet(p) });
        }
        let (source, _, ifs) = builtins::load_ifs(arg)?;
        Ok(Obstacle { source, kind: Kind::Ifs(ifs) })
    }

    fn kind_name(&self) -> &'static str {
        match self.kind {
            Kind::Ifs(_) => "ifs",
            Kind::Cantor => "cantor",
            Kind::Svc => "svc",
            Kind::Theta => "theta-squares",
            Kind::Carpet(_) => "carpet",
        }
    }

    fn level(&self, level: u32) -> Result<LevelCells, CliError> {
        let product = |set: IntervalSet, res: Resolution, name: String| -> Result<LevelCells, CliError> {
            let mut cells = Vec::new();
            for (a, b) in &set.intervals {
                for (c, d) in &set.intervals {
                    cells.extend(rasterize_box(Dim::TWO, res, &[*a, *c], &[*b, *d]).map_err(input)?);
                }
            }
            Ok(LevelCells::Set(CellSet::from_cells(Dim::TWO, res, name, cells), None))
        };
        match &self.kind {
            Kind::Ifs(ifs) => {
                if ifs.dim() != Dim::TWO {
                    return Err(CliError::Input(format!("path obstacles are planar; this IFS has dimension {}", ifs.dim().get())));
                }
                let rho = ifs.level_rho(level);
                let res = Resolution::dyadic_at_most(rho.to_f64() * ifs.diameter_bound() / 16.0);
                Ok(LevelCells::Set(approximate(ifs, &rho, res).map_err(input)?, None))
            }
            Kind::Cantor => {
                let res = Resolution::dyadic_at_most(3f64.powi(-(level as i32)) / 4.0);
                product(cantor_level(level).map_err(input)?, res, format!("cantor dust level {level}"))
            }
            Kind::Svc => product(svc_level(level).map_err(input)?, Resolution::dyadic(2 * level + 2), format!("svc square level {level}")),
            Kind::Theta => {
                let t = theta_squares(level, Resolution::dyadic(2 * level + 2)).map_err(input)?;
                Ok(LevelCells::Set(t.cells, t.warning))
            }
            Kind::Carpet(p) => {
                let cells = BmcCells::new(p, level, 2).map_err(input)?;
                let (n, m) = ((p.n() as u64).pow(level), (p.m() as u64).pow(level));
                let l = num_integer::lcm(n, m);
                let cols = if l <= ALIGNED_GRID_LIMIT { l } else { n.max(m) };
                let res = Resolution::new(Rational::new(1, 2 * cols as i128)).map_err(input)?;
                Ok(LevelCells::Carpet(cells, res))
            }
        }
    }
}

enum LevelCells {
    Set(CellSet, Option<String>),
    Carpet(BmcCells, Resolution),
}

impl LevelCells {
    fn with_oracle<T>(&self, f: impl FnOnce(&dyn CellOracle) -> T) -> T {
        match self {
            LevelCells::Set(s, _) => f(s),
            LevelCells::Carpet(c, res) => f(&c.oracle(*res)),
        }
    }

    fn count(&self) -> Option<usize> {
        match self {
            LevelCells::Set(s, _) => Some(s.len()),
            LevelCells::Carpet(..) => None,
        }
    }

    fn rects(&self) -> Result<Vec<[[f64; 2]; 2]>, String> {
        match self {
            LevelCells::Set(s, _) => {
                let side = s.resolution().side_f64();
                let runs = cell_runs(s.iter().map(|c: &Cell| (c.0[0], c.0[1])).collect(), side);
                if runs.len() > SVG_RECT_LIMIT {
                    return Err(format!("{} cell runs exceed the drawing limit", runs.len()));
                }
                Ok(runs)
            }
            LevelCells::Carpet(c, _) => {
                if c.rectangle_count() > SVG_RECT_LIMIT as u128 {
                    return Err(format!("{} rectangles exceed the drawing limit", c.rectangle_count()));
                }
                let f = |q: &Rational| permea_core::num::to_f64(q);
                Ok(c.rectangles()
                    .map_err(|e| e.to_string())?
                    .iter()
                    .map(|(lo, hi)| [[f(&lo[0]), f(&lo[1])], [f(&hi[0]), f(&hi[1])]])
                    .collect())
            }
        }
    }
}

/// Everything `finite_type_witness_2d` needs besides the cells.
struct FiniteTypeSetup {
    ifs: IfsSystem,
    closure: NeighborClosure,
    h: IntersectionSet,
    alpha: LoopResult,
}

fn finite_type_setup(ifs: &IfsSystem) -> Result<FiniteTypeSetup, String> {
    let s = |e: &dyn std::fmt::Display| e.to_string();
    if ifs.dim() != Dim::TWO {
        return Err("not planar".into());
    }
    let closure = neighbor_closure(ifs, ClosureParams { eps: 0.0, level: 4, max_maps: 5000 }).map_err(|e| s(&e))?;
    if !closure.is_stabilized() {
        return Err("neighbor closure overflowed".into());
    }
    let h = intersection_points(ifs, &closure, 1e-6).map_err(|e| s(&e))?;
    let dk = select_delta_k(ifs, &closure, &h, 0.5).map_err(|e| s(&e))?;
    let seq = cover_sequence(ifs, &h, &dk, 2).map_err(|e| s(&e))?;
    let alpha = surrounding_loop(&seq, 2).map_err(|e| s(&e))?;
    Ok(FiniteTypeSetup { ifs: ifs.clone(), closure, h, alpha })
}

#[derive(Serialize)]
struct FiniteTypeExtra {
    line_offset: f64,
    line_measure: f64,
    budget: f64,
    admissible: bool,
    scale: f64,
    pieces: usize,
    disks: usize,
    component_bound: usize,
    within_bound: bool,
}

impl From<&FiniteTypeWitness> for FiniteTypeExtra {
    fn from(w: &FiniteTypeWitness) -> Self {
        FiniteTypeExtra {
            line_offset: w.line_offset,
            line_measure: w.line_measure,
            budget: w.budget,
            admissible: w.admissible,
            scale: w.scale,
            pieces: w.pieces.len(),
            disks: w.disks.len(),
            component_bound: w.component_bound,
            within_bound: w.within_bound,
        }
    }
}

#[derive(Serialize)]
struct PathLevel {
    #[serde(flatten)]
    entry: LevelEntry,
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    finite_type: Option<FiniteTypeExtra>,
}

#[derive(Serialize)]
struct ObstacleInfo {
    source: Source,
    kind: &'static str,
}

#[derive(Serialize)]
struct PathReport {
    schema_version: u32,
    command: &'static str,
    obstacle: ObstacleInfo,
    method: Method,
    norm: String,
    from: [f64; 2],
    to: [f64; 2],
    delta: f64,
    crossing: u32,
    levels: Vec<PathLevel>,
    all_blocked: bool,
    warnings: Vec<String>,
}

fn outcome(r: Result<permea_core::permeability::WitnessReport, PermeabilityError>) -> Result<LevelOutcome, CliError> {
    match r {
        Ok(rep) => Ok(LevelOutcome::Found(rep)),
        Err(e @ (PermeabilityError::NoPath(_) | PermeabilityError::NotFound { .. })) => {
            Ok(LevelOutcome::NoPath { reason: e.to_string() })
        }
        Err(PermeabilityError::TooLarge(n)) => {
            Err(CliError::Inconclusive(format!("search grid would need {n} cells; use lower levels")))
        }
        Err(e) => Err(input(e)),
    }
}

fn solve(
    args: &Args,
    setup: Option<&FiniteTypeSetup>,
    level: u32,
    cells: &LevelCells,
) -> Result<PathLevel, CliError> {
    let (x, y) = (Point::xy(args.from[0], args.from[1]), Point::xy(args.to[0], args.to[1]));
    let entry = |outcome| LevelEntry { level, obstacle_cells: cells.count(), outcome };
    if let Some(ft) = setup.filter(|_| x != y) {
        let res = cells.with_oracle(|o| {
            finite_type_witness_2d(&ft.ifs, &ft.closure, &ft.h, &ft.alpha, o, &x, &y, args.delta)
        });
        match res {
            Ok(mut w) => {
                w.report.level = Some(level);
                let extra = FiniteTypeExtra::from(&w);
                return Ok(PathLevel { entry: entry(LevelOutcome::Found(w.report)), method: "finite-type", finite_type: Some(extra) });
            }
            Err(e @ PermeabilityError::NoAdmissibleLine { .. }) if args.method == Method::FiniteType => {
                return Ok(PathLevel {
                    entry: entry(LevelOutcome::NoPath { reason: e.to_string() }),
                    method: "finite-type",
                    finite_type: None,
                });
            }
            Err(e) if args.method == Method::FiniteType => return Err(input(e)),
            Err(_) => {}
        }
    }
    let opts = WitnessOptions { crossing_cells: args.crossing, level: Some(level) };
    let r = cells.with_oracle(|o| witness_path(o, &x, &y, args.delta, &args.norm, &opts));
    Ok(PathLevel { entry: entry(outcome(r)?), method: "grid", finite_type: None })
}

fn scene(levels: &[PathLevel], cells: Option<&LevelCells>, args: &Args, warnings: &mut Vec<String>) -> RenderSpec {
    let mut layers = Vec::new();
    if let Some(c) = cells {
        match c.rects() {
            Ok(rects) => layers.push(Layer::Cells { rects, style: Style::filled("#555555") }),
            Err(e) => warnings.push(format!("svg: obstacle layer left out: {e}")),
        }
    }
    let palette = ["#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];
    for (k, l) in levels.iter().enumerate() {
        if let LevelOutcome::Found(r) = &l.entry.outcome {
            layers.push(Layer::Path { points: r.vertices.clone(), style: Style::stroked(palette[k % palette.len()], 1.5) });
        }
    }
    layers.push(Layer::Points { points: vec![args.from, args.to], radius: 3.0, style: Style::filled("black") });
    let mut pts: Vec<[f64; 2]> = Vec::new();
    for layer in &layers {
        match layer {
            Layer::Cells { rects, .. } => pts.extend(rects.iter().flatten().copied()),
            Layer::Path { points, .. } | Layer::Points { points, .. } => pts.extend(points.iter().copied()),
            _ => {}
        }
    }
    let mut vp = Viewport::around(&pts, 0.0).expect("endpoints are present");
    let pad = 0.05 * (vp.max[0] - vp.min[0]).max(vp.max[1] - vp.min[1]).max(args.delta);
    vp = Viewport { min: [vp.min[0] - pad, vp.min[1] - pad], max: [vp.max[0] + pad, vp.max[1] + pad] };
    let aspect = (vp.max[1] - vp.min[1]) / (vp.max[0] - vp.min[0]);
    let width = 800.0;
    RenderSpec { viewport: vp, width, height: (width * aspect).clamp(50.0, 4000.0), layers }
}

pub fn run(args: Args) -> Result<ExitCode, CliError> {
    if !(args.delta > 0.0) || !args.delta.is_finite() {
        return Err(CliError::Input(format!("--delta {} must be positive", args.delta)));
    }
    if !args.from.iter().chain(&args.to).all(|c| c.is_finite()) {
        return Err(CliError::Input("endpoints must be finite".into()));
    }
    let obstacle = Obstacle::load(&args.obstacle)?;
    let mut warnings = Vec::new();
    let setup = match (&obstacle.kind, args.method) {
        (_, Method::Grid) => None,
        (Kind::Ifs(ifs), m) => {
            let norm_ok = args.norm == Norm::Euclidean;
            match finite_type_setup(ifs) {
                Ok(s) if norm_ok => Some(s),
                Ok(_) if m == Method::FiniteType => {
                    return Err(CliError::Input("the finite-type method measures Euclidean length only".into()))
                }
                Ok(_) => None,
                Err(e) if m == Method::FiniteType => return Err(CliError::Input(format!("finite-type method unavailable: {e}"))),
                Err(e) => {
                    warnings.push(format!("finite-type method unavailable ({e}); using grid search"));
                    None
                }
            }
        }
        (_, Method::FiniteType) => {
            return Err(CliError::Input("the finite-type method needs a planar IFS obstacle".into()))
        }
        (_, Method::Auto) => None,
    };

    let levels = &args.levels.0;
    let solved: Vec<Result<(PathLevel, LevelCells), CliError>> = levels
        .par_iter()
        .map(|&level| {
            let cells = obstacle.level(level)?;
            let pl = solve(&args, setup.as_ref(), level, &cells)?;
            Ok((pl, cells))
        })
        .collect();
    let mut series = ProfileSeries::new(args.from, args.to, args.delta);
    let mut out_levels = Vec::new();
    let mut last_cells = None;
    for r in solved {
        let (pl, cells) = r?;
        if let LevelCells::Set(_, Some(w)) = &cells {
            warnings.push(format!("level {}: {w}", pl.entry.level));
        }
        if let Some(rep) = match &pl.entry.outcome {
            LevelOutcome::Found(rep) => Some(rep),
            _ => None,
        } {
            if rep.endpoint_adjusted {
                warnings.push(format!("level {}: an endpoint lies in an obstacle cell; the search started next to it", pl.entry.level));
            }
        }
        series.push(pl.entry.clone()).map_err(input)?;
        out_levels.push(pl);
        last_cells = Some(cells);
    }
    if let Some(svg_path) = &args.svg {
        let spec = scene(&out_levels, last_cells.as_ref(), &args, &mut warnings);
        crate::output::write_text(Some(svg_path), &render(&spec)?)?;
    }
    let report = PathReport {
        schema_version: SCHEMA_VERSION,
        command: "path",
        obstacle: ObstacleInfo { source: obstacle.source.clone(), kind: obstacle.kind_name() },
        method: args.method,
        norm: args.norm.name(),
        from: args.from,
        to: args.to,
        delta: args.delta,
        crossing: args.crossing,
        all_blocked: series.all_blocked(),
        levels: out_levels,
        warnings,
    };
    emit(args.out.as_deref(), &report)?;
    Ok(if report.all_blocked { ExitCode::from(EXIT_NO_PATH) } else { ExitCode::SUCCESS })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_lists() {
        assert_eq!(parse_levels("3..5").unwrap().0, vec![3, 4, 5]);
        assert_eq!(parse_levels("2,4,7").unwrap().0, vec![2, 4, 7]);
        assert!(parse_levels("4,3").is_err());
    }

    #[test]
    fn points_and_norms() {
        assert_eq!(parse_point("-0.2,1/2").unwrap(), [-0.2, 0.5]);
        assert!(parse_point("1").is_err());
        assert_eq!(parse_norm("l1").unwrap(), Norm::taxicab());
        assert!(parse_norm("p=0.5").is_err());
    }

    #[test]
    fn carpet_resolution_is_aligned_at_level_one() {
        let o = Obstacle { source: Source::Builtin("bmc".into()), kind: Kind::Carpet(permea_core::obstacles::bmc_pattern()) };
        let LevelCells::Carpet(_, res) = o.level(1).unwrap() else { panic!() };
        assert_eq!(res.side(), Rational::new(1, 480));
        let LevelCells::Carpet(_, res) = o.level(2).unwrap() else { panic!() };
        assert_eq!(res.side(), Rational::new(1, 4608));
    }
}
