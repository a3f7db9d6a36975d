use std::path::PathBuf;
use std::process::ExitCode;

use serde_json::Value;

use permea_core::covers::{cover_sequence, select_delta_k, surrounding_loop};
use permea_core::geom::{Cell, Resolution};
use permea_core::ifs::{approximate, catalog};
use permea_core::neighbors::{intersection_points, neighbor_closure, ClosureParams};
use permea_core::num::to_f64;
use permea_core::obstacles::{bmc_cells, bmc_pattern, theta_squares};

use crate::error::{input, CliError};
use crate::output::write_text;
use crate::svg::{cell_runs, render, Layer, RenderSpec, Style, Viewport};

pub const SCENES: &[&str] = &["triangle-loop", "bmc", "theta-squares"];

#[derive(clap::Args, Debug)]
pub struct Args {
    /// Render spec JSON, a `path` report JSON, or `scene:<name>` for a builtin scene.
    pub input: String,
    /// Output file.
    #[arg(long)]
    pub svg: PathBuf,
}

fn square_spec(layers: Vec<Layer>, lo: [f64; 2], hi: [f64; 2]) -> RenderSpec {
    let pad = 0.05 * (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let vp = Viewport { min: [lo[0] - pad, lo[1] - pad], max: [hi[0] + pad, hi[1] + pad] };
    let aspect = (vp.max[1] - vp.min[1]) / (vp.max[0] - vp.min[0]);
    RenderSpec { viewport: vp, width: 800.0, height: (800.0 * aspect).round(), layers }
}

/// The triangle at level 6, the squares of `U_1`, the outer boundary of `U_2` and `H` on top.
fn triangle_loop() -> Result<RenderSpec, CliError> {
    let tri = catalog::sierpinski_triangle();
    let closure = neighbor_closure(&tri, ClosureParams { eps: 0.0, level: 4, max_maps: 5000 }).map_err(input)?;
    let h = intersection_points(&tri, &closure, 1e-6).map_err(input)?;
    let dk = select_delta_k(&tri, &closure, &h, 0.5).map_err(input)?;
    let seq = cover_sequence(&tri, &h, &dk, 2).map_err(input)?;
    let alpha = surrounding_loop(&seq, 2).map_err(input)?;
    let res = Resolution::dyadic(9);
    let k = approximate(&tri, &tri.level_rho(6), res).map_err(input)?;
    let cells = cell_runs(k.iter().map(|c: &Cell| (c.0[0], c.0[1])).collect(), res.side_f64());
    let squares = seq.layer_squares(1).map(|r| [r.lo, r.hi]).collect();
    let hp = h.points.iter().map(|e| [e.center.x(), e.center.y()]).collect();
    let layers = vec![
        Layer::Cells { rects: cells, style: Style::filled("#444444") },
        Layer::Cover {
            rects: squares,
            style: Style { fill: Some("#1f77b4".into()), stroke: None, stroke_width: 1.0, opacity: 0.35 },
        },
        Layer::Loop { points: alpha.vertices.clone(), style: Style::stroked("#d62728", 1.5) },
        Layer::Points { points: hp, radius: 4.0, style: Style::filled("#2ca02c") },
    ];
    let pts: Vec<[f64; 2]> = alpha.vertices.iter().copied().chain(seq.layer_squares(1).flat_map(|r| [r.lo, r.hi])).collect();
    let vp = Viewport::around(pts.iter().chain([[0.0, 0.0], [1.0, 0.9]].iter()), 0.0).expect("points");
    Ok(square_spec(layers, vp.min, vp.max))
}

fn bmc_scene() -> Result<RenderSpec, CliError> {
    let cells = bmc_cells(&bmc_pattern(), 1).map_err(input)?;
    let rects = cells
        .rectangles()
        .map_err(input)?
        .iter()
        .map(|(lo, hi)| [[to_f64(&lo[0]), to_f64(&lo[1])], [to_f64(&hi[0]), to_f64(&hi[1])]])
        .collect();
    Ok(square_spec(vec![Layer::Cells { rects, style: Style::filled("#333333") }], [0.0, 0.0], [1.0, 1.0]))
}

fn theta_scene() -> Result<RenderSpec, CliError> {
    let t = theta_squares(3, Resolution::dyadic(8)).map_err(input)?;
    let rects = cell_runs(t.cells.iter().map(|c: &Cell| (c.0[0], c.0[1])).collect(), t.cells.resolution().side_f64());
    Ok(square_spec(vec![Layer::Cells { rects, style: Style::filled("#333333") }], [0.0, 0.0], [1.0, 1.0]))
}

/// Paths of a `path` report, one layer per level that found one.
fn from_path_report(v: &Value) -> Result<RenderSpec, CliError> {
    let bad = || CliError::Input("path report has no usable levels".into());
    let levels = v.get("levels").and_then(Value::as_array).ok_or_else(bad)?;
    let mut layers = Vec::new();
    for l in levels {
        if let Some(vs) = l.get("vertices") {
            let points: Vec<[f64; 2]> = serde_json::from_value(vs.clone()).map_err(input)?;
            layers.push(Layer::Path { points, style: Style::stroked("#d62728", 1.5) });
        }
    }
    let ends: Vec<[f64; 2]> = ["from", "to"]
        .iter()
        .filter_map(|k| v.get(*k).and_then(|p| serde_json::from_value(p.clone()).ok()))
        .collect();
    let mut pts: Vec<[f64; 2]> = ends.clone();
    for layer in &layers {
        if let Layer::Path { points, .. } = layer {
            pts.extend(points.iter().copied());
        }
    }
    layers.push(Layer::Points { points: ends, radius: 3.0, style: Style::filled("black") });
    let vp = Viewport::around(&pts, 0.0).ok_or_else(bad)?;
    Ok(square_spec(layers, vp.min, vp.max))
}

pub fn load_spec(arg: &str) -> Result<RenderSpec, CliError> {
    if let Some(name) = arg.strip_prefix("scene:") {
        return match name {
            "triangle-loop" => triangle_loop(),
            "bmc" => bmc_scene(),
            "theta-squares" => theta_scene(),
            _ => Err(CliError::Input(format!("unknown scene {name:?} (known: {})", SCENES.join(", ")))),
        };
    }
    let text = std::fs::read_to_string(arg).map_err(|e| CliError::Input(format!("{arg}: {e}")))?;
    let v: Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{arg}: line {} column {}: {e}", e.line(), e.column())))?;
    if v.get("command").and_then(Value::as_str) == Some("path") {
        return from_path_report(&v);
    }
    serde_json::from_value(v).map_err(|e| CliError::Input(format!("{arg}: {e}")))
}

pub fn run(args: Args) -> Result<ExitCode, CliError> {
    let spec = load_spec(&args.input)?;
    write_text(Some(&args.svg), &render(&spec)?)?;
    Ok(ExitCode::SUCCESS)
}
