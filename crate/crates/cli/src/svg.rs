//! Render specs and their SVG 1.1 serialization.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::error::CliError;

type Xy = [f64; 2];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Viewport {
    pub min: Xy,
    pub max: Xy,
}

impl Viewport {
    /// Bounding box of the points grown by `pad` on every side.
    pub fn around<'a>(points: impl IntoIterator<Item = &'a Xy>, pad: f64) -> Option<Viewport> {
        let mut it = points.into_iter();
        let first = *it.next()?;
        let (lo, hi) = it.fold((first, first), |(lo, hi), p| {
            ([lo[0].min(p[0]), lo[1].min(p[1])], [hi[0].max(p[0]), hi[1].max(p[1])])
        });
        Some(Viewport { min: [lo[0] - pad, lo[1] - pad], max: [hi[0] + pad, hi[1] + pad] })
    }

    fn contains(&self, p: &Xy) -> bool {
        let tol = 1e-9 * (self.max[0] - self.min[0]).max(self.max[1] - self.min[1]);
        (0..2).all(|k| p[k] >= self.min[k] - tol && p[k] <= self.max[k] + tol)
    }
}

fn default_width() -> f64 {
    1.0
}

fn default_opacity() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Style {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fill: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stroke: Option<String>,
    #[serde(default = "default_width")]
    pub stroke_width: f64,
    #[serde(default = "default_opacity")]
    pub opacity: f64,
}

impl Style {
    pub fn filled(color: &str) -> Style {
        Style { fill: Some(color.into()), stroke: None, stroke_width: 1.0, opacity: 1.0 }
    }

    pub fn stroked(color: &str, width: f64) -> Style {
        Style { fill: None, stroke: Some(color.into()), stroke_width: width, opacity: 1.0 }
    }
}

impl Default for Style {
    fn default() -> Self {
        Style::stroked("black", 1.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Layer {
    /// Obstacle or approximation cells as `[lo, hi]` boxes.
    Cells {
        rects: Vec<[Xy; 2]>,
        #[serde(default)]
        style: Style,
    },
    /// Square cover pieces as `[lo, hi]` boxes.
    Cover {
        rects: Vec<[Xy; 2]>,
        #[serde(default)]
        style: Style,
    },
    Path {
        points: Vec<Xy>,
        #[serde(default)]
        style: Style,
    },
    /// Closed polygon.
    Loop {
        points: Vec<Xy>,
        #[serde(default)]
        style: Style,
    },
    Points {
        points: Vec<Xy>,
        /// Marker radius in pixels.
        #[serde(default = "default_marker")]
        radius: f64,
        #[serde(default)]
        style: Style,
    },
}

fn default_marker() -> f64 {
    3.0
}

impl Layer {
    fn kind(&self) -> &'static str {
        match self {
            Layer::Cells { .. } => "cells",
            Layer::Cover { .. } => "cover",
            Layer::Path { .. } => "path",
            Layer::Loop { .. } => "loop",
            Layer::Points { .. } => "points",
        }
    }

    fn style(&self) -> &Style {
        match self {
            Layer::Cells { style, .. }
            | Layer::Cover { style, .. }
            | Layer::Path { style, .. }
            | Layer::Loop { style, .. }
            | Layer::Points { style, .. } => style,
        }
    }

    fn points(&self) -> Box<dyn Iterator<Item = &Xy> + '_> {
        match self {
            Layer::Cells { rects, .. } | Layer::Cover { rects, .. } => Box::new(rects.iter().flatten()),
            Layer::Path { points, .. } | Layer::Loop { points, .. } | Layer::Points { points, .. } => {
                Box::new(points.iter())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderSpec {
    pub viewport: Viewport,
    pub width: f64,
    pub height: f64,
    #[serde(default)]
    pub layers: Vec<Layer>,
}

const MAX_PIXELS: f64 = 20_000.0;

fn safe_color(c: &str) -> bool {
    !c.is_empty() && c.len() <= 64 && c.chars().all(|ch| ch.is_ascii_alphanumeric() || "#(),. %-".contains(ch))
}

impl RenderSpec {
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Input(m));
        let v = &self.viewport;
        if !(v.min.iter().chain(&v.max).all(|c| c.is_finite()) && v.max[0] > v.min[0] && v.max[1] > v.min[1]) {
            return bad(format!("viewport {:?} to {:?} is empty or not finite", v.min, v.max));
        }
        for (name, x) in [("width", self.width), ("height", self.height)] {
            if !(x >= 1.0 && x <= MAX_PIXELS) {
                return bad(format!("{name} {x} outside 1..={MAX_PIXELS}"));
            }
        }
        for (i, layer) in self.layers.iter().enumerate() {
            let s = layer.style();
            for c in s.fill.iter().chain(&s.stroke) {
                if !safe_color(c) {
                    return bad(format!("layer {i}: color {c:?} not allowed"));
                }
            }
            if !(s.stroke_width >= 0.0 && s.stroke_width.is_finite()) || !(0.0..=1.0).contains(&s.opacity) {
                return bad(format!("layer {i}: stroke width or opacity out of range"));
            }
            if let Layer::Points { radius, .. } = layer {
                if !(*radius > 0.0 && radius.is_finite()) {
                    return bad(format!("layer {i}: marker radius {radius}"));
                }
            }
            if let Some(p) = layer.points().find(|p| !p.iter().all(|c| c.is_finite()) || !v.contains(p)) {
                return bad(format!("layer {i} ({}): point {p:?} outside the viewport", layer.kind()));
            }
        }
        Ok(())
    }
}

/// Fixed six decimals, never `-0.000000`.
fn fmt(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
        "0.000000".into()
    } else {
        s
    }
}

struct Frame {
    vp: Viewport,
    sx: f64,
    sy: f64,
}

impl Frame {
    fn map(&self, p: &Xy) -> (String, String) {
        (fmt((p[0] - self.vp.min[0]) * self.sx), fmt((self.vp.max[1] - p[1]) * self.sy))
    }
}

fn style_attrs(s: &Style, default_fill: &str) -> String {
    let mut out = format!(" fill=\"{}\"", s.fill.as_deref().unwrap_or(default_fill));
    if let Some(c) = &s.stroke {
        let _ = write!(out, " stroke=\"{c}\" stroke-width=\"{}\"", fmt(s.stroke_width));
    }
    if s.opacity < 1.0 {
        let _ = write!(out, " opacity=\"{}\"", fmt(s.opacity));
    }
    out
}

fn rect_path(f: &Frame, rects: &[[Xy; 2]]) -> String {
    let mut d = String::new();
    for [lo, hi] in rects {
        let (x0, y0) = f.map(lo);
        let (x1, y1) = f.map(hi);
        let _ = write!(d, "M{x0} {y0}H{x1}V{y1}H{x0}Z");
    }
    d
}

fn poly_points(f: &Frame, pts: &[Xy]) -> String {
    pts.iter()
        .map(|p| {
            let (x, y) = f.map(p);
            format!("{x},{y}")
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// SVG text; layers are drawn in order, later ones on top.
pub fn render(spec: &RenderSpec) -> Result<String, CliError> {
    spec.validate()?;
    let vp = spec.viewport.clone();
    let f = Frame {
        sx: spec.width / (vp.max[0] - vp.min[0]),
        sy: spec.height / (vp.max[1] - vp.min[1]),
        vp,
    };
    let (w, h) = (fmt(spec.width), fmt(spec.height));
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">"
    );
    for (i, layer) in spec.layers.iter().enumerate() {
        let s = layer.style();
        match layer {
            Layer::Cells { rects, .. } | Layer::Cover { rects, .. } => {
                let _ = writeln!(out, "<g id=\"layer-{i}\" class=\"{}\"{}>", layer.kind(), style_attrs(s, "black"));
                if !rects.is_empty() {
                    let _ = writeln!(out, "<path d=\"{}\"/>", rect_path(&f, rects));
                }
            }
            Layer::Path { points, .. } => {
                let _ = writeln!(out, "<g id=\"layer-{i}\" class=\"path\"{}>", style_attrs(s, "none"));
                if !points.is_empty() {
                    let _ = writeln!(out, "<polyline points=\"{}\"/>", poly_points(&f, points));
                }
            }
            Layer::Loop { points, .. } => {
                let _ = writeln!(out, "<g id=\"layer-{i}\" class=\"loop\"{}>", style_attrs(s, "none"));
                if !points.is_empty() {
                    let _ = writeln!(out, "<polygon points=\"{}\"/>", poly_points(&f, points));
                }
            }
            Layer::Points { points, radius, .. } => {
                let _ = writeln!(out, "<g id=\"layer-{i}\" class=\"points\"{}>", style_attrs(s, "black"));
                for p in points {
                    let (x, y) = f.map(p);
                    let _ = writeln!(out, "<circle cx=\"{x}\" cy=\"{y}\" r=\"{}\"/>", fmt(*radius));
                }
            }
        }
        out.push_str("</g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

/// Merges horizontally adjacent unit cells `(i, j)` of side `s` into row runs.
pub fn cell_runs(mut cells: Vec<(i64, i64)>, s: f64) -> Vec<[Xy; 2]> {
    cells.sort_by_key(|&(i, j)| (j, i));
    let mut out = Vec::new();
    let mut k = 0;
    while k < cells.len() {
        let (i0, j) = cells[k];
        let mut i1 = i0;
        while k + 1 < cells.len() && cells[k + 1] == (i1 + 1, j) {
            i1 += 1;
            k += 1;
        }
        out.push([[i0 as f64 * s, j as f64 * s], [(i1 + 1) as f64 * s, (j + 1) as f64 * s]]);
        k += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(layers: Vec<Layer>) -> RenderSpec {
        RenderSpec { viewport: Viewport { min: [0.0, 0.0], max: [1.0, 1.0] }, width: 100.0, height: 100.0, layers }
    }

    #[test]
    fn empty_canvas() {
        let svg = render(&spec(vec![])).unwrap();
        assert!(svg.contains("version=\"1.1\""));
        assert!(!svg.contains("<g"));
    }

    #[test]
    fn y_axis_flips() {
        let svg = render(&spec(vec![Layer::Path { points: vec![[0.0, 0.0], [1.0, 1.0]], style: Style::default() }])).unwrap();
        assert!(svg.contains("0.000000,100.000000 100.000000,0.000000"));
    }

    #[test]
    fn outside_viewport_rejected() {
        let s = spec(vec![Layer::Points { points: vec![[2.0, 0.5]], radius: 2.0, style: Style::default() }]);
        assert!(render(&s).is_err());
    }

    #[test]
    fn hostile_color_rejected() {
        let s = spec(vec![Layer::Path { points: vec![], style: Style::stroked("red\"/><script", 1.0) }]);
        assert!(render(&s).is_err());
    }

    #[test]
    fn negative_zero() {
        assert_eq!(fmt(-0.0000001), "0.000000");
        assert_eq!(fmt(-0.5), "-0.500000");
    }

    #[test]
    fn runs_merge() {
        let r = cell_runs(vec![(2, 0), (0, 0), (1, 0), (0, 1)], 0.5);
        assert_eq!(r, vec![[[0.0, 0.0], [1.5, 0.5]], [[0.0, 0.5], [0.5, 1.0]]]);
    }
}
