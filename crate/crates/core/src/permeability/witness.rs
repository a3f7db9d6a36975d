use serde::Serialize;

use crate::geom::{path_length, segment_cell_contacts, CellOracle, Dim, GeomError, Norm, Point, PolyPath};

use super::grid::Grid;
use super::{verdict_hint, PermeabilityError, WitnessReport};

#[derive(Clone, Debug)]
pub struct WitnessOptions {
    /// Longest run of obstacle cells the search may cross between free cells.
    pub crossing_cells: u32,
    /// Recorded in the report.
    pub level: Option<u32>,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        WitnessOptions { crossing_cells: 2, level: None }
    }
}

/// A maximal stretch of the path meeting obstacle cells, in Euclidean arc length.
#[derive(Clone, Debug, Serialize)]
pub struct PathComponent {
    pub start: f64,
    pub end: f64,
    pub from: [f64; 2],
    pub to: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct Intersections {
    pub count: usize,
    pub components: Vec<PathComponent>,
    /// Euclidean length of the path inside obstacle cells.
    pub covered_length: f64,
}

fn require_planar(cells: &dyn CellOracle) -> Result<(), PermeabilityError> {
    if cells.dim() != Dim::TWO {
        return Err(PermeabilityError::Precondition(format!("obstacles are {}-dimensional", cells.dim().get())));
    }
    Ok(())
}

fn point_at_arc(path: &PolyPath, s: f64) -> [f64; 2] {
    let mut off = 0.0;
    for seg in path.segments() {
        let l = seg.euclid_len();
        if s <= off + l || l == 0.0 {
            let t = if l > 0.0 { ((s - off) / l).clamp(0.0, 1.0) } else { 0.0 };
            let p = seg.point_at(t);
            return [p.x(), p.y()];
        }
        off += l;
    }
    let e = path.end();
    [e.x(), e.y()]
}

/// Maximal closed parameter stretches of a planar path that meet obstacle cells.
pub fn count_intersections(path: &PolyPath, cells: &dyn CellOracle) -> Result<Intersections, PermeabilityError> {
    require_planar(cells)?;
    if path.dim() != Dim::TWO {
        return Err(GeomError::DimensionMismatch { expected: 2, found: path.dim().get() }.into());
    }
    let mut spans: Vec<(f64, f64)> = Vec::new();
    let mut off = 0.0;
    if path.is_degenerate() {
        let p = path.start().array();
        if !segment_cell_contacts(&p, &p, cells).is_empty() {
            spans.push((0.0, 0.0));
        }
    }
    for seg in path.segments() {
        let l = seg.euclid_len();
        for (u, v) in segment_cell_contacts(&seg.start.array(), &seg.end.array(), cells) {
            spans.push((off + u * l, off + v * l));
        }
        off += l;
    }
    let gap = 1e-9 * cells.resolution().side_f64();
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (a, b) in spans {
        match merged.last_mut() {
            Some(last) if a <= last.1 + gap => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    let covered_length = merged.iter().map(|(a, b)| b - a).sum();
    let components: Vec<PathComponent> = merged
        .into_iter()
        .map(|(a, b)| PathComponent { start: a, end: b, from: point_at_arc(path, a), to: point_at_arc(path, b) })
        .collect();
    Ok(Intersections { count: components.len(), components, covered_length })
}

pub(crate) fn report(
    vertices: Vec<[f64; 2]>,
    cells: &dyn CellOracle,
    x: &Point,
    y: &Point,
    delta: f64,
    norm: &Norm,
    level: Option<u32>,
    endpoint_adjusted: bool,
) -> Result<WitnessReport, PermeabilityError> {
    let path = PolyPath::from_xy(&vertices)?;
    let length = path_length(&path, norm)?.value;
    let distance = norm.eval(x.to(y)?.coords());
    let excess = (length - distance).max(0.0);
    let components = count_intersections(&path, cells)?.count;
    Ok(WitnessReport {
        vertices,
        norm: norm.name(),
        length,
        distance,
        excess,
        delta,
        intersection_components: components,
        level,
        resolution: cells.resolution().side_f64(),
        verdict: verdict_hint(excess, delta, components),
        endpoint_adjusted,
    })
}

fn check_endpoints(x: &Point, y: &Point, delta: f64) -> Result<(), PermeabilityError> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(PermeabilityError::BadParameter(format!("delta = {delta} must be positive")));
    }
    if x.dim() != Dim::TWO || y.dim() != Dim::TWO {
        return Err(PermeabilityError::Precondition("endpoints must be planar".into()));
    }
    Ok(())
}

/// Distance from `p` to the segment `[a, b]`.
fn seg_dist(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let l2 = dx * dx + dy * dy;
    let t = if l2 > 0.0 { (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / l2).clamp(0.0, 1.0) } else { 0.0 };
    ((p[0] - a[0] - t * dx).powi(2) + (p[1] - a[1] - t * dy).powi(2)).sqrt()
}

/// Contact runs of the segment `[a, b]`, or `None` if one is longer than `max_run`.
fn segment_runs(a: [f64; 2], b: [f64; 2], cells: &dyn CellOracle, max_run: f64) -> Option<usize> {
    let l = ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt();
    let gap = 1e-9 * cells.resolution().side_f64();
    let mut runs: Vec<(f64, f64)> = Vec::new();
    for (u, v) in segment_cell_contacts(&[a[0], a[1], 0.0], &[b[0], b[1], 0.0], cells) {
        match runs.last_mut() {
            Some(last) if u * l <= last.1 + gap => last.1 = last.1.max(v * l),
            _ => runs.push((u * l, v * l)),
        }
    }
    runs.iter().all(|(u, v)| v - u <= max_run).then_some(runs.len())
}

/// Greedy shortcuts that may pass through thin runs of cells but never add contact components.
fn pull_through(v: Vec<[f64; 2]>, cells: &dyn CellOracle, max_run: f64) -> Vec<[f64; 2]> {
    if v.len() < 3 {
        return v;
    }
    let runs_of = |w: &[[f64; 2]]| PolyPath::from_xy(w).ok().and_then(|p| count_intersections(&p, cells).ok()).map(|c| c.count);
    let mut out = vec![v[0]];
    let mut i = 0;
    while i + 1 < v.len() {
        let mut j = v.len() - 1;
        while j > i + 1 {
            let ok = match (segment_runs(v[i], v[j], cells, max_run), runs_of(&v[i..=j])) {
                (Some(a), Some(b)) => a <= b,
                _ => false,
            };
            if ok {
                break;
            }
            j -= 1;
        }
        out.push(v[j]);
        i = j;
    }
    out
}

/// Shortest corridor path from `x` to `y` around the obstacle cells, fewest crossed cells first.
pub fn witness_path(
    cells: &dyn CellOracle,
    x: &Point,
    y: &Point,
    delta: f64,
    norm: &Norm,
    opts: &WitnessOptions,
) -> Result<WitnessReport, PermeabilityError> {
    require_planar(cells)?;
    check_endpoints(x, y, delta)?;
    norm.validate(Dim::TWO)?;
    let s = cells.resolution().side_f64();
    let margin = delta.max(4.0 * s);
    if margin < 2.0 * s {
        return Err(PermeabilityError::BadParameter(format!("corridor margin {margin} is under two cells of side {s}")));
    }
    let (a, b) = ([x.x(), x.y()], [y.x(), y.y()]);
    if x == y {
        return report(vec![a, b], cells, x, y, delta, norm, opts.level, false);
    }
    let lo = [a[0].min(b[0]) - margin, a[1].min(b[1]) - margin];
    let hi = [a[0].max(b[0]) + margin, a[1].max(b[1]) + margin];
    let grid = Grid::new(cells, lo, hi, opts.crossing_cells, |c| seg_dist(c, a, b) <= margin)?;
    let (ca, cb) = (grid.cell_of(a), grid.cell_of(b));
    let adjusted = grid.is_blocked(ca) || grid.is_blocked(cb);
    let no_path = || PermeabilityError::NoPath("the corridor complement separates the endpoints".into());
    let sa = grid.nearest_free(ca).ok_or_else(no_path)?;
    let sb = grid.nearest_free(cb).ok_or_else(no_path)?;
    let route = grid.search(sa, sb).ok_or_else(no_path)?;
    let from = if sa == ca { a } else { grid.center(sa) };
    let to = if sb == cb { b } else { grid.center(sb) };
    let mut vertices = grid.smooth(from, &route, to);
    if from != a {
        vertices.insert(0, a);
    }
    if to != b {
        vertices.push(b);
    }
    let vertices = pull_through(vertices, cells, opts.crossing_cells as f64 * cells.resolution().diagonal(Dim::TWO));
    report(vertices, cells, x, y, delta, norm, opts.level, adjusted)
}

/// Van der Corput radical inverse in base 2.
fn van_der_corput(mut k: u64) -> f64 {
    let (mut v, mut f) = (0.0, 0.5);
    while k > 0 {
        if k & 1 == 1 {
            v += f;
        }
        k >>= 1;
        f *= 0.5;
    }
    v
}

/// Two-segment paths `x -> (x+y)/2 + z -> y` with `z` on the mid-disk, first miss wins.
pub fn cone_witness(
    cells: &dyn CellOracle,
    x: &Point,
    y: &Point,
    delta: f64,
    attempts: usize,
    norm: &Norm,
) -> Result<WitnessReport, PermeabilityError> {
    require_planar(cells)?;
    check_endpoints(x, y, delta)?;
    if x == y {
        return Err(PermeabilityError::BadParameter("x and y coincide".into()));
    }
    let (a, b) = ([x.x(), x.y()], [y.x(), y.y()]);
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let l = (dx * dx + dy * dy).sqrt();
    let perp = [-dy / l, dx / l];
    let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
    let bound = (l * l + 4.0 * delta * delta).sqrt();
    for k in 1..=attempts as u64 {
        let t = 2.0 * van_der_corput(k) - 1.0;
        let apex = [mid[0] + t * delta * perp[0], mid[1] + t * delta * perp[1]];
        let hits = |p: [f64; 2], q: [f64; 2]| !segment_cell_contacts(&[p[0], p[1], 0.0], &[q[0], q[1], 0.0], cells).is_empty();
        if hits(a, apex) || hits(apex, b) {
            continue;
        }
        let euclid = seg_dist(apex, a, a) + seg_dist(b, apex, apex);
        if euclid <= bound * (1.0 + 1e-12) {
            return report(vec![a, apex, b], cells, x, y, delta, norm, None, false);
        }
    }
    Err(PermeabilityError::NotFound { attempts })
}

/// Norm length of the segments whose direction is more than `eps` from `z`.
pub fn angle_excess(path: &PolyPath, z: &Point, eps: f64, norm: &Norm) -> Result<f64, GeomError> {
    norm.validate(path.dim())?;
    let za = z.array();
    if za.iter().all(|c| *c == 0.0) {
        return Err(GeomError::DegenerateSegment);
    }
    let mut total = 0.0;
    for seg in path.segments().filter(|s| !s.is_degenerate()) {
        if crate::geom::vector_angle(&seg.direction(), &za) > eps {
            total += norm.eval(&seg.direction()[..path.dim().get()]);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Cell, CellSet, Resolution};
    use crate::obstacles::{cantor_level, extrude, Axis};
    use crate::num::Rational;

    fn cells(level: u32, it: impl IntoIterator<Item = (i64, i64)>) -> CellSet {
        CellSet::from_cells(Dim::TWO, Resolution::dyadic(level), "test", it.into_iter().map(|(i, j)| Cell::xy(i, j)))
    }

    #[test]
    fn empty_obstacle_gives_segment() {
        let empty = cells(5, []);
        let r = witness_path(&empty, &Point::xy(0.0, 0.0), &Point::xy(1.0, 0.0), 0.5, &Norm::Euclidean, &Default::default())
            .unwrap();
        assert_eq!(r.vertices, vec![[0.0, 0.0], [1.0, 0.0]]);
        assert_eq!(r.excess, 0.0);
        assert_eq!(r.intersection_components, 0);
    }

    #[test]
    fn thin_slab_is_crossed_once() {
        for level in [6, 7] {
            let n = 1i64 << level;
            let slab = cells(level, (0..n).map(|i| (i, 0)));
            let r =
                witness_path(&slab, &Point::xy(0.5, -0.2), &Point::xy(0.5, 0.2), 0.5, &Norm::Euclidean, &Default::default())
                    .unwrap();
            assert_eq!(r.intersection_components, 1);
            assert!(r.excess <= 2.0 * Resolution::dyadic(level).diagonal(Dim::TWO), "excess {}", r.excess);
        }
    }

    #[test]
    fn full_square_blocks() {
        let sq = cells(4, (0..16).flat_map(|i| (0..16).map(move |j| (i, j))));
        let r = witness_path(&sq, &Point::xy(0.5, -0.3), &Point::xy(0.5, 1.3), 0.01, &Norm::Euclidean, &Default::default());
        assert!(matches!(r, Err(PermeabilityError::NoPath(_))), "{r:?}");
    }

    #[test]
    fn wall_with_gap_is_avoided() {
        // vertical wall at x in [1/2, 9/16] with a gap around y = 1/2
        let wall = cells(4, (0..16).filter(|j| *j != 8).map(|j| (8, j)));
        let r =
            witness_path(&wall, &Point::xy(0.1, 0.3), &Point::xy(0.9, 0.3), 0.5, &Norm::Euclidean, &Default::default()).unwrap();
        assert_eq!(r.intersection_components, 0);
        assert!(r.excess > 0.0);
    }

    #[test]
    fn intersection_counts() {
        let two = cells(4, (0..16).flat_map(|i| [(i, 3), (i, 10)]));
        let p = PolyPath::from_xy(&[[0.5, 0.0], [0.5, 1.0]]).unwrap();
        assert_eq!(count_intersections(&p, &two).unwrap().count, 2);
        let q = PolyPath::from_xy(&[[0.0, 0.5], [1.0, 0.5]]).unwrap();
        assert_eq!(count_intersections(&q, &cells(4, [])).unwrap().count, 0);
        // along the top edge of the row j = 3
        let edge = PolyPath::from_xy(&[[0.0, 0.25], [1.0, 0.25]]).unwrap();
        assert_eq!(count_intersections(&edge, &two).unwrap().count, 1);
        // a corner joint between two segments is one component
        let bent = PolyPath::from_xy(&[[0.5, 0.0], [0.5, 0.22], [0.9, 0.22]]).unwrap();
        assert_eq!(count_intersections(&bent, &two).unwrap().count, 1);
    }

    #[test]
    fn staircase_angle_excess() {
        let stair = PolyPath::from_xy(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]).unwrap();
        let z = Point::xy(1.0, 1.0);
        let eps = std::f64::consts::PI / 8.0;
        assert!((angle_excess(&stair, &z, eps, &Norm::taxicab()).unwrap() - 2.0).abs() < 1e-12);
        assert!((angle_excess(&stair, &z, eps, &Norm::Euclidean).unwrap() - 2.0).abs() < 1e-12);
        let straight = PolyPath::from_xy(&[[0.0, 0.0], [1.0, 1.0]]).unwrap();
        assert_eq!(angle_excess(&straight, &z, 0.01, &Norm::Euclidean).unwrap(), 0.0);
        assert!(angle_excess(&straight, &Point::xy(0.0, 0.0), 0.1, &Norm::Euclidean).is_err());
    }

    #[test]
    fn cone_witness_cases() {
        let (x, y) = (Point::xy(-0.2, 0.5), Point::xy(1.2, 0.5));
        let r = cone_witness(&cells(5, []), &x, &y, 0.1, 10, &Norm::Euclidean).unwrap();
        assert!(r.length <= (1.4f64.powi(2) + 0.04).sqrt());
        assert_eq!(r.vertices[1], [0.5, 0.5]);

        let res = Resolution::dyadic(9);
        let c4 = cantor_level(4).unwrap();
        let unit = (Rational::from_integer(0), Rational::from_integer(1));
        let slabs = extrude(&c4, Axis::X, unit, res).unwrap();
        let r = cone_witness(&slabs, &x, &y, 0.1, 200, &Norm::Euclidean);
        assert!(matches!(r, Err(PermeabilityError::NotFound { attempts: 200 })));

        // dust: C x C; a cone line through a vertical gap misses it
        let mut dust = CellSet::new(Dim::TWO, res, "dust");
        for (a, b) in &c4.intervals {
            for (c, d) in &c4.intervals {
                dust.extend(crate::geom::rasterize_box(Dim::TWO, res, &[*a, *c], &[*b, *d]).unwrap());
            }
        }
        let (x, y) = (Point::xy(0.5, -0.2), Point::xy(0.5, 1.2));
        let r = cone_witness(&dust, &x, &y, 0.2, 200, &Norm::Euclidean).unwrap();
        assert_eq!(r.intersection_components, 0);
    }
}
