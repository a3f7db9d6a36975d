use geo::{Contains, Coord, LineString, MultiPolygon, Polygon};
use serde::Serialize;

use crate::covers::LoopResult;
use crate::geom::{segment_cell_contacts, CellOracle, Dim, Norm, Point};
use crate::ifs::{IfsSystem, Piece};
use crate::neighbors::{IntersectionSet, NeighborClosure};

use super::witness::{count_intersections, report};
use super::{PermeabilityError, WitnessReport};

/// Parallel lines examined in the `delta / 4` band.
const MAX_LINES: usize = 801;
/// Lines kept for splicing when none misses the cells.
const SHORTLIST: usize = 8;
/// Pieces allowed in one splice.
const MAX_SPLICE_PIECES: usize = 4000;

/// A disk of the residual cover with the pieces of `Q_{2r}` meeting it.
#[derive(Clone, Debug, Serialize)]
pub struct SpliceDisk {
    pub center: [f64; 2],
    pub radius: f64,
    pub pieces: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FiniteTypeWitness {
    pub report: WitnessReport,
    /// Signed offset of the chosen line from the segment `xy`.
    pub line_offset: f64,
    /// Length of the chosen line inside cells.
    pub line_measure: f64,
    /// `delta / (4 c l(alpha))` with `c` the largest disk piece count.
    pub budget: f64,
    pub admissible: bool,
    pub disks: Vec<SpliceDisk>,
    /// Words of the pieces whose scaled loops were spliced in.
    pub pieces: Vec<String>,
    /// Contraction ratio of the spliced pieces; 0 for a straight line.
    pub scale: f64,
    /// `|pieces| * |H|`.
    pub component_bound: usize,
    pub within_bound: bool,
}

struct Line {
    offset: f64,
    from: [f64; 2],
    to: [f64; 2],
    measure: f64,
}

struct Candidate {
    vertices: Vec<[f64; 2]>,
    components: usize,
    excess: f64,
    pieces: Vec<String>,
    scale: f64,
    line: usize,
}

fn contacts(a: [f64; 2], b: [f64; 2], cells: &dyn CellOracle) -> Vec<(f64, f64)> {
    segment_cell_contacts(&[a[0], a[1], 0.0], &[b[0], b[1], 0.0], cells)
}

fn hits(a: [f64; 2], b: [f64; 2], cells: &dyn CellOracle) -> bool {
    !contacts(a, b, cells).is_empty()
}

fn len(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2)).sqrt()
}

fn seg_dist(p: [f64; 3], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let l2 = dx * dx + dy * dy;
    let t = if l2 > 0.0 { (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / l2).clamp(0.0, 1.0) } else { 0.0 };
    ((p[0] - a[0] - t * dx).powi(2) + (p[1] - a[1] - t * dy).powi(2)).sqrt()
}

/// Pieces of `Q_rho` whose enclosing balls pass `meets`, by descent from the root.
fn pieces_meeting(ifs: &IfsSystem, rho: f64, limit: usize, meets: &dyn Fn(&Piece) -> bool) -> Option<Vec<Piece>> {
    let mut out = Vec::new();
    let mut stack = vec![ifs.root_piece()];
    while let Some(p) = stack.pop() {
        if !meets(&p) {
            continue;
        }
        if !p.word.is_empty() && p.map.ratio() <= rho * (1.0 + 1e-12) {
            out.push(p);
            if out.len() > limit {
                return None;
            }
            continue;
        }
        let mut kids = ifs.children(&p);
        kids.reverse();
        stack.extend(kids);
    }
    Some(out)
}

fn scan_lines(x: [f64; 2], y: [f64; 2], delta: f64, cells: &dyn CellOracle) -> Vec<Line> {
    let s = cells.resolution().side_f64();
    let l = len(x, y);
    let nrm = [-(y[1] - x[1]) / l, (y[0] - x[0]) / l];
    let half = MAX_LINES / 2;
    let reach = delta / 4.0;
    let step = s.max(reach / half as f64);
    let k_max = ((reach / step).floor() as usize).min(half);
    let mut lines = Vec::new();
    for k in 0..=k_max {
        for sign in [1.0, -1.0] {
            if k == 0 && sign < 0.0 {
                continue;
            }
            let o = sign * k as f64 * step;
            let from = [x[0] + o * nrm[0], x[1] + o * nrm[1]];
            let to = [y[0] + o * nrm[0], y[1] + o * nrm[1]];
            if k > 0 && (hits(x, from, cells) || hits(to, y, cells)) {
                continue;
            }
            let lg = len(from, to);
            let measure = contacts(from, to, cells).iter().map(|(u, v)| (v - u) * lg).sum();
            lines.push(Line { offset: o, from, to, measure });
        }
    }
    lines
}

fn loop_polygon(piece: &Piece, alpha: &LoopResult) -> Polygon<f64> {
    let ring: Vec<Coord<f64>> = alpha
        .vertices
        .iter()
        .map(|v| {
            let p = piece.map.apply_array(&[v[0], v[1], 0.0]);
            Coord { x: p[0], y: p[1] }
        })
        .collect();
    Polygon::new(LineString::new(ring), vec![])
}

/// Crossings of `a -> b` with a closed ring: `(t, edge, point)` sorted by `t`.
fn ring_crossings(ring: &[[f64; 2]], a: [f64; 2], b: [f64; 2]) -> Vec<(f64, usize, [f64; 2])> {
    let d = [b[0] - a[0], b[1] - a[1]];
    let mut out = Vec::new();
    for k in 0..ring.len() - 1 {
        let (p, q) = (ring[k], ring[k + 1]);
        let e = [q[0] - p[0], q[1] - p[1]];
        let den = d[0] * e[1] - d[1] * e[0];
        if den.abs() < 1e-300 {
            continue;
        }
        let w = [p[0] - a[0], p[1] - a[1]];
        let t = (w[0] * e[1] - w[1] * e[0]) / den;
        let u = (w[0] * d[1] - w[1] * d[0]) / den;
        if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
            out.push((t, k, [a[0] + t * d[0], a[1] + t * d[1]]));
        }
    }
    out.sort_by(|p, q| p.0.total_cmp(&q.0));
    out
}

/// The two ring arcs from crossing `i` to crossing `j`, each starting at `i`.
fn ring_arcs(ring: &[[f64; 2]], i: (usize, [f64; 2]), j: (usize, [f64; 2])) -> [Vec<[f64; 2]>; 2] {
    let n = ring.len() - 1;
    let mut fwd = vec![i.1];
    let mut k = i.0;
    while k != j.0 {
        k = (k + 1) % n;
        fwd.push(ring[k]);
    }
    fwd.push(j.1);
    let mut back = vec![i.1];
    let mut k = i.0;
    loop {
        back.push(ring[k]);
        if k == (j.0 + 1) % n {
            break;
        }
        k = (k + n - 1) % n;
    }
    back.push(j.1);
    [fwd, back]
}

fn arc_len(v: &[[f64; 2]]) -> f64 {
    v.windows(2).map(|w| len(w[0], w[1])).sum()
}

fn arc_contacts(v: &[[f64; 2]], cells: &dyn CellOracle) -> usize {
    v.windows(2).map(|w| contacts(w[0], w[1], cells).len()).sum()
}

/// Drops vertices while the shortcut segment stays clear of the cells.
fn tighten(v: Vec<[f64; 2]>, cells: &dyn CellOracle) -> Vec<[f64; 2]> {
    let mut out = vec![v[0]];
    let mut i = 0;
    while i + 1 < v.len() {
        let mut j = i + 1;
        while j + 1 < v.len() && !hits(v[i], v[j + 1], cells) {
            j += 1;
        }
        out.push(v[j]);
        i = j;
    }
    out
}

/// Replaces the stretches of `line` inside the union of scaled loops by ring arcs.
fn splice(line: &Line, union: &MultiPolygon<f64>, cells: &dyn CellOracle) -> Option<Vec<[f64; 2]>> {
    let (a, b) = (line.from, line.to);
    let mut spans: Vec<(f64, Vec<[f64; 2]>, f64)> = Vec::new();
    for poly in union.iter() {
        if poly.contains(&Coord { x: a[0], y: a[1] }) || poly.contains(&Coord { x: b[0], y: b[1] }) {
            return None;
        }
        let ring: Vec<[f64; 2]> = poly.exterior().coords().map(|c| [c.x, c.y]).collect();
        let cross = ring_crossings(&ring, a, b);
        if cross.len() < 2 {
            continue;
        }
        let (first, last) = (&cross[0], &cross[cross.len() - 1]);
        let arcs = ring_arcs(&ring, (first.1, first.2), (last.1, last.2));
        let best = arcs
            .into_iter()
            .min_by(|p, q| arc_contacts(p, cells).cmp(&arc_contacts(q, cells)).then(arc_len(p).total_cmp(&arc_len(q))))?;
        spans.push((first.0, best, last.0));
    }
    spans.sort_by(|p, q| p.0.total_cmp(&q.0));
    if spans.windows(2).any(|w| w[1].0 <= w[0].2) {
        return None;
    }
    let mut out = vec![a];
    for (_, arc, _) in spans {
        out.extend(arc);
    }
    out.push(b);
    out.dedup();
    Some(out)
}

/// Path from `x` to `y` built from a parallel line and scaled copies of the loop `alpha`.
#[allow(clippy::too_many_arguments)]
pub fn finite_type_witness_2d(
    ifs: &IfsSystem,
    closure: &NeighborClosure,
    h: &IntersectionSet,
    alpha: &LoopResult,
    cells: &dyn CellOracle,
    x: &Point,
    y: &Point,
    delta: f64,
) -> Result<FiniteTypeWitness, PermeabilityError> {
    if ifs.dim() != Dim::TWO || cells.dim() != Dim::TWO || x.dim() != Dim::TWO || y.dim() != Dim::TWO {
        return Err(PermeabilityError::Precondition("finite-type witnesses are planar".into()));
    }
    if !closure.is_stabilized() {
        return Err(PermeabilityError::Precondition("neighbor closure did not stabilize".into()));
    }
    if !h.is_certified_finite() {
        return Err(PermeabilityError::Precondition(format!("intersection points not certified finite ({:?})", h.status)));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(PermeabilityError::BadParameter(format!("delta = {delta} must be positive")));
    }
    let (xa, ya) = ([x.x(), x.y()], [y.x(), y.y()]);
    if x == y {
        return Err(PermeabilityError::BadParameter("x and y coincide".into()));
    }
    if hits(xa, xa, cells) || hits(ya, ya, cells) {
        return Err(PermeabilityError::Precondition("an endpoint lies in an obstacle cell".into()));
    }
    let norm = Norm::Euclidean;
    let s = cells.resolution().side_f64();
    let diag = s * std::f64::consts::SQRT_2;
    let h_count = h.points.len().max(1);

    let mut lines = scan_lines(xa, ya, delta, cells);
    if lines.is_empty() {
        return Err(PermeabilityError::NoAdmissibleLine { achieved: f64::INFINITY, budget: 0.0 });
    }
    lines.sort_by(|p, q| p.measure.total_cmp(&q.measure).then(p.offset.abs().total_cmp(&q.offset.abs())));
    lines.truncate(SHORTLIST);

    let leg = |mid: Vec<[f64; 2]>| {
        let mut v = vec![xa];
        v.extend(mid);
        v.push(ya);
        v.dedup();
        v
    };

    let mut best: Option<Candidate> = None;
    let better = |c: &Candidate, b: &Option<Candidate>| match b {
        None => true,
        Some(b) => {
            let key = |c: &Candidate| (c.excess > delta, c.components);
            key(c) < key(b) || (key(c) == key(b) && c.excess < b.excess)
        }
    };
    if lines[0].measure == 0.0 {
        let v = leg(vec![lines[0].from, lines[0].to]);
        let path = crate::geom::PolyPath::from_xy(&v)?;
        best = Some(Candidate {
            excess: path.euclid_len() - len(xa, ya),
            components: count_intersections(&path, cells)?.count,
            vertices: v,
            pieces: Vec::new(),
            scale: 0.0,
            line: 0,
        });
    } else {
        let r = ifs.r_max().to_f64();
        let piece_floor = s / (2.0 * ifs.ball().radius);
        for (li, line) in lines.iter().enumerate() {
            let mut rho = r;
            while rho >= piece_floor {
                let meets = |p: &Piece| seg_dist(p.center, line.from, line.to) <= p.radius;
                let Some(chosen) = pieces_meeting(ifs, rho, MAX_SPLICE_PIECES, &meets) else { break };
                if !chosen.is_empty() {
                    let polys: Vec<Polygon<f64>> = chosen.iter().map(|p| loop_polygon(p, alpha)).collect();
                    let union = geo::unary_union(&polys);
                    if let Some(mid) = splice(line, &union, cells) {
                        let v = tighten(leg(mid), cells);
                        let path = crate::geom::PolyPath::from_xy(&v)?;
                        let c = Candidate {
                            excess: path.euclid_len() - len(xa, ya),
                            components: count_intersections(&path, cells)?.count,
                            vertices: v,
                            pieces: chosen.iter().map(|p| p.word.to_string()).collect(),
                            scale: chosen.iter().fold(0.0f64, |m, p| m.max(p.map.ratio())),
                            line: li,
                        };
                        if better(&c, &best) {
                            best = Some(c);
                        }
                    }
                }
                rho *= r;
            }
        }
    }
    let Some(best) = best else {
        return Err(PermeabilityError::NoAdmissibleLine { achieved: lines[0].measure, budget: 0.0 });
    };
    let line = &lines[best.line];

    // residual disks on the chosen line and their piece counts
    let lg = len(line.from, line.to);
    let mut disks = Vec::new();
    for (u, v) in contacts(line.from, line.to, cells) {
        let t = 0.5 * (u + v);
        let center = [line.from[0] + t * (line.to[0] - line.from[0]), line.from[1] + t * (line.to[1] - line.from[1])];
        let radius = 0.5 * (v - u) * lg + diag;
        let meets = |p: &Piece| len([p.center[0], p.center[1]], center) <= p.radius + radius;
        let count = if 2.0 * radius < 1.0 {
            pieces_meeting(ifs, 2.0 * radius, usize::MAX, &meets).map_or(0, |v| v.len())
        } else {
            1
        };
        disks.push(SpliceDisk { center, radius, pieces: count });
    }
    let c_disk = disks.iter().map(|d| d.pieces).max().unwrap_or(1).max(1);
    let budget = delta / (4.0 * c_disk as f64 * alpha.length);
    let component_bound = best.pieces.len().max(1) * h_count;
    let report = report(best.vertices, cells, x, y, delta, &norm, None, false)?;
    Ok(FiniteTypeWitness {
        within_bound: report.intersection_components <= component_bound,
        line_offset: line.offset,
        line_measure: line.measure,
        budget,
        admissible: line.measure <= budget,
        disks,
        pieces: best.pieces,
        scale: best.scale,
        component_bound,
        report,
    })
}
