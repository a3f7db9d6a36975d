use std::collections::HashMap;

use serde::Serialize;

use crate::geom::{segment_cell_contacts, CellSet, PolyPath, Point};

use super::sequence::{CoverSequence, Rect};
use super::CoverError;

/// Boundary of the unbounded complementary component of a union of squares.
#[derive(Clone, Debug, Serialize)]
pub struct LoopResult {
    pub n: u32,
    /// Counterclockwise, first vertex repeated at the end.
    pub vertices: Vec<[f64; 2]>,
    pub length: f64,
    /// `ℓ_n + 8 δ^(n-1) #H`, the summed perimeters of everything in the union.
    pub bound: f64,
    /// Points where the loop meets the approximation of `K` used for the layers.
    pub contacts: Vec<[f64; 2]>,
    /// Half-side of the squares placed around `H`.
    pub h_radius: f64,
    pub squares: usize,
    pub provenance: String,
}

impl LoopResult {
    pub fn path(&self) -> PolyPath {
        PolyPath::from_xy(&self.vertices).expect("loop has at least 4 vertices")
    }

    /// Strict interior test (even-odd rule); points on the loop count as outside.
    pub fn encloses(&self, p: [f64; 2]) -> bool {
        point_in_polygon(&self.vertices, p)
    }

    /// Midpoints of the stretches where the loop runs through `cells`.
    pub fn contacts_with(&self, cells: &CellSet) -> Vec<[f64; 2]> {
        contacts(&self.vertices, cells)
    }

    /// Whether no two non-adjacent edges of the loop meet.
    pub fn is_simple(&self) -> bool {
        is_simple(&self.vertices)
    }
}

fn contacts(v: &[[f64; 2]], cells: &CellSet) -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    for w in v.windows(2) {
        let a = [w[0][0], w[0][1], 0.0];
        let b = [w[1][0], w[1][1], 0.0];
        for (t0, t1) in segment_cell_contacts(&a, &b, cells) {
            let t = 0.5 * (t0 + t1);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

pub(crate) fn point_in_polygon(v: &[[f64; 2]], p: [f64; 2]) -> bool {
    let mut inside = false;
    for w in v.windows(2) {
        let (a, b) = (w[0], w[1]);
        // on an edge: not strictly inside
        let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
        if cross == 0.0
            && p[0] >= a[0].min(b[0])
            && p[0] <= a[0].max(b[0])
            && p[1] >= a[1].min(b[1])
            && p[1] <= a[1].max(b[1])
        {
            return false;
        }
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if p[0] < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn is_simple(v: &[[f64; 2]]) -> bool {
    let n = v.len() - 1;
    if n < 4 || v[0] != v[n] {
        return false;
    }
    let mut seen: HashMap<(u64, u64), ()> = HashMap::new();
    for p in &v[..n] {
        if seen.insert((p[0].to_bits(), p[1].to_bits()), ()).is_some() {
            return false;
        }
    }
    // rectilinear edges: sweep is overkill at these sizes, so bucket by coordinate
    let mut horiz: Vec<(f64, f64, f64, usize)> = Vec::new();
    let mut vert: Vec<(f64, f64, f64, usize)> = Vec::new();
    for i in 0..n {
        let (a, b) = (v[i], v[i + 1]);
        if a[1] == b[1] {
            horiz.push((a[1], a[0].min(b[0]), a[0].max(b[0]), i));
        } else if a[0] == b[0] {
            vert.push((a[0], a[1].min(b[1]), a[1].max(b[1]), i));
        } else {
            return false;
        }
    }
    let adjacent = |i: usize, j: usize| i.abs_diff(j) == 1 || i.abs_diff(j) == n - 1;
    for set in [&mut horiz, &mut vert] {
        set.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
        for w in set.windows(2) {
            if w[0].0 == w[1].0 && w[1].1 <= w[0].2 && !adjacent(w[0].3, w[1].3) {
                return false;
            }
        }
    }
    vert.sort_by(|p, q| p.0.total_cmp(&q.0));
    for h in &horiz {
        let lo = vert.partition_point(|e| e.0 < h.1);
        for e in vert[lo..].iter().take_while(|e| e.0 <= h.2) {
            if e.1 <= h.0 && h.0 <= e.2 && !adjacent(e.3, h.3) {
                return false;
            }
        }
    }
    true
}

/// Sorted coordinates with near-duplicates merged.
struct Axis(Vec<f64>);

impl Axis {
    fn new(mut v: Vec<f64>, tol: f64) -> Axis {
        v.sort_by(f64::total_cmp);
        let mut out: Vec<f64> = Vec::with_capacity(v.len());
        for x in v {
            if out.last().map_or(true, |l| x - l > tol) {
                out.push(x);
            }
        }
        Axis(out)
    }

    fn id(&self, x: f64, tol: f64) -> usize {
        self.0.partition_point(|v| *v < x - tol)
    }
}

/// Range add with min/max over elementary intervals.
struct SegTree {
    n: usize,
    add: Vec<i32>,
    min: Vec<i32>,
    max: Vec<i32>,
}

impl SegTree {
    fn new(n: usize) -> SegTree {
        let size = 4 * n.max(1);
        SegTree { n, add: vec![0; size], min: vec![0; size], max: vec![0; size] }
    }

    fn update(&mut self, a: usize, b: usize, v: i32) {
        if a < b {
            self.upd(1, 0, self.n, a, b, v);
        }
    }

    fn upd(&mut self, node: usize, l: usize, r: usize, a: usize, b: usize, v: i32) {
        if b <= l || r <= a {
            return;
        }
        if a <= l && r <= b {
            self.add[node] += v;
            self.min[node] += v;
            self.max[node] += v;
            return;
        }
        let m = (l + r) / 2;
        self.upd(2 * node, l, m, a, b, v);
        self.upd(2 * node + 1, m, r, a, b, v);
        self.min[node] = self.add[node] + self.min[2 * node].min(self.min[2 * node + 1]);
        self.max[node] = self.add[node] + self.max[2 * node].max(self.max[2 * node + 1]);
    }

    /// Maximal uncovered stretches inside `[a, b)`.
    fn zeros(&self, a: usize, b: usize) -> Vec<(usize, usize)> {
        let mut out: Vec<(usize, usize)> = Vec::new();
        if a < b {
            self.zer(1, 0, self.n, a, b, 0, &mut out);
        }
        out
    }

    #[allow(clippy::too_many_arguments)]
    fn zer(&self, node: usize, l: usize, r: usize, a: usize, b: usize, acc: i32, out: &mut Vec<(usize, usize)>) {
        if b <= l || r <= a || self.min[node] + acc > 0 {
            return;
        }
        if self.max[node] + acc == 0 || r - l == 1 {
            let (s, e) = (l.max(a), r.min(b));
            match out.last_mut() {
                Some(last) if last.1 == s => last.1 = e,
                _ => out.push((s, e)),
            }
            return;
        }
        let m = (l + r) / 2;
        let acc = acc + self.add[node];
        self.zer(2 * node, l, m, a, b, acc, out);
        self.zer(2 * node + 1, m, r, a, b, acc, out);
    }
}

fn merge(mut v: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    v.sort_unstable();
    let mut out: Vec<(usize, usize)> = Vec::new();
    for (a, b) in v {
        match out.last_mut() {
            Some(last) if a <= last.1 => last.1 = last.1.max(b),
            _ => out.push((a, b)),
        }
    }
    out
}

/// Pieces of `e △ s`, tagged true where only `e` covers.
fn sym_diff(e: &[(usize, usize)], s: &[(usize, usize)]) -> Vec<(usize, usize, bool)> {
    let mut pts: Vec<usize> = e.iter().chain(s).flat_map(|&(a, b)| [a, b]).collect();
    pts.sort_unstable();
    pts.dedup();
    let inside = |v: &[(usize, usize)], x: usize| v.iter().any(|&(a, b)| a <= x && x < b);
    let mut out: Vec<(usize, usize, bool)> = Vec::new();
    for w in pts.windows(2) {
        let (in_e, in_s) = (inside(e, w[0]), inside(s, w[0]));
        if in_e != in_s {
            match out.last_mut() {
                Some(last) if last.1 == w[0] && last.2 == in_e => last.1 = w[1],
                _ => out.push((w[0], w[1], in_e)),
            }
        }
    }
    out
}

/// Boundary edges orthogonal to the sweep axis: `(a, lo, hi, ending)`.
fn sweep(rects: &[[usize; 4]], nb: usize) -> Vec<(usize, usize, usize, bool)> {
    let mut starts: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    let mut ends: HashMap<usize, Vec<(usize, usize)>> = HashMap::new();
    for r in rects {
        starts.entry(r[0]).or_default().push((r[2], r[3]));
        ends.entry(r[1]).or_default().push((r[2], r[3]));
    }
    let mut coords: Vec<usize> = starts.keys().chain(ends.keys()).copied().collect();
    coords.sort_unstable();
    coords.dedup();
    let mut tree = SegTree::new(nb);
    let mut out = Vec::new();
    let none = Vec::new();
    for a in coords {
        let e = ends.get(&a).unwrap_or(&none);
        let s = starts.get(&a).unwrap_or(&none);
        for &(lo, hi) in e {
            tree.update(lo, hi, -1);
        }
        for (lo, hi, ending) in sym_diff(&merge(e.clone()), &merge(s.clone())) {
            for (z0, z1) in tree.zeros(lo, hi) {
                out.push((a, z0, z1, ending));
            }
        }
        for &(lo, hi) in s {
            tree.update(lo, hi, 1);
        }
    }
    out
}

#[derive(Clone, Copy)]
struct Edge {
    from: (usize, usize),
    to: (usize, usize),
}

fn direction(e: &Edge) -> (i64, i64) {
    let dx = (e.to.0 as i64 - e.from.0 as i64).signum();
    let dy = (e.to.1 as i64 - e.from.1 as i64).signum();
    (dx, dy)
}

/// Preference of turning from `d` into `n`: left, straight, right, back.
fn turn_rank(d: (i64, i64), n: (i64, i64)) -> u8 {
    let cross = d.0 * n.1 - d.1 * n.0;
    let dot = d.0 * n.0 + d.1 * n.1;
    match (cross, dot) {
        (c, _) if c > 0 => 0,
        (0, p) if p > 0 => 1,
        (c, _) if c < 0 => 2,
        _ => 3,
    }
}

fn signed_area(v: &[[f64; 2]]) -> f64 {
    v.windows(2).map(|w| w[0][0] * w[1][1] - w[1][0] * w[0][1]).sum::<f64>() * 0.5
}

/// Counterclockwise outer boundary of the union of open squares.
///
/// Squares touching only at a corner stay separate; slits between squares that share an edge are closed.
pub fn outer_boundary(rects: &[Rect]) -> Result<Vec<[f64; 2]>, CoverError> {
    if rects.is_empty() {
        return Err(CoverError::NotEnclosing { components: 0 });
    }
    let scale = rects.iter().fold(0.0f64, |m, r| m.max(r.hi[0].abs()).max(r.hi[1].abs()).max(r.lo[0].abs()).max(r.lo[1].abs()));
    let tol = 1e-12 * scale.max(1e-300);
    let xs = Axis::new(rects.iter().flat_map(|r| [r.lo[0], r.hi[0]]).collect(), tol);
    let ys = Axis::new(rects.iter().flat_map(|r| [r.lo[1], r.hi[1]]).collect(), tol);
    let idx: Vec<[usize; 4]> = rects
        .iter()
        .map(|r| [xs.id(r.lo[0], tol), xs.id(r.hi[0], tol), ys.id(r.lo[1], tol), ys.id(r.hi[1], tol)])
        .filter(|r| r[0] < r[1] && r[2] < r[3])
        .collect();
    let mut edges: Vec<Edge> = Vec::new();
    for (x, lo, hi, ending) in sweep(&idx, ys.0.len()) {
        // region on the left: go up
        edges.push(if ending { Edge { from: (x, lo), to: (x, hi) } } else { Edge { from: (x, hi), to: (x, lo) } });
    }
    let flipped: Vec<[usize; 4]> = idx.iter().map(|r| [r[2], r[3], r[0], r[1]]).collect();
    for (y, lo, hi, ending) in sweep(&flipped, xs.0.len()) {
        // region below: go west
        edges.push(if ending { Edge { from: (hi, y), to: (lo, y) } } else { Edge { from: (lo, y), to: (hi, y) } });
    }
    let mut out_of: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, e) in edges.iter().enumerate() {
        out_of.entry(e.from).or_default().push(i);
    }
    let next = |i: usize| -> Option<usize> {
        let d = direction(&edges[i]);
        out_of.get(&edges[i].to)?.iter().copied().min_by_key(|&j| turn_rank(d, direction(&edges[j])))
    };
    let mut used = vec![false; edges.len()];
    let mut cycles: Vec<Vec<[f64; 2]>> = Vec::new();
    for start in 0..edges.len() {
        if used[start] {
            continue;
        }
        let mut cyc = vec![edges[start].from];
        let mut cur = start;
        loop {
            used[cur] = true;
            cyc.push(edges[cur].to);
            match next(cur) {
                Some(j) if j == start => break,
                Some(j) if !used[j] => cur = j,
                _ => {
                    return Err(CoverError::Certification { what: "boundary tracing closed up".into(), level: 0 })
                }
            }
        }
        cycles.push(simplify(&cyc).into_iter().map(|(i, j)| [xs.0[i], ys.0[j]]).collect());
    }
    let outer: Vec<&Vec<[f64; 2]>> = cycles.iter().filter(|c| signed_area(c) > 0.0).collect();
    // islands inside holes do not touch the unbounded component
    let top: Vec<&Vec<[f64; 2]>> = outer
        .iter()
        .filter(|c| {
            let p = interior_probe(c);
            !outer.iter().any(|o| !std::ptr::eq(*o, **c) && point_in_polygon(o, p))
        })
        .copied()
        .collect();
    if top.len() != 1 {
        return Err(CoverError::NotEnclosing { components: top.len() });
    }
    Ok(top[0].clone())
}

/// A point just inside the first edge of a counterclockwise cycle.
fn interior_probe(c: &[[f64; 2]]) -> [f64; 2] {
    let (a, b) = (c[0], c[1]);
    let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
    let len = (b[0] - a[0]).abs() + (b[1] - a[1]).abs();
    let eps = 1e-9 * len;
    // interior lies to the left of the direction of travel
    let d = [(b[0] - a[0]) / len, (b[1] - a[1]) / len];
    [m[0] - d[1] * eps, m[1] + d[0] * eps]
}

/// Drops vertices in the middle of straight runs; keeps the closing repeat.
fn simplify(c: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let n = c.len() - 1;
    let straight = |a: (usize, usize), b: (usize, usize), d: (usize, usize)| (a.0 == b.0 && b.0 == d.0) || (a.1 == b.1 && b.1 == d.1);
    let mut keep: Vec<(usize, usize)> = (0..n).filter(|&i| !straight(c[(i + n - 1) % n], c[i], c[i + 1])).map(|i| c[i]).collect();
    keep.push(keep[0]);
    keep
}

/// `α_n`: the loop around `U_n` together with sup-norm squares of half-side `δ^(n-1)` around `H`.
pub fn surrounding_loop(seq: &CoverSequence, n: u32) -> Result<LoopResult, CoverError> {
    if n == 0 || n as usize > seq.layers.len() {
        return Err(CoverError::BadParameter(format!("level {n} outside 1..={}", seq.layers.len())));
    }
    let h_radius = seq.constants.delta_f64().powi(n as i32 - 1);
    let mut rects: Vec<Rect> = seq.layer_squares(n).copied().collect();
    for (x, _) in &seq.h_points {
        rects.push(Rect { lo: [x.x() - h_radius, x.y() - h_radius], hi: [x.x() + h_radius, x.y() + h_radius] });
    }
    let vertices = outer_boundary(&rects)?;
    let length = vertices.windows(2).map(|w| (w[1][0] - w[0][0]).abs() + (w[1][1] - w[0][1]).abs()).sum();
    let layer = &seq.layers[n as usize - 1];
    let bound = layer.boundary_length + 8.0 * h_radius * seq.h_points.len() as f64;
    let contacts = contacts(&vertices, &seq.approx);
    Ok(LoopResult {
        n,
        vertices,
        length,
        bound,
        contacts,
        h_radius,
        squares: rects.len(),
        provenance: "H neighborhoods are sup-norm squares".into(),
    })
}

/// `true` when every contact lies in the closed sup-norm `radius`-neighborhood of some point.
pub fn contacts_near(contacts: &[[f64; 2]], points: &[Point], radius: f64) -> bool {
    contacts.iter().all(|c| points.iter().any(|x| (c[0] - x.x()).abs().max((c[1] - x.y()).abs()) <= radius))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sq(x: f64, y: f64, s: f64) -> Rect {
        Rect { lo: [x, y], hi: [x + s, y + s] }
    }

    fn perimeter(v: &[[f64; 2]]) -> f64 {
        v.windows(2).map(|w| (w[1][0] - w[0][0]).abs() + (w[1][1] - w[0][1]).abs()).sum()
    }

    #[test]
    fn single_square() {
        let v = outer_boundary(&[sq(0.0, 0.0, 0.5)]).unwrap();
        assert_eq!(v.len(), 5);
        assert_eq!(perimeter(&v), 2.0);
        assert!(signed_area(&v) > 0.0);
    }

    #[test]
    fn overlapping_pair() {
        let v = outer_boundary(&[sq(0.0, 0.0, 1.0), sq(0.5, 0.5, 1.0)]).unwrap();
        assert_eq!(v.len(), 9);
        assert!((perimeter(&v) - 6.0).abs() < 1e-12);
        assert!((signed_area(&v) - 1.75).abs() < 1e-12);
        assert!(is_simple(&v));
    }

    #[test]
    fn corner_contact_is_two_components() {
        let e = outer_boundary(&[sq(0.0, 0.0, 1.0), sq(1.0, 1.0, 1.0)]).unwrap_err();
        assert_eq!(e, CoverError::NotEnclosing { components: 2 });
    }

    #[test]
    fn ring_ignores_hole_and_island() {
        let mut rects = Vec::new();
        for (x, y) in [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (0.0, 1.0), (2.0, 1.0), (0.0, 2.0), (1.0, 2.0), (2.0, 2.0)] {
            rects.push(sq(x, y, 1.0));
        }
        rects.push(sq(1.25, 1.25, 0.5));
        let v = outer_boundary(&rects).unwrap();
        assert_eq!(perimeter(&v), 12.0);
        assert!(point_in_polygon(&v, [1.5, 1.5]));
        assert!(!point_in_polygon(&v, [3.5, 1.5]));
    }

    #[test]
    fn shared_edge_closes_slit() {
        let v = outer_boundary(&[sq(0.0, 0.0, 1.0), sq(1.0, 0.0, 1.0)]).unwrap();
        assert_eq!(v.len(), 5);
        assert_eq!(perimeter(&v), 6.0);
    }
}
