use serde::Serialize;

use crate::geom::{CellOracle, Dim, PolyPath};

use super::grid::Grid;
use super::witness::count_intersections;
use super::PermeabilityError;

/// Window growths tried around each cluster before giving up.
const TRIES: u32 = 3;

#[derive(Clone, Debug, Serialize)]
pub struct RepairReport {
    pub vertices: Vec<[f64; 2]>,
    pub original_length: f64,
    pub repaired_length: f64,
    /// Euclidean length of the original path inside cells.
    pub covered_length: f64,
    pub c: f64,
    pub delta: f64,
    pub detours: usize,
    /// Some cluster could not be avoided; its stretch was kept or crossed.
    pub partial: bool,
    pub components_before: usize,
    pub components_after: usize,
    /// `repaired <= original + c * covered + delta`.
    pub within_budget: bool,
}

impl RepairReport {
    pub fn path(&self) -> PolyPath {
        PolyPath::from_xy(&self.vertices).expect("repaired paths have two vertices")
    }
}

fn xy(path: &PolyPath) -> Vec<[f64; 2]> {
    path.vertices().iter().map(|p| [p.x(), p.y()]).collect()
}

/// Segment index and point at arc length `at`.
fn arc_split(pts: &[[f64; 2]], at: f64) -> (usize, [f64; 2]) {
    let mut off = 0.0;
    for k in 0..pts.len() - 1 {
        let (p, q) = (pts[k], pts[k + 1]);
        let l = ((q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2)).sqrt();
        if at <= off + l {
            let t = if l > 0.0 { ((at - off) / l).clamp(0.0, 1.0) } else { 0.0 };
            return (k, [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
        }
        off += l;
    }
    (pts.len() - 2, pts[pts.len() - 1])
}

fn detour(cells: &dyn CellOracle, p: [f64; 2], q: [f64; 2], sub: &[[f64; 2]], allowance: u32) -> Option<Vec<[f64; 2]>> {
    let s = cells.resolution().side_f64();
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for v in sub.iter().chain([&p, &q]) {
        for d in 0..2 {
            lo[d] = lo[d].min(v[d]);
            hi[d] = hi[d].max(v[d]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let mut grow = (4.0 * s).max(0.5 * span);
    for _ in 0..TRIES {
        let wlo = [lo[0] - grow, lo[1] - grow];
        let whi = [hi[0] + grow, hi[1] + grow];
        let grid = Grid::new(cells, wlo, whi, allowance, |_| true).ok()?;
        let (cp, cq) = (grid.cell_of(p), grid.cell_of(q));
        if let (Some(sp), Some(sq)) = (grid.nearest_free(cp), grid.nearest_free(cq)) {
            if let Some(route) = grid.search(sp, sq) {
                let from = if sp == cp { p } else { grid.center(sp) };
                let to = if sq == cq { q } else { grid.center(sq) };
                let mut v = grid.smooth(from, &route, to);
                if from != p {
                    v.insert(0, p);
                }
                if to != q {
                    v.push(q);
                }
                return Some(v);
            }
        }
        grow *= 2.0;
    }
    None
}

/// Replaces each stretch of the path inside cells by a local detour around its cluster.
pub fn repair_path(path: &PolyPath, cells: &dyn CellOracle, c: f64, delta: f64) -> Result<RepairReport, PermeabilityError> {
    if !(c >= 1.0) || !c.is_finite() {
        return Err(PermeabilityError::BadParameter(format!("C = {c} must be at least 1")));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(PermeabilityError::BadParameter(format!("delta = {delta} must be positive")));
    }
    if path.dim() != Dim::TWO || cells.dim() != Dim::TWO {
        return Err(PermeabilityError::Precondition("repair works in the plane".into()));
    }
    let before = count_intersections(path, cells)?;
    let original = path.euclid_len();
    let pts = xy(path);
    let s = cells.resolution().side_f64();
    let pad = 2.0 * s * std::f64::consts::SQRT_2;

    // padded stretches, merged when they overlap
    let mut groups: Vec<(f64, f64)> = Vec::new();
    for comp in &before.components {
        let (a, b) = ((comp.start - pad).max(0.0), (comp.end + pad).min(original));
        match groups.last_mut() {
            Some(g) if a <= g.1 => g.1 = g.1.max(b),
            _ => groups.push((a, b)),
        }
    }

    let mut out: Vec<[f64; 2]> = vec![pts[0]];
    let mut cursor = 0usize; // next original vertex index to copy
    let mut partial = false;
    let mut detours = 0;
    for &(a, b) in &groups {
        let (ka, p) = arc_split(&pts, a);
        let (kb, q) = arc_split(&pts, b);
        out.extend_from_slice(&pts[cursor.max(1)..=ka]);
        out.push(p);
        let sub = &pts[ka + 1..=kb];
        let replacement = match detour(cells, p, q, sub, 0) {
            Some(v) => {
                detours += 1;
                Some(v)
            }
            None => {
                partial = true;
                detour(cells, p, q, sub, 2)
            }
        };
        match replacement {
            Some(v) => out.extend_from_slice(&v[1..]),
            None => {
                out.extend_from_slice(sub);
                out.push(q);
            }
        }
        cursor = kb + 1;
    }
    out.extend_from_slice(&pts[cursor.max(1)..]);
    out.dedup();
    if out.len() < 2 {
        out.push(out[0]);
    }
    let repaired = PolyPath::from_xy(&out)?;
    let after = count_intersections(&repaired, cells)?;
    let repaired_length = repaired.euclid_len();
    Ok(RepairReport {
        vertices: out,
        original_length: original,
        repaired_length,
        covered_length: before.covered_length,
        c,
        delta,
        detours,
        partial: partial || after.count > 0,
        components_before: before.count,
        components_after: after.count,
        within_budget: repaired_length <= original + c * before.covered_length + delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Cell, CellSet, Resolution};

    #[test]
    fn disjoint_path_unchanged() {
        let empty = CellSet::new(Dim::TWO, Resolution::dyadic(4), "empty");
        let p = PolyPath::from_xy(&[[0.0, 0.0], [0.3, 0.7], [1.0, 1.0]]).unwrap();
        let r = repair_path(&p, &empty, 1.0, 0.1).unwrap();
        assert_eq!(r.path(), p);
        assert_eq!(r.detours, 0);
    }

    #[test]
    fn isolated_cell_detour() {
        let res = Resolution::dyadic(4);
        let one = CellSet::from_cells(Dim::TWO, res, "one", [Cell::xy(8, 8)]);
        let p = PolyPath::from_xy(&[[0.1, 0.53], [0.9, 0.53]]).unwrap();
        let r = repair_path(&p, &one, 1.0, 0.01).unwrap();
        assert_eq!(r.components_after, 0);
        assert!(!r.partial);
        assert!(r.repaired_length - r.original_length <= 4.0 * res.side_f64(), "{}", r.repaired_length);
        assert!(r.within_budget);
    }

    #[test]
    fn rejects_bad_constant() {
        let empty = CellSet::new(Dim::TWO, Resolution::dyadic(4), "empty");
        let p = PolyPath::from_xy(&[[0.0, 0.0], [1.0, 1.0]]).unwrap();
        assert!(repair_path(&p, &empty, 0.5, 0.1).is_err());
    }
}
