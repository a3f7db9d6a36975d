use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{Dim, GeomError, Point, Segment};
use crate::num::{self, Rational};

/// Hard cap for materialized covers.
pub(crate) const CELL_LIMIT: u64 = 50_000_000;

/// Integer lattice index; the cell is the closed box `[i s, (i+1) s]` per axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell(pub [i64; 3]);

impl Cell {
    pub fn xy(i: i64, j: i64) -> Cell {
        Cell([i, j, 0])
    }

    pub fn offset(&self, d: [i64; 3]) -> Cell {
        Cell([self.0[0] + d[0], self.0[1] + d[1], self.0[2] + d[2]])
    }
}

/// Side length of the grid cells, kept exact.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Resolution {
    side: Rational,
    side_f: f64,
}

impl Resolution {
    pub fn new(side: Rational) -> Result<Resolution, GeomError> {
        if side <= Rational::from_integer(0) {
            return Err(GeomError::NonPositive("resolution"));
        }
        Ok(Resolution { side, side_f: num::to_f64(&side) })
    }

    /// Side `2^-level`.
    pub fn dyadic(level: u32) -> Resolution {
        let side = Rational::new(1, 1i128 << level.min(120));
        Resolution { side, side_f: num::to_f64(&side) }
    }

    /// Largest dyadic side not above `side`.
    pub fn dyadic_at_most(side: f64) -> Resolution {
        let mut level = 0;
        while level < 60 && 0.5f64.powi(level as i32) > side {
            level += 1;
        }
        Resolution::dyadic(level)
    }

    pub fn side(&self) -> Rational {
        self.side
    }

    pub fn side_f64(&self) -> f64 {
        self.side_f
    }

    pub fn diagonal(&self, dim: Dim) -> f64 {
        self.side_f * (dim.get() as f64).sqrt()
    }

    /// The cell whose half-open box `[i s, (i+1) s)` holds the point.
    pub fn cell_of(&self, x: &[f64; 3]) -> Cell {
        let mut c = [0i64; 3];
        for k in 0..3 {
            c[k] = (x[k] / self.side_f).floor() as i64;
        }
        Cell(c)
    }

    pub fn lower(&self, c: &Cell) -> [f64; 3] {
        let s = self.side_f;
        [c.0[0] as f64 * s, c.0[1] as f64 * s, c.0[2] as f64 * s]
    }

    pub fn center(&self, c: &Cell) -> [f64; 3] {
        let s = self.side_f;
        [
            (c.0[0] as f64 + 0.5) * s,
            (c.0[1] as f64 + 0.5) * s,
            (c.0[2] as f64 + 0.5) * s,
        ]
    }

    /// Closed box of the cell in floating point.
    pub fn cell_box(&self, c: &Cell) -> ([f64; 3], [f64; 3]) {
        let lo = self.lower(c);
        let s = self.side_f;
        (lo, [lo[0] + s, lo[1] + s, lo[2] + s])
    }

    pub fn cell_box_exact(&self, c: &Cell) -> ([Rational; 3], [Rational; 3]) {
        let mut lo = [Rational::from_integer(0); 3];
        let mut hi = lo;
        for k in 0..3 {
            lo[k] = self.side * Rational::from_integer(c.0[k] as i128);
            hi[k] = lo[k] + self.side;
        }
        (lo, hi)
    }

    /// Index range of cells whose closed interval can meet `[lo, hi]`, padded by one.
    pub(crate) fn span(&self, lo: f64, hi: f64) -> (i64, i64) {
        let s = self.side_f;
        ((lo / s).floor() as i64 - 1, (hi / s).floor() as i64 + 1)
    }
}

/// Anything that can answer "is this cell an obstacle cell".
pub trait CellOracle: Sync {
    fn dim(&self) -> Dim;
    fn resolution(&self) -> Resolution;
    fn contains(&self, cell: &Cell) -> bool;
    /// Inclusive bounds of the occupied cells, if known.
    fn bounds(&self) -> Option<(Cell, Cell)>;
    fn describe(&self) -> String;
}

/// A finite set of closed grid cells covering some target set.
#[derive(Clone, Debug, PartialEq)]
pub struct CellSet {
    dim: Dim,
    resolution: Resolution,
    cells: BTreeSet<Cell>,
    provenance: String,
}

impl CellSet {
    pub fn new(dim: Dim, resolution: Resolution, provenance: impl Into<String>) -> CellSet {
        CellSet { dim, resolution, cells: BTreeSet::new(), provenance: provenance.into() }
    }

    pub fn from_cells(
        dim: Dim,
        resolution: Resolution,
        provenance: impl Into<String>,
        cells: impl IntoIterator<Item = Cell>,
    ) -> CellSet {
        let mut set = CellSet::new(dim, resolution, provenance);
        set.cells.extend(cells);
        set
    }

    /// Materializes an oracle inside its bounds.
    pub fn from_oracle(oracle: &dyn CellOracle) -> Result<CellSet, GeomError> {
        let mut set = CellSet::new(oracle.dim(), oracle.resolution(), oracle.describe());
        if let Some((lo, hi)) = oracle.bounds() {
            let mut count: u64 = 1;
            for k in 0..oracle.dim().get() {
                count = count.saturating_mul((hi.0[k] - lo.0[k] + 1).max(0) as u64);
            }
            if count > CELL_LIMIT {
                return Err(GeomError::TooManyCells(count));
            }
            let d = oracle.dim().get();
            let zr = |k: usize, v: i64| if k < d { v } else { 0 };
            for i in lo.0[0]..=hi.0[0] {
                for j in zr(1, lo.0[1])..=zr(1, hi.0[1]) {
                    for l in zr(2, lo.0[2])..=zr(2, hi.0[2]) {
                        let c = Cell([i, j, l]);
                        if oracle.contains(&c) {
                            set.cells.insert(c);
                        }
                    }
                }
            }
        }
        Ok(set)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    pub fn provenance(&self) -> &str {
        &self.provenance
    }

    pub fn with_provenance(mut self, provenance: impl Into<String>) -> CellSet {
        self.provenance = provenance.into();
        self
    }

    pub fn insert(&mut self, c: Cell) -> bool {
        self.cells.insert(c)
    }

    pub fn extend(&mut self, cells: impl IntoIterator<Item = Cell>) {
        self.cells.extend(cells)
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Cell> + '_ {
        self.cells.iter()
    }

    pub fn contains_cell(&self, c: &Cell) -> bool {
        self.cells.contains(c)
    }

    /// Whether the point lies in the union of the closed cells.
    pub fn contains_point(&self, p: &Point) -> bool {
        let s = self.resolution.side_f;
        let a = p.array();
        let d = self.dim.get();
        let mut cand: [Vec<i64>; 3] = [vec![0], vec![0], vec![0]];
        for k in 0..d {
            let q = a[k] / s;
            let f = q.floor();
            cand[k] = if q == f { vec![f as i64 - 1, f as i64] } else { vec![f as i64] };
        }
        for &i in &cand[0] {
            for &j in &cand[1] {
                for &l in &cand[2] {
                    if self.cells.contains(&Cell([i, j, l])) {
                        return true;
                    }
                }
            }
        }
        false
    }

    fn check_compatible(&self, other: &CellSet) -> Result<(), GeomError> {
        if self.dim != other.dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim.get(),
                found: other.dim.get(),
            });
        }
        if self.resolution.side != other.resolution.side {
            return Err(GeomError::ResolutionMismatch);
        }
        Ok(())
    }

    pub fn union(&self, other: &CellSet) -> Result<CellSet, GeomError> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.cells.extend(other.cells.iter().copied());
        out.provenance = format!("{} | {}", self.provenance, other.provenance);
        Ok(out)
    }

    pub fn intersection(&self, other: &CellSet) -> Result<CellSet, GeomError> {
        self.check_compatible(other)?;
        Ok(CellSet {
            dim: self.dim,
            resolution: self.resolution,
            cells: self.cells.intersection(&other.cells).copied().collect(),
            provenance: format!("{} & {}", self.provenance, other.provenance),
        })
    }

    pub fn is_subset(&self, other: &CellSet) -> Result<bool, GeomError> {
        self.check_compatible(other)?;
        Ok(self.cells.is_subset(&other.cells))
    }

    /// Adds every cell within `k` steps in the sup metric.
    pub fn dilate(&self, k: i64) -> CellSet {
        let stencil = cube_stencil(self.dim, k);
        let mut cells = BTreeSet::new();
        for c in &self.cells {
            for d in &stencil {
                cells.insert(c.offset(*d));
            }
        }
        CellSet {
            dim: self.dim,
            resolution: self.resolution,
            cells,
            provenance: format!("dilate({}, {k})", self.provenance),
        }
    }

    /// Connected components of the union of closed cells (corner contact connects).
    pub fn components(&self) -> Vec<Vec<Cell>> {
        let stencil = cube_stencil(self.dim, 1);
        let mut seen: BTreeSet<Cell> = BTreeSet::new();
        let mut out = Vec::new();
        for start in &self.cells {
            if seen.contains(start) {
                continue;
            }
            let mut comp = vec![*start];
            seen.insert(*start);
            let mut head = 0;
            while head < comp.len() {
                let c = comp[head];
                head += 1;
                for d in &stencil {
                    let n = c.offset(*d);
                    if self.cells.contains(&n) && seen.insert(n) {
                        comp.push(n);
                    }
                }
            }
            comp.sort();
            out.push(comp);
        }
        out
    }

    /// Lebesgue measure of the union, exact.
    pub fn measure(&self) -> Rational {
        let mut vol = Rational::from_integer(1);
        for _ in 0..self.dim.get() {
            vol *= self.resolution.side;
        }
        vol * Rational::from_integer(self.cells.len() as i128)
    }

    pub fn cell_bounds(&self) -> Option<(Cell, Cell)> {
        let mut it = self.cells.iter();
        let first = *it.next()?;
        let (mut lo, mut hi) = (first.0, first.0);
        for c in it {
            for k in 0..3 {
                lo[k] = lo[k].min(c.0[k]);
                hi[k] = hi[k].max(c.0[k]);
            }
        }
        Some((Cell(lo), Cell(hi)))
    }

    pub fn centers(&self) -> Vec<Point> {
        self.cells
            .iter()
            .map(|c| Point::from_array(self.dim, self.resolution.center(c)))
            .collect()
    }

    /// Re-expresses the cover on a finer grid whose side divides this one.
    pub fn refine_to(&self, finer: Resolution) -> Result<CellSet, GeomError> {
        let ratio = self.resolution.side / finer.side;
        if !ratio.is_integer() || ratio < Rational::from_integer(1) {
            return Err(GeomError::ResolutionMismatch);
        }
        let f = *ratio.numer() as i64;
        let mut count = self.cells.len() as u64;
        for _ in 0..self.dim.get() {
            count = count.saturating_mul(f as u64);
        }
        if count > CELL_LIMIT {
            return Err(GeomError::TooManyCells(count));
        }
        let d = self.dim.get();
        let ext = |k: usize| if k < d { f } else { 1 };
        let mut cells = BTreeSet::new();
        for c in &self.cells {
            for a in 0..ext(0) {
                for b in 0..ext(1) {
                    for e in 0..ext(2) {
                        cells.insert(Cell([c.0[0] * f + a, c.0[1] * f + b, c.0[2] * f + e]));
                    }
                }
            }
        }
        Ok(CellSet { dim: self.dim, resolution: finer, cells, provenance: self.provenance.clone() })
    }
}

impl CellOracle for CellSet {
    fn dim(&self) -> Dim {
        self.dim
    }
    fn resolution(&self) -> Resolution {
        self.resolution
    }
    fn contains(&self, cell: &Cell) -> bool {
        self.cells.contains(cell)
    }
    fn bounds(&self) -> Option<(Cell, Cell)> {
        self.cell_bounds()
    }
    fn describe(&self) -> String {
        self.provenance.clone()
    }
}

pub(crate) fn cube_stencil(dim: Dim, k: i64) -> Vec<[i64; 3]> {
    let d = dim.get();
    let r = |axis: usize| if axis < d { k } else { 0 };
    let mut out = Vec::new();
    for a in -r(0)..=r(0) {
        for b in -r(1)..=r(1) {
            for c in -r(2)..=r(2) {
                out.push([a, b, c]);
            }
        }
    }
    out
}

fn box_point_dist(lo: &[f64; 3], hi: &[f64; 3], p: &[f64; 3], d: usize) -> f64 {
    let mut acc = 0.0;
    for k in 0..d {
        let e = if p[k] < lo[k] {
            lo[k] - p[k]
        } else if p[k] > hi[k] {
            p[k] - hi[k]
        } else {
            0.0
        };
        acc += e * e;
    }
    acc.sqrt()
}

/// Euclidean distance between a closed box and a segment.
pub fn box_segment_dist(lo: &[f64; 3], hi: &[f64; 3], a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let f = |t: f64| {
        let p = [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]), a[2] + t * (b[2] - a[2])];
        box_point_dist(lo, hi, &p, 3)
    };
    // convex in t
    let (mut l, mut r) = (0.0f64, 1.0f64);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = r - g * (r - l);
    let mut x2 = l + g * (r - l);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..80 {
        if f1 <= f2 {
            r = x2;
            x2 = x1;
            f2 = f1;
            x1 = r - g * (r - l);
            f1 = f(x1);
        } else {
            l = x1;
            x1 = x2;
            f1 = f2;
            x2 = l + g * (r - l);
            f2 = f(x2);
        }
    }
    f(0.0).min(f(1.0)).min(f1).min(f2)
}

/// Cells whose closed box meets the closed ball, padded by `pad`.
pub fn rasterize_ball(
    dim: Dim,
    res: Resolution,
    center: &[f64; 3],
    radius: f64,
    pad: f64,
) -> Result<Vec<Cell>, GeomError> {
    let d = dim.get();
    let reach = radius + pad;
    let mut ranges = [(0i64, 0i64); 3];
    let mut count: u64 = 1;
    for k in 0..d {
        ranges[k] = res.span(center[k] - reach, center[k] + reach);
        count = count.saturating_mul((ranges[k].1 - ranges[k].0 + 1) as u64);
    }
    if count > CELL_LIMIT {
        return Err(GeomError::TooManyCells(count));
    }
    let mut out = Vec::new();
    for i in ranges[0].0..=ranges[0].1 {
        for j in ranges[1].0..=ranges[1].1 {
            for l in ranges[2].0..=ranges[2].1 {
                let c = Cell([i, j, l]);
                let (lo, hi) = res.cell_box(&c);
                if box_point_dist(&lo, &hi, center, d) <= reach {
                    out.push(c);
                }
            }
        }
    }
    Ok(out)
}

/// Smallest set of closed cells whose union holds the exact box `[lo, hi]`.
pub fn rasterize_box(dim: Dim, res: Resolution, lo: &[Rational], hi: &[Rational]) -> Result<Vec<Cell>, GeomError> {
    let d = dim.get();
    if lo.len() != d || hi.len() != d {
        return Err(GeomError::DimensionMismatch { expected: d, found: lo.len().min(hi.len()) });
    }
    let mut ranges = [(0i64, 0i64); 3];
    let mut count: u64 = 1;
    for k in 0..d {
        let a = lo[k] / res.side;
        let b = hi[k] / res.side;
        let first = num::floor(&a) as i64;
        let last = if b > a { (num::ceil(&b) - 1) as i64 } else { first };
        ranges[k] = (first, last.max(first));
        count = count.saturating_mul((ranges[k].1 - ranges[k].0 + 1) as u64);
    }
    if count > CELL_LIMIT {
        return Err(GeomError::TooManyCells(count));
    }
    let mut out = Vec::with_capacity(count as usize);
    for i in ranges[0].0..=ranges[0].1 {
        for j in ranges[1].0..=ranges[1].1 {
            for l in ranges[2].0..=ranges[2].1 {
                out.push(Cell([i, j, l]));
            }
        }
    }
    Ok(out)
}

/// Parameter intervals (merged, closed) on which a planar segment meets the cells.
pub fn segment_cell_contacts(a: &[f64; 3], b: &[f64; 3], cells: &dyn CellOracle) -> Vec<(f64, f64)> {
    let res = cells.resolution();
    let s = res.side_f64();
    let tol = 1e-12 * s.max(1e-300);
    let dx = b[0] - a[0];
    let dy = b[1] - a[1];
    // t-interval where a coordinate stays inside [lo, hi]
    let window = |p0: f64, dp: f64, lo: f64, hi: f64| -> Option<(f64, f64)> {
        if dp == 0.0 {
            return if p0 >= lo - tol && p0 <= hi + tol { Some((0.0, 1.0)) } else { None };
        }
        let t1 = (lo - tol - p0) / dp;
        let t2 = (hi + tol - p0) / dp;
        let (u, v) = if t1 < t2 { (t1, t2) } else { (t2, t1) };
        let (u, v) = (u.max(0.0), v.min(1.0));
        (u <= v).then_some((u, v))
    };
    let mut hits: Vec<(f64, f64)> = Vec::new();
    let (ci0, ci1) = res.span(a[0].min(b[0]), a[0].max(b[0]));
    for i in ci0..=ci1 {
        let xlo = i as f64 * s;
        let Some((t0, t1)) = window(a[0], dx, xlo, xlo + s) else { continue };
        let ya = a[1] + t0 * dy;
        let yb = a[1] + t1 * dy;
        let (cj0, cj1) = res.span(ya.min(yb), ya.max(yb));
        for j in cj0..=cj1 {
            let c = Cell::xy(i, j);
            if !cells.contains(&c) {
                continue;
            }
            let ylo = j as f64 * s;
            if let Some((u, v)) = window(a[1], dy, ylo, ylo + s) {
                let (u, v) = (u.max(t0), v.min(t1));
                if u <= v {
                    hits.push((u, v));
                }
            }
        }
    }
    merge_intervals(hits, 1e-12)
}

pub(crate) fn merge_intervals(mut v: Vec<(f64, f64)>, gap: f64) -> Vec<(f64, f64)> {
    v.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (u, w) in v {
        match out.last_mut() {
            Some(last) if u <= last.1 + gap => last.1 = last.1.max(w),
            _ => out.push((u, w)),
        }
    }
    out
}

/// Input set for [`neighborhood`].
#[derive(Clone, Debug)]
pub enum Region {
    Points(Vec<Point>),
    Segments(Vec<Segment>),
    Cells(CellSet),
}

/// Conservative cell cover of `[Y]_eps` (closed) or `(Y)_eps` (open) at the given resolution.
pub fn neighborhood(
    region: &Region,
    eps: f64,
    closed: bool,
    res: Resolution,
) -> Result<CellSet, GeomError> {
    if !(eps >= 0.0) || (!closed && eps == 0.0) {
        return Err(GeomError::NonPositive("eps"));
    }
    let kind = if closed { "closed" } else { "open" };
    match region {
        Region::Points(pts) => {
            let dim = match pts.first() {
                Some(p) => p.dim(),
                None => return Ok(CellSet::new(Dim::TWO, res, format!("{kind} nbhd of nothing"))),
            };
            let mut out = CellSet::new(dim, res, format!("{kind} {eps}-nbhd of {} points", pts.len()));
            for p in pts {
                let a = p.array();
                let pad = 1e-12 * (1.0 + a.iter().fold(0.0f64, |m, x| m.max(x.abs())));
                out.extend(rasterize_ball(dim, res, &a, eps, pad)?);
            }
            Ok(out)
        }
        Region::Segments(segs) => {
            let dim = match segs.first() {
                Some(sg) => sg.start.dim(),
                None => return Ok(CellSet::new(Dim::TWO, res, format!("{kind} nbhd of nothing"))),
            };
            let d = dim.get();
            let mut out = CellSet::new(dim, res, format!("{kind} {eps}-nbhd of {} segments", segs.len()));
            for sg in segs {
                let (a, b) = (sg.start.array(), sg.end.array());
                let scale = a.iter().chain(b.iter()).fold(1.0f64, |m, x| m.max(x.abs()));
                let reach = eps + 1e-12 * scale;
                let mut ranges = [(0i64, 0i64); 3];
                let mut count: u64 = 1;
                for k in 0..d {
                    ranges[k] = res.span(a[k].min(b[k]) - reach, a[k].max(b[k]) + reach);
                    count = count.saturating_mul((ranges[k].1 - ranges[k].0 + 1) as u64);
                }
                if count > CELL_LIMIT {
                    return Err(GeomError::TooManyCells(count));
                }
                for i in ranges[0].0..=ranges[0].1 {
                    for j in ranges[1].0..=ranges[1].1 {
                        for l in ranges[2].0..=ranges[2].1 {
                            let c = Cell([i, j, l]);
                            let (lo, hi) = res.cell_box(&c);
                            if box_segment_dist(&lo, &hi, &a, &b) <= reach {
                                out.insert(c);
                            }
                        }
                    }
                }
            }
            Ok(out)
        }
        Region::Cells(set) => {
            if set.resolution.side != res.side {
                return Err(GeomError::ResolutionMismatch);
            }
            let s = res.side_f64();
            let k = (eps / s).ceil() as i64 + 1;
            let reach = eps * (1.0 + 1e-12);
            // box-to-box distance of cells offset by d is s * |max(|d|-1, 0)|
            let stencil: Vec<[i64; 3]> = cube_stencil(set.dim, k)
                .into_iter()
                .filter(|d| {
                    let g: f64 = d
                        .iter()
                        .map(|x| ((x.abs() - 1).max(0) as f64 * s).powi(2))
                        .sum();
                    g.sqrt() <= reach
                })
                .collect();
            let mut cells: HashMap<Cell, ()> = HashMap::new();
            for c in &set.cells {
                for d in &stencil {
                    cells.insert(c.offset(*d), ());
                }
            }
            Ok(CellSet::from_cells(
                set.dim,
                res,
                format!("{kind} {eps}-nbhd of {}", set.provenance),
                cells.into_keys(),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_disk_cover() {
        let res = Resolution::dyadic(3);
        let n = neighborhood(&Region::Points(vec![Point::xy(0.0, 0.0)]), 1.0, true, res).unwrap();
        for p in n.centers() {
            assert!(p.x().abs() <= 1.0 + 0.125 && p.y().abs() <= 1.0 + 0.125);
        }
        for k in 0..64 {
            let a = k as f64 * std::f64::consts::TAU / 64.0;
            assert!(n.contains_point(&Point::xy(a.cos(), a.sin())));
        }
    }

    #[test]
    fn zero_eps_is_closure() {
        let res = Resolution::dyadic(2);
        let n = neighborhood(&Region::Points(vec![Point::xy(0.0, 0.0)]), 0.0, true, res).unwrap();
        assert_eq!(n.len(), 4);
        assert!(n.contains_point(&Point::xy(0.0, 0.0)));
    }

    #[test]
    fn box_cover_is_tight() {
        let res = Resolution::dyadic(2);
        let q = |p, d| Rational::new(p, d);
        let cells = rasterize_box(Dim::TWO, res, &[q(0, 1), q(0, 1)], &[q(1, 1), q(1, 4)]).unwrap();
        assert_eq!(cells.len(), 4);
        let thin = rasterize_box(Dim::TWO, res, &[q(0, 1), q(1, 2)], &[q(1, 1), q(1, 2)]).unwrap();
        assert_eq!(thin.len(), 4);
    }

    #[test]
    fn contacts_along_edge_merge() {
        let res = Resolution::dyadic(2);
        let set = CellSet::from_cells(Dim::TWO, res, "row", (0..4).map(|i| Cell::xy(i, 0)));
        let hits = segment_cell_contacts(&[-1.0, 0.25, 0.0], &[2.0, 0.25, 0.0], &set);
        assert_eq!(hits.len(), 1);
        let miss = segment_cell_contacts(&[-1.0, 0.3, 0.0], &[2.0, 0.3, 0.0], &set);
        assert!(miss.is_empty());
    }

    #[test]
    fn components_join_at_corners() {
        let res = Resolution::dyadic(1);
        let set = CellSet::from_cells(Dim::TWO, res, "t", [Cell::xy(0, 0), Cell::xy(1, 1), Cell::xy(5, 5)]);
        assert_eq!(set.components().len(), 2);
        assert_eq!(set.measure(), Rational::new(3, 4));
    }
}
