use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use rayon::prelude::*;

use crate::geom::{segment_cell_contacts, Cell, CellOracle, Dim, Resolution};

use super::PermeabilityError;

/// Cells a search grid may hold.
pub(crate) const GRID_LIMIT: u64 = 25_000_000;
/// Turning points examined ahead of each string-pulling anchor.
const LOOKAHEAD: usize = 48;

/// Obstacle bitmap over a box of cells, with the cells the search may use.
pub(crate) struct Grid<'a> {
    oracle: &'a dyn CellOracle,
    res: Resolution,
    s: f64,
    i0: i64,
    j0: i64,
    w: usize,
    h: usize,
    blocked: Vec<bool>,
    inside: Vec<bool>,
    /// Obstacle cells in a run of at most `allowance` cells with free cells on both ends.
    thin: Vec<bool>,
}

#[derive(Clone, Copy, PartialEq)]
struct Key {
    obstacles: u32,
    f: f64,
    idx: u32,
}

impl Eq for Key {}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed for the max-heap
        other.obstacles.cmp(&self.obstacles).then(other.f.total_cmp(&self.f)).then(other.idx.cmp(&self.idx))
    }
}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

const STEPS: [(i64, i64); 8] = [(1, 0), (0, 1), (-1, 0), (0, -1), (1, 1), (-1, 1), (-1, -1), (1, -1)];

impl<'a> Grid<'a> {
    /// Grid over the cells meeting `[lo, hi]`; `usable` decides from a cell center.
    pub(crate) fn new(
        oracle: &'a dyn CellOracle,
        lo: [f64; 2],
        hi: [f64; 2],
        allowance: u32,
        usable: impl Fn([f64; 2]) -> bool + Sync,
    ) -> Result<Grid<'a>, PermeabilityError> {
        if oracle.dim() != Dim::TWO {
            return Err(PermeabilityError::Precondition(format!("obstacles are {}-dimensional", oracle.dim().get())));
        }
        let res = oracle.resolution();
        let s = res.side_f64();
        let i0 = (lo[0] / s).floor() as i64;
        let j0 = (lo[1] / s).floor() as i64;
        let i1 = (hi[0] / s).floor() as i64;
        let j1 = (hi[1] / s).floor() as i64;
        let (w, h) = ((i1 - i0 + 1) as u64, (j1 - j0 + 1) as u64);
        if w.saturating_mul(h) > GRID_LIMIT {
            return Err(PermeabilityError::TooLarge(w.saturating_mul(h)));
        }
        let (w, h) = (w as usize, h as usize);
        let rows: Vec<(Vec<bool>, Vec<bool>)> = (0..h)
            .into_par_iter()
            .map(|r| {
                let j = j0 + r as i64;
                let mut b = Vec::with_capacity(w);
                let mut u = Vec::with_capacity(w);
                for c in 0..w {
                    let i = i0 + c as i64;
                    b.push(oracle.contains(&Cell::xy(i, j)));
                    u.push(usable([(i as f64 + 0.5) * s, (j as f64 + 0.5) * s]));
                }
                (b, u)
            })
            .collect();
        let mut blocked = Vec::with_capacity(w * h);
        let mut inside = Vec::with_capacity(w * h);
        for (b, u) in rows {
            blocked.extend(b);
            inside.extend(u);
        }
        let mut grid = Grid { oracle, res, s, i0, j0, w, h, blocked, inside, thin: Vec::new() };
        grid.thin = grid.thin_cells(allowance);
        Ok(grid)
    }

    fn thin_cells(&self, allowance: u32) -> Vec<bool> {
        let mut thin = vec![false; self.w * self.h];
        if allowance == 0 {
            return thin;
        }
        let t = allowance as usize;
        let mut mark = |cells: &[usize], blocked: &[bool]| {
            let mut k = 0;
            while k < cells.len() {
                if !blocked[cells[k]] {
                    k += 1;
                    continue;
                }
                let start = k;
                while k < cells.len() && blocked[cells[k]] {
                    k += 1;
                }
                if start > 0 && k < cells.len() && k - start <= t {
                    for &c in &cells[start..k] {
                        thin[c] = true;
                    }
                }
            }
        };
        for r in 0..self.h {
            let row: Vec<usize> = (0..self.w).map(|c| r * self.w + c).collect();
            mark(&row, &self.blocked);
        }
        for c in 0..self.w {
            let col: Vec<usize> = (0..self.h).map(|r| r * self.w + c).collect();
            mark(&col, &self.blocked);
        }
        thin
    }

    fn idx(&self, i: i64, j: i64) -> Option<usize> {
        let (c, r) = (i - self.i0, j - self.j0);
        (c >= 0 && r >= 0 && (c as usize) < self.w && (r as usize) < self.h).then(|| r as usize * self.w + c as usize)
    }

    fn coords(&self, idx: usize) -> (i64, i64) {
        (self.i0 + (idx % self.w) as i64, self.j0 + (idx / self.w) as i64)
    }

    pub(crate) fn center(&self, c: (i64, i64)) -> [f64; 2] {
        [(c.0 as f64 + 0.5) * self.s, (c.1 as f64 + 0.5) * self.s]
    }

    pub(crate) fn cell_of(&self, p: [f64; 2]) -> (i64, i64) {
        ((p[0] / self.s).floor() as i64, (p[1] / self.s).floor() as i64)
    }

    pub(crate) fn is_blocked(&self, c: (i64, i64)) -> bool {
        match self.idx(c.0, c.1) {
            Some(k) => self.blocked[k],
            None => self.oracle.contains(&Cell::xy(c.0, c.1)),
        }
    }

    pub(crate) fn is_free(&self, c: (i64, i64)) -> bool {
        self.idx(c.0, c.1).is_some_and(|k| self.inside[k] && !self.blocked[k])
    }

    /// Nearest usable free cell by breadth-first search.
    pub(crate) fn nearest_free(&self, c: (i64, i64)) -> Option<(i64, i64)> {
        if self.is_free(c) {
            return Some(c);
        }
        let (ci, cj) = (c.0.clamp(self.i0, self.i0 + self.w as i64 - 1), c.1.clamp(self.j0, self.j0 + self.h as i64 - 1));
        let start = self.idx(ci, cj)?;
        let mut seen = vec![false; self.w * self.h];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(k) = queue.pop_front() {
            if self.inside[k] && !self.blocked[k] {
                return Some(self.coords(k));
            }
            let (i, j) = self.coords(k);
            for (di, dj) in &STEPS[..4] {
                if let Some(n) = self.idx(i + di, j + dj) {
                    if !seen[n] {
                        seen[n] = true;
                        queue.push_back(n);
                    }
                }
            }
        }
        None
    }

    fn passable(&self, k: usize) -> bool {
        self.inside[k] && (!self.blocked[k] || self.thin[k])
    }

    /// Fewest obstacle cells first, then shortest; 8-connected without corner cutting.
    pub(crate) fn search(&self, start: (i64, i64), goal: (i64, i64)) -> Option<Vec<(i64, i64)>> {
        let s = self.idx(start.0, start.1)?;
        let g = self.idx(goal.0, goal.1)?;
        if !self.passable(s) || !self.passable(g) {
            return None;
        }
        let n = self.w * self.h;
        let mut obst = vec![u32::MAX; n];
        let mut len = vec![f64::INFINITY; n];
        let mut parent = vec![u32::MAX; n];
        let mut done = vec![false; n];
        let heur = |k: usize| {
            let (i, j) = self.coords(k);
            let (dx, dy) = ((i - goal.0).abs() as f64, (j - goal.1).abs() as f64);
            dx.max(dy) + (std::f64::consts::SQRT_2 - 1.0) * dx.min(dy)
        };
        obst[s] = self.blocked[s] as u32;
        len[s] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(Key { obstacles: obst[s], f: heur(s), idx: s as u32 });
        while let Some(Key { idx, .. }) = heap.pop() {
            let k = idx as usize;
            if done[k] {
                continue;
            }
            done[k] = true;
            if k == g {
                break;
            }
            let (i, j) = self.coords(k);
            for (d, &(di, dj)) in STEPS.iter().enumerate() {
                let Some(nk) = self.idx(i + di, j + dj) else { continue };
                if done[nk] || !self.passable(nk) {
                    continue;
                }
                let diagonal = d >= 4;
                if diagonal {
                    let side_a = self.idx(i + di, j);
                    let side_b = self.idx(i, j + dj);
                    let clear = |x: Option<usize>| x.is_some_and(|x| self.inside[x] && !self.blocked[x]);
                    if self.blocked[nk] || self.blocked[k] || !clear(side_a) || !clear(side_b) {
                        continue;
                    }
                }
                let o = obst[k] + self.blocked[nk] as u32;
                let l = len[k] + if diagonal { std::f64::consts::SQRT_2 } else { 1.0 };
                if (o, l) < (obst[nk], len[nk]) || (o < obst[nk]) {
                    obst[nk] = o;
                    len[nk] = l;
                    parent[nk] = k as u32;
                    heap.push(Key { obstacles: o, f: l + heur(nk), idx: nk as u32 });
                }
            }
        }
        if !done[g] {
            return None;
        }
        let mut out = vec![self.coords(g)];
        let mut k = g;
        while parent[k] != u32::MAX {
            k = parent[k] as usize;
            out.push(self.coords(k));
        }
        out.reverse();
        Some(out)
    }

    /// Whether the closed segment misses every obstacle cell.
    pub(crate) fn segment_clear(&self, a: [f64; 2], b: [f64; 2]) -> bool {
        segment_cell_contacts(&[a[0], a[1], 0.0], &[b[0], b[1], 0.0], self).is_empty()
    }

    /// `from`, the cell centers and `to`, with free stretches string-pulled.
    pub(crate) fn smooth(&self, from: [f64; 2], cells: &[(i64, i64)], to: [f64; 2]) -> Vec<[f64; 2]> {
        let mut pts: Vec<([f64; 2], bool)> = Vec::with_capacity(cells.len() + 2);
        pts.push((from, false));
        for &c in cells {
            pts.push((self.center(c), self.is_blocked(c)));
        }
        pts.push((to, false));
        let pts = compress(&pts);
        let mut out = vec![pts[0].0];
        let mut i = 0;
        while i + 1 < pts.len() {
            if pts[i].1 || pts[i + 1].1 {
                i += 1;
                out.push(pts[i].0);
                continue;
            }
            let mut best = i + 1;
            let mut j = i + 2;
            while j < pts.len() && j <= i + LOOKAHEAD && !pts[j].1 {
                if self.segment_clear(pts[i].0, pts[j].0) {
                    best = j;
                }
                j += 1;
            }
            i = best;
            out.push(pts[i].0);
        }
        out
    }
}

/// Drops free interior points where the direction does not change.
fn compress(pts: &[([f64; 2], bool)]) -> Vec<([f64; 2], bool)> {
    let mut out: Vec<([f64; 2], bool)> = Vec::with_capacity(pts.len());
    for (k, p) in pts.iter().enumerate() {
        if k > 0 && k + 1 < pts.len() && !p.1 && !pts[k - 1].1 && !pts[k + 1].1 {
            let a = out.last().expect("first point kept").0;
            let b = pts[k + 1].0;
            let cross = (p.0[0] - a[0]) * (b[1] - p.0[1]) - (p.0[1] - a[1]) * (b[0] - p.0[0]);
            let dot = (p.0[0] - a[0]) * (b[0] - p.0[0]) + (p.0[1] - a[1]) * (b[1] - p.0[1]);
            let scale = (b[0] - a[0]).abs() + (b[1] - a[1]).abs();
            if cross.abs() <= 1e-12 * scale * scale && dot > 0.0 {
                continue;
            }
        }
        out.push(*p);
    }
    out
}

impl CellOracle for Grid<'_> {
    fn dim(&self) -> Dim {
        Dim::TWO
    }

    fn resolution(&self) -> Resolution {
        self.res
    }

    fn contains(&self, cell: &Cell) -> bool {
        self.is_blocked((cell.0[0], cell.0[1]))
    }

    fn bounds(&self) -> Option<(Cell, Cell)> {
        self.oracle.bounds()
    }

    fn describe(&self) -> String {
        self.oracle.describe()
    }
}
