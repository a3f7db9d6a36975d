use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::geom::{Cell, CellOracle, CellSet, Dim, Resolution};
use crate::num::{self, Rational};

use super::ObstacleError;

/// Rectangles materialized at most.
const RECT_LIMIT: u128 = 2_000_000;
/// Strip-by-row work allowed in the crossing DP.
const DP_LIMIT: u128 = 20_000_000_000;

/// Bedford-McMullen pattern: kept cells `(i, j)` of an `n x m` grid.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PatternFile", into = "PatternFile")]
pub struct BmcPattern {
    n: u32,
    m: u32,
    cells: BTreeSet<(u32, u32)>,
}

#[derive(Serialize, Deserialize)]
struct PatternFile {
    n: u32,
    m: u32,
    cells: Vec<[u32; 2]>,
}

impl TryFrom<PatternFile> for BmcPattern {
    type Error = ObstacleError;

    fn try_from(f: PatternFile) -> Result<Self, Self::Error> {
        BmcPattern::new(f.n, f.m, f.cells.into_iter().map(|[i, j]| (i, j)))
    }
}

impl From<BmcPattern> for PatternFile {
    fn from(p: BmcPattern) -> Self {
        PatternFile { n: p.n, m: p.m, cells: p.cells.into_iter().map(|(i, j)| [i, j]).collect() }
    }
}

impl BmcPattern {
    pub fn new(n: u32, m: u32, cells: impl IntoIterator<Item = (u32, u32)>) -> Result<BmcPattern, ObstacleError> {
        if n < 2 || m < 2 || n > 1000 || m > 1000 {
            return Err(ObstacleError::Pattern(format!("grid {n} x {m} outside 2..=1000")));
        }
        let cells: BTreeSet<(u32, u32)> = cells.into_iter().collect();
        if let Some(c) = cells.iter().find(|(i, j)| *i >= n || *j >= m) {
            return Err(ObstacleError::Pattern(format!("cell {c:?} outside the {n} x {m} grid")));
        }
        Ok(BmcPattern { n, m, cells })
    }

    pub fn empty(n: u32, m: u32) -> Result<BmcPattern, ObstacleError> {
        BmcPattern::new(n, m, [])
    }

    pub fn full(n: u32, m: u32) -> Result<BmcPattern, ObstacleError> {
        BmcPattern::new(n, m, (0..n).flat_map(|i| (0..m).map(move |j| (i, j))))
    }

    pub fn from_json(text: &str) -> Result<BmcPattern, ObstacleError> {
        serde_json::from_str(text).map_err(|e| ObstacleError::Pattern(e.to_string()))
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn cells(&self) -> &BTreeSet<(u32, u32)> {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, i: u32, j: u32) -> bool {
        self.cells.contains(&(i, j))
    }

    /// `R ∪ (R + (0, m))` on the `n x 2m` grid.
    pub fn doubled(&self) -> BTreeSet<(u32, u32)> {
        self.cells.iter().flat_map(|&(i, j)| [(i, j), (i, j + self.m)]).collect()
    }

    /// Kept rows of column `i`, as a lookup table.
    fn column(&self, i: u32) -> Vec<bool> {
        (0..self.m).map(|j| self.contains(i, j)).collect()
    }
}

/// The 48 x 10 pattern `{(2i, j) : j ≢ 5i + 7 (mod 10)}`.
pub fn bmc_pattern() -> BmcPattern {
    let cells = (0..24u32).flat_map(|i| (0..10u32).filter(move |j| *j != (5 * i + 7) % 10).map(move |j| (2 * i, j)));
    BmcPattern::new(48, 10, cells).expect("static pattern is in range")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "lowercase")]
pub enum WindowCheck {
    Pass { windows: usize },
    Fail { nu: u32, j: u32 },
}

impl WindowCheck {
    pub fn passed(&self) -> bool {
        matches!(self, WindowCheck::Pass { .. })
    }
}

/// For every block `ν` and row `j < 2m - 1`, one of the columns `4ν`, `4ν + 2` keeps rows `j` and `j + 1` of `R₂`.
pub fn bmc_window_check(p: &BmcPattern) -> Result<WindowCheck, ObstacleError> {
    if p.n % 4 != 0 {
        return Err(ObstacleError::Pattern(format!("{} columns is not a multiple of 4", p.n)));
    }
    let r2 = p.doubled();
    let mut windows = 0;
    for nu in 0..p.n / 4 {
        for j in 0..=2 * p.m - 2 {
            windows += 1;
            let ok = [4 * nu, 4 * nu + 2].iter().any(|&i| r2.contains(&(i, j)) && r2.contains(&(i, j + 1)));
            if !ok {
                return Ok(WindowCheck::Fail { nu, j });
            }
        }
    }
    Ok(WindowCheck::Pass { windows })
}

/// Level-`l` rectangles of `K_R`, stacked `copies` times along `y`; kept symbolically.
#[derive(Clone, Debug)]
pub struct BmcCells {
    pattern: BmcPattern,
    level: u32,
    copies: u32,
    columns: Vec<Vec<bool>>,
}

pub fn bmc_cells(p: &BmcPattern, level: u32) -> Result<BmcCells, ObstacleError> {
    BmcCells::new(p, level, 1)
}

impl BmcCells {
    /// `copies = 2` gives `K_R ∪ (K_R + (0, 1))`, the set crossed by [`min_crossing_variation`].
    pub fn new(p: &BmcPattern, level: u32, copies: u32) -> Result<BmcCells, ObstacleError> {
        if level == 0 {
            return Err(ObstacleError::BadParameter("level must be at least 1".into()));
        }
        if !(1..=4).contains(&copies) {
            return Err(ObstacleError::BadParameter(format!("{copies} copies outside 1..=4")));
        }
        let big = (p.n as u128).checked_pow(level).zip((p.m as u128).checked_pow(level));
        if big.map_or(true, |(a, b)| a.max(b) > 1 << 40) {
            return Err(ObstacleError::TooLarge { what: "pattern grid", count: u128::MAX, limit: 1 << 40 });
        }
        let columns = (0..p.n).map(|i| p.column(i)).collect();
        Ok(BmcCells { pattern: p.clone(), level, copies, columns })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn pattern(&self) -> &BmcPattern {
        &self.pattern
    }

    /// Columns and rows of the level grid: `n^l` and `copies · m^l`.
    pub fn grid(&self) -> (u64, u64) {
        let n = (self.pattern.n as u64).pow(self.level);
        let m = (self.pattern.m as u64).pow(self.level);
        (n, self.copies as u64 * m)
    }

    pub fn rectangle_count(&self) -> u128 {
        self.copies as u128 * (self.pattern.len() as u128).pow(self.level)
    }

    /// Exact area, `copies · (|R| / nm)^l`.
    pub fn measure(&self) -> Rational {
        let r = Rational::new(self.pattern.len() as i128, (self.pattern.n * self.pattern.m) as i128);
        Rational::from_integer(self.copies as i128) * r.pow(self.level as i32)
    }

    /// Whether grid rectangle `(a, b)` (column, row) is kept.
    pub fn is_kept(&self, a: u64, b: u64) -> bool {
        let (cols, rows) = self.grid();
        if a >= cols || b >= rows {
            return false;
        }
        let (n, m) = (self.pattern.n as u64, self.pattern.m as u64);
        let (mut a, mut b) = (a, b);
        for _ in 0..self.level {
            let (i, j) = ((a % n) as usize, (b % m) as usize);
            if !self.columns[i][j] {
                return false;
            }
            a /= n;
            b /= m;
        }
        true
    }

    /// Kept row indices in the strip of column `a`, ascending.
    pub fn column_rows(&self, a: u64) -> Vec<u64> {
        let n = self.pattern.n as u64;
        let mut digits = Vec::with_capacity(self.level as usize);
        let mut t = a;
        for _ in 0..self.level {
            digits.push((t % n) as usize);
            t /= n;
        }
        digits.reverse();
        let mut rows = vec![0u64];
        for (k, &i) in digits.iter().enumerate() {
            let span = if k == 0 { self.copies * self.pattern.m } else { self.pattern.m };
            let col = &self.columns[i];
            let mut next = Vec::new();
            for r in &rows {
                for j in 0..span {
                    if col[(j % self.pattern.m) as usize] {
                        next.push(r * self.pattern.m as u64 + j as u64);
                    }
                }
            }
            rows = next;
            if rows.is_empty() {
                break;
            }
        }
        rows
    }

    /// Exact corners of every kept rectangle; refuses beyond the materialization limit.
    pub fn rectangles(&self) -> Result<Vec<([Rational; 2], [Rational; 2])>, ObstacleError> {
        let count = self.rectangle_count();
        if count > RECT_LIMIT {
            return Err(ObstacleError::TooLarge { what: "carpet rectangles", count, limit: RECT_LIMIT });
        }
        let (cols, rows) = self.grid();
        let (w, h) = (Rational::new(1, cols as i128), Rational::new(self.copies as i128, rows as i128));
        let mut out = Vec::with_capacity(count as usize);
        for a in 0..cols {
            for b in self.column_rows(a) {
                let lo = [w * Rational::from_integer(a as i128), h * Rational::from_integer(b as i128)];
                out.push((lo, [lo[0] + w, lo[1] + h]));
            }
        }
        Ok(out)
    }

    /// Smallest cell cover at `res`; cells only touching a rectangle are left out.
    pub fn to_cellset(&self, res: Resolution) -> Result<CellSet, ObstacleError> {
        let mut out = CellSet::new(Dim::TWO, res, format!("carpet level {}", self.level));
        for (lo, hi) in self.rectangles()? {
            out.extend(crate::geom::rasterize_box(Dim::TWO, res, &lo, &hi)?);
        }
        Ok(out)
    }

    /// Cell oracle at `res` without materializing the rectangles.
    pub fn oracle(&self, res: Resolution) -> BmcOracle<'_> {
        BmcOracle { cells: self, res }
    }
}

/// [`CellOracle`] view of [`BmcCells`] on a square grid; cells touching a kept rectangle count.
#[derive(Clone, Copy, Debug)]
pub struct BmcOracle<'a> {
    cells: &'a BmcCells,
    res: Resolution,
}

/// Indices `a` with `[a/g, (a+1)/g]` meeting the scaled cell `[k s, (k+1) s]`, `g = g_num / g_den`.
fn touching(k: i64, side: &Rational, g_num: u64, g_den: u64) -> (i64, i64) {
    let num = *side.numer() * g_num as i128;
    let den = *side.denom() * g_den as i128;
    let lo = k as i128 * num;
    let hi = (k as i128 + 1) * num;
    // ceil(lo / den) - 1 and floor(hi / den)
    ((-(-lo).div_euclid(den) - 1) as i64, hi.div_euclid(den) as i64)
}

impl CellOracle for BmcOracle<'_> {
    fn dim(&self) -> Dim {
        Dim::TWO
    }

    fn resolution(&self) -> Resolution {
        self.res
    }

    fn contains(&self, cell: &Cell) -> bool {
        let side = self.res.side();
        let (cols, rows) = self.cells.grid();
        let (a0, a1) = touching(cell.0[0], &side, cols, 1);
        let (b0, b1) = touching(cell.0[1], &side, rows, self.cells.copies as u64);
        let (a0, a1) = (a0.max(0), a1.min(cols as i64 - 1));
        let (b0, b1) = (b0.max(0), b1.min(rows as i64 - 1));
        (a0..=a1).any(|a| (b0..=b1).any(|b| self.cells.is_kept(a as u64, b as u64)))
    }

    fn bounds(&self) -> Option<(Cell, Cell)> {
        let n = num::ceil(&(Rational::from_integer(1) / self.res.side())) as i64;
        let top = num::ceil(&(Rational::from_integer(self.cells.copies as i128) / self.res.side())) as i64;
        Some((Cell::xy(-1, -1), Cell::xy(n, top)))
    }

    fn describe(&self) -> String {
        format!("carpet level {} ({} copies)", self.cells.level, self.cells.copies)
    }
}

/// Least vertical variation of an `x`-monotone crossing of `[0,1] x [0,2]` avoiding the doubled level-`l` carpet.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "lowercase")]
pub enum CrossingBound {
    Bound {
        level: u32,
        #[serde(serialize_with = "num::ser_rational")]
        variation: Rational,
    },
    Blocked { level: u32, strip: u64 },
}

impl CrossingBound {
    pub fn variation(&self) -> Option<Rational> {
        match self {
            CrossingBound::Bound { variation, .. } => Some(*variation),
            CrossingBound::Blocked { .. } => None,
        }
    }
}

const INF: i64 = i64::MAX / 4;

/// Closed row ranges `[lo, hi]` between kept rows of a strip.
fn free_components(kept: &[u64], rows: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    let mut start = 0u64;
    for &r in kept {
        if r > start {
            out.push((start, r));
        }
        start = r + 1;
    }
    if rows > start {
        out.push((start, rows));
    }
    out
}

/// Lower bound over `x`-monotone crossings moving vertically inside the free part of each strip.
///
/// Crossing from one strip into the next needs a common free window; the value is exact for that path
/// class on the level-`l` grid, not for all curves.
pub fn min_crossing_variation(p: &BmcPattern, level: u32) -> Result<CrossingBound, ObstacleError> {
    let cells = BmcCells::new(p, level, 2)?;
    let (cols, rows) = cells.grid();
    let work = cols as u128 * (rows as u128 + 1);
    if work > DP_LIMIT {
        return Err(ObstacleError::TooLarge { what: "crossing DP", count: work, limit: DP_LIMIT });
    }
    let size = rows as usize + 1;
    let mut f = vec![INF; size];
    let mut g = vec![INF; size];
    let mut prev: Vec<(u64, u64)> = Vec::new();
    let mut prev_free = false;
    for a in 0..cols {
        let kept = cells.column_rows(a);
        let comps = free_components(&kept, rows);
        if comps.is_empty() {
            return Ok(CrossingBound::Blocked { level, strip: a });
        }
        let free = kept.is_empty();
        if a == 0 {
            for &(lo, hi) in &comps {
                f[lo as usize..=hi as usize].fill(0);
            }
        } else if !(free && prev_free) {
            g.fill(INF);
            // windows: open overlaps of consecutive strips' free rows
            let (mut s, mut t) = (0, 0);
            let mut any = false;
            while s < prev.len() && t < comps.len() {
                let (lo, hi) = (prev[s].0.max(comps[t].0), prev[s].1.min(comps[t].1));
                if lo < hi {
                    any = true;
                    let (lo, hi) = (lo as usize, hi as usize);
                    g[lo..=hi].copy_from_slice(&f[lo..=hi]);
                }
                if prev[s].1 < comps[t].1 {
                    s += 1;
                } else {
                    t += 1;
                }
            }
            if !any {
                return Ok(CrossingBound::Blocked { level, strip: a });
            }
            for &(lo, hi) in &comps {
                let (lo, hi) = (lo as usize, hi as usize);
                for z in lo + 1..=hi {
                    g[z] = g[z].min(g[z - 1] + 1);
                }
                for z in (lo..hi).rev() {
                    g[z] = g[z].min(g[z + 1] + 1);
                }
            }
            std::mem::swap(&mut f, &mut g);
        }
        prev = comps;
        prev_free = free;
    }
    let best = prev.iter().flat_map(|&(lo, hi)| f[lo as usize..=hi as usize].iter().copied()).min().unwrap_or(INF);
    if best >= INF {
        return Ok(CrossingBound::Blocked { level, strip: cols - 1 });
    }
    let unit = (p.m as i128).pow(level);
    Ok(CrossingBound::Bound { level, variation: Rational::new(best as i128, unit) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_pattern_counts() {
        let p = bmc_pattern();
        assert_eq!(p.len(), 216);
        assert!(!p.contains(0, 7));
        assert!(!p.contains(2, 2));
        for i in 0..48 {
            let kept = (0..10).filter(|&j| p.contains(i, j)).count();
            assert_eq!(kept, if i % 2 == 0 { 9 } else { 0 });
        }
    }

    #[test]
    fn window_check_cases() {
        assert_eq!(bmc_window_check(&bmc_pattern()).unwrap(), WindowCheck::Pass { windows: 228 });
        assert!(bmc_window_check(&BmcPattern::full(48, 10).unwrap()).unwrap().passed());
        assert_eq!(bmc_window_check(&BmcPattern::empty(48, 10).unwrap()).unwrap(), WindowCheck::Fail { nu: 0, j: 0 });
    }

    #[test]
    fn level_one_rows_match_pattern() {
        let c = bmc_cells(&bmc_pattern(), 1).unwrap();
        assert_eq!(c.column_rows(0), vec![0, 1, 2, 3, 4, 5, 6, 8, 9]);
        assert!(c.column_rows(1).is_empty());
        assert_eq!(c.rectangles().unwrap().len(), 216);
        assert_eq!(c.measure(), Rational::new(9, 20));
    }

    #[test]
    fn crossing_of_empty_and_full() {
        let e = min_crossing_variation(&BmcPattern::empty(4, 3).unwrap(), 2).unwrap();
        assert_eq!(e.variation(), Some(Rational::from_integer(0)));
        let f = min_crossing_variation(&BmcPattern::full(4, 3).unwrap(), 1).unwrap();
        assert!(matches!(f, CrossingBound::Blocked { .. }));
    }

    #[test]
    fn crossing_level_one_by_hand() {
        // gaps alternate between rows 7/17 and 2/12; each switch costs 4 rows of 1/10
        let b = min_crossing_variation(&bmc_pattern(), 1).unwrap();
        assert_eq!(b.variation(), Some(Rational::new(23 * 4, 10)));
    }

    #[test]
    fn pattern_json_round_trip() {
        let p = bmc_pattern();
        let text = serde_json::to_string(&p).unwrap();
        assert_eq!(BmcPattern::from_json(&text).unwrap(), p);
        assert!(BmcPattern::from_json(r#"{"n":4,"m":2,"cells":[[4,0]]}"#).is_err());
    }

    #[test]
    fn oracle_matches_materialized_cells() {
        let p = BmcPattern::new(4, 3, [(0, 0), (1, 2), (3, 1), (2, 0)]).unwrap();
        let b = BmcCells::new(&p, 2, 2).unwrap();
        for res in [Resolution::dyadic(5), Resolution::new(Rational::new(1, 36)).unwrap(), Resolution::new(Rational::new(3, 50)).unwrap()] {
            let set = b.to_cellset(res).unwrap();
            let rects = b.rectangles().unwrap();
            let or = b.oracle(res);
            let n = (Rational::from_integer(3) / res.side()).to_integer() as i64;
            for i in -2..n {
                for j in -2..n {
                    let c = Cell::xy(i, j);
                    let (lo, hi) = res.cell_box_exact(&c);
                    let touches =
                        rects.iter().any(|(a, z)| (0..2).all(|k| a[k] <= hi[k] && lo[k] <= z[k]));
                    assert_eq!(or.contains(&c), touches, "{c:?} at {}", res.side_f64());
                    assert!(!set.contains_cell(&c) || touches);
                }
            }
        }
    }
}
