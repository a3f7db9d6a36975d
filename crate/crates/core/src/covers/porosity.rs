use serde::Serialize;

use crate::geom::{CellSet, Dim};
use crate::num::{self, Rational};

use super::CoverError;

/// Bitmap cells allowed in the prefix-sum table.
const GRID_LIMIT: usize = 64_000_000;

/// An empty ball `B_{qr}(y) ⊂ B_r(x)` missing every cell.
#[derive(Clone, Debug, Serialize)]
pub struct PorosityWitness {
    pub x: [String; 2],
    pub r: String,
    pub y: [String; 2],
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum PorosityVerdict {
    QPorousEvidence,
    Violated { x: [String; 2], r: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct PorosityReport {
    pub q: String,
    pub verdict: PorosityVerdict,
    /// `(x, r)` pairs examined before the verdict.
    pub checked: usize,
    pub witnesses: Vec<PorosityWitness>,
}

impl PorosityReport {
    pub fn is_evidence(&self) -> bool {
        matches!(self.verdict, PorosityVerdict::QPorousEvidence)
    }
}

/// Occupancy of the cell set on its bounding box, with 2D prefix sums.
struct Occupancy {
    lo: [i64; 2],
    w: usize,
    h: usize,
    sums: Vec<u32>,
}

impl Occupancy {
    fn new(cells: &CellSet) -> Result<Option<Occupancy>, CoverError> {
        let Some((a, b)) = cells.cell_bounds() else { return Ok(None) };
        let w = (b.0[0] - a.0[0] + 1) as usize;
        let h = (b.0[1] - a.0[1] + 1) as usize;
        if w.saturating_mul(h) > GRID_LIMIT {
            return Err(CoverError::TooLarge(w.saturating_mul(h)));
        }
        let mut sums = vec![0u32; (w + 1) * (h + 1)];
        for c in cells.iter() {
            let i = (c.0[0] - a.0[0]) as usize;
            let j = (c.0[1] - a.0[1]) as usize;
            sums[(j + 1) * (w + 1) + i + 1] = 1;
        }
        for j in 1..=h {
            for i in 1..=w {
                let k = j * (w + 1) + i;
                sums[k] += sums[k - 1] + sums[k - (w + 1)] - sums[k - (w + 1) - 1];
            }
        }
        Ok(Some(Occupancy { lo: [a.0[0], a.0[1]], w, h, sums }))
    }

    /// Whether any cell has index in `[i0, i1] x [j0, j1]`.
    fn any(&self, i0: i64, i1: i64, j0: i64, j1: i64) -> bool {
        let clip = |v: i64, lo: i64, n: usize| (v - lo).clamp(0, n as i64) as usize;
        let (a0, a1) = (clip(i0, self.lo[0], self.w), clip(i1 + 1, self.lo[0], self.w));
        let (b0, b1) = (clip(j0, self.lo[1], self.h), clip(j1 + 1, self.lo[1], self.h));
        if a0 >= a1 || b0 >= b1 {
            return false;
        }
        let at = |i: usize, j: usize| self.sums[j * (self.w + 1) + i] as i64;
        at(a1, b1) - at(a0, b1) - at(a1, b0) + at(a0, b0) > 0
    }
}

/// Cell indices whose closed cells meet the open interval `(c - t, c + t)`.
fn open_span(c: &Rational, t: &Rational, side: &Rational) -> (i64, i64) {
    // i s < c + t and (i + 1) s > c - t
    let lo = (c - t) / side - Rational::from_integer(1);
    let hi = (c + t) / side;
    ((num::floor(&lo) + 1) as i64, (num::ceil(&hi) - 1) as i64)
}

fn strs(p: &[Rational; 2]) -> [String; 2] {
    [num::rational_string(&p[0]), num::rational_string(&p[1])]
}

/// Exact check that the open ball `B_{qr}(y)` misses every cell and lies in `B_r(x)`.
fn confirm(occ: &Occupancy, side: &Rational, x: &[Rational; 2], y: &[Rational; 2], r: &Rational, q: &Rational) -> bool {
    let qr = q * r;
    let dx = y[0] - x[0];
    let dy = y[1] - x[1];
    let room = r - qr;
    if dx * dx + dy * dy > room * room {
        return false;
    }
    let (i0, i1) = open_span(&y[0], &qr, side);
    let (j0, j1) = open_span(&y[1], &qr, side);
    !occ.any(i0, i1, j0, j1)
}

/// Searches `B_r(x)` for a center of an empty `qr`-ball, coarse spacings first.
fn find_witness(occ: &Occupancy, side: &Rational, x: &[Rational; 2], r: &Rational, q: &Rational) -> Option<[Rational; 2]> {
    let finest = side / Rational::from_integer(4);
    let qr = q * r;
    let mut spacings = vec![finest];
    while spacings.last().unwrap() * Rational::from_integer(16) <= qr {
        let g = spacings.last().unwrap() * Rational::from_integer(2);
        spacings.push(g);
    }
    let room = num::to_f64(&(r - qr));
    let s = num::to_f64(side);
    let qr_f = num::to_f64(&qr);
    let xf = [num::to_f64(&x[0]), num::to_f64(&x[1])];
    for g in spacings.iter().rev() {
        let gf = num::to_f64(g);
        let n = (room / gf).floor() as i64;
        let mut cands: Vec<(i64, i64)> = Vec::new();
        for a in -n..=n {
            for b in -n..=n {
                let (u, v) = (a as f64 * gf, b as f64 * gf);
                if u * u + v * v > room * room * (1.0 + 1e-12) {
                    continue;
                }
                let yf = [xf[0] + u, xf[1] + v];
                let i0 = ((yf[0] - qr_f) / s).floor() as i64 - 1;
                let i1 = ((yf[0] + qr_f) / s).floor() as i64 + 1;
                let j0 = ((yf[1] - qr_f) / s).floor() as i64 - 1;
                let j1 = ((yf[1] + qr_f) / s).floor() as i64 + 1;
                // padded box; the exact check below uses the tight span
                if !occ.any(i0 + 1, i1 - 1, j0 + 1, j1 - 1) {
                    cands.push((a, b));
                }
            }
        }
        cands.sort_by_key(|&(a, b)| (a * a + b * b, a, b));
        for (a, b) in cands {
            let y = [x[0] + g * Rational::from_integer(a as i128), x[1] + g * Rational::from_integer(b as i128)];
            if confirm(occ, side, x, &y, r, q) {
                return Some(y);
            }
        }
    }
    None
}

/// Looks for `B_{qr}(y) ⊂ B_r(x)` avoiding the cells for every sample `x` and radius `r`.
///
/// Evidence only: a witness is exact, but the samples and candidate centers are finite.
pub fn porosity_scan(
    cells: &CellSet,
    q: Rational,
    samples: &[[Rational; 2]],
    radii: &[Rational],
) -> Result<PorosityReport, CoverError> {
    if cells.dim() != Dim::TWO {
        return Err(CoverError::NotPlanar(cells.dim().get()));
    }
    let zero = Rational::from_integer(0);
    let one = Rational::from_integer(1);
    if q <= zero || q >= one {
        return Err(CoverError::BadParameter(format!("q = {} outside (0, 1)", num::rational_string(&q))));
    }
    if let Some(r) = radii.iter().find(|r| **r <= zero) {
        return Err(CoverError::BadParameter(format!("radius {} is not positive", num::rational_string(r))));
    }
    let q_str = num::rational_string(&q);
    let Some(occ) = Occupancy::new(cells)? else {
        return Ok(PorosityReport { q: q_str, verdict: PorosityVerdict::QPorousEvidence, checked: 0, witnesses: Vec::new() });
    };
    let side = cells.resolution().side();
    let mut witnesses = Vec::new();
    let mut checked = 0;
    for x in samples {
        for r in radii {
            checked += 1;
            match find_witness(&occ, &side, x, r, &q) {
                Some(y) => witnesses.push(PorosityWitness { x: strs(x), r: num::rational_string(r), y: strs(&y) }),
                None => {
                    return Ok(PorosityReport {
                        q: q_str,
                        verdict: PorosityVerdict::Violated { x: strs(x), r: num::rational_string(r) },
                        checked,
                        witnesses,
                    })
                }
            }
        }
    }
    Ok(PorosityReport { q: q_str, verdict: PorosityVerdict::QPorousEvidence, checked, witnesses })
}

/// Up to `count` cell centers spread evenly over the set, in cell order.
pub fn sample_cell_centers(cells: &CellSet, count: usize) -> Vec<[Rational; 2]> {
    let n = cells.len();
    if n == 0 || count == 0 {
        return Vec::new();
    }
    let step = n.div_ceil(count).max(1);
    let half = cells.resolution().side() / Rational::from_integer(2);
    cells
        .iter()
        .step_by(step)
        .map(|c| {
            let (lo, _) = cells.resolution().cell_box_exact(c);
            [lo[0] + half, lo[1] + half]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Cell, Resolution};

    fn full_square(level: u32) -> CellSet {
        let n = 1i64 << level;
        CellSet::from_cells(
            Dim::TWO,
            Resolution::dyadic(level),
            "square",
            (0..n).flat_map(|i| (0..n).map(move |j| Cell::xy(i, j))),
        )
    }

    #[test]
    fn full_square_violates() {
        let half = Rational::new(1, 2);
        let rep = porosity_scan(&full_square(4), Rational::new(1, 8), &[[half, half]], &[Rational::new(1, 4)]).unwrap();
        assert!(matches!(rep.verdict, PorosityVerdict::Violated { .. }));
    }

    #[test]
    fn empty_set_is_vacuous() {
        let empty = CellSet::new(Dim::TWO, Resolution::dyadic(3), "empty");
        let rep = porosity_scan(&empty, Rational::new(1, 2), &[], &[Rational::new(1, 4)]).unwrap();
        assert!(rep.is_evidence());
    }

    #[test]
    fn witness_found_next_to_square() {
        // ball near the edge of the square reaches outside it
        let x = [Rational::new(1, 1), Rational::new(1, 2)];
        let rep = porosity_scan(&full_square(4), Rational::new(1, 4), &[x], &[Rational::new(1, 4)]).unwrap();
        assert!(rep.is_evidence());
        assert_eq!(rep.witnesses.len(), 1);
    }
}
