use std::collections::BTreeSet;

use serde::Serialize;

use crate::geom::{CellSet, Dim};
use crate::num::{self, Rational};

use super::CoverError;

/// Open squares `(-eta/2, eta/2)^2 + z`, `z` on the `(eta/2)`-lattice, stored by lattice index.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SquareCover {
    #[serde(serialize_with = "crate::num::ser_rational")]
    pub eta: Rational,
    pub squares: BTreeSet<(i64, i64)>,
    pub provenance: String,
}

impl SquareCover {
    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }

    /// Exact center `k * eta / 2`.
    pub fn center(&self, k: (i64, i64)) -> [Rational; 2] {
        let h = self.eta / Rational::from_integer(2);
        [h * Rational::from_integer(k.0 as i128), h * Rational::from_integer(k.1 as i128)]
    }

    /// Closure corners of the open square.
    pub fn square_box(&self, k: (i64, i64)) -> ([Rational; 2], [Rational; 2]) {
        let c = self.center(k);
        let h = self.eta / Rational::from_integer(2);
        ([c[0] - h, c[1] - h], [c[0] + h, c[1] + h])
    }

    pub fn square_box_f64(&self, k: (i64, i64)) -> ([f64; 2], [f64; 2]) {
        let (lo, hi) = self.square_box(k);
        ([num::to_f64(&lo[0]), num::to_f64(&lo[1])], [num::to_f64(&hi[0]), num::to_f64(&hi[1])])
    }

    /// Sum of the square perimeters.
    pub fn boundary_length(&self) -> Rational {
        self.eta * Rational::from_integer(4 * self.squares.len() as i128)
    }
}

/// Lattice indices `k` with `(k eta/2 - eta/2, k eta/2 + eta/2)` meeting `[lo, hi]`.
pub(crate) fn lattice_range(lo: &Rational, hi: &Rational, eta: &Rational) -> (i64, i64) {
    // k > 2 lo / eta - 1 and k < 2 hi / eta + 1
    let two = Rational::from_integer(2);
    let a = two * lo / eta - Rational::from_integer(1);
    let b = two * hi / eta + Rational::from_integer(1);
    let first = num::floor(&a) + 1;
    let last = num::ceil(&b) - 1;
    (first as i64, last as i64)
}

/// Squares of `C(eta)` meeting any of the closed boxes `[lo, hi]`.
pub fn grid_cover_boxes(
    boxes: &[([Rational; 2], [Rational; 2])],
    eta: Rational,
    provenance: impl Into<String>,
) -> Result<SquareCover, CoverError> {
    if eta <= Rational::from_integer(0) {
        return Err(CoverError::BadParameter("eta must be positive".into()));
    }
    let mut squares = BTreeSet::new();
    for (lo, hi) in boxes {
        let (i0, i1) = lattice_range(&lo[0], &hi[0], &eta);
        let (j0, j1) = lattice_range(&lo[1], &hi[1], &eta);
        for i in i0..=i1 {
            for j in j0..=j1 {
                squares.insert((i, j));
            }
        }
    }
    Ok(SquareCover { eta, squares, provenance: provenance.into() })
}

/// Squares of `C(eta)` meeting the closed cells of a planar cell set.
pub fn grid_cover(cells: &CellSet, eta: Rational) -> Result<SquareCover, CoverError> {
    if cells.dim() != Dim::TWO {
        return Err(CoverError::NotPlanar(cells.dim().get()));
    }
    let res = cells.resolution();
    let boxes: Vec<_> = cells
        .iter()
        .map(|c| {
            let (lo, hi) = res.cell_box_exact(c);
            ([lo[0], lo[1]], [hi[0], hi[1]])
        })
        .collect();
    grid_cover_boxes(&boxes, eta, cells.provenance().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i128, d: i128) -> Rational {
        Rational::new(p, d)
    }

    #[test]
    fn point_gets_one_square() {
        let z = [q(0, 1), q(0, 1)];
        let c = grid_cover_boxes(&[(z, z)], q(1, 1), "pt").unwrap();
        assert_eq!(c.squares.into_iter().collect::<Vec<_>>(), vec![(0, 0)]);
    }

    #[test]
    fn segment_gets_three() {
        let c = grid_cover_boxes(&[([q(0, 1), q(0, 1)], [q(1, 1), q(0, 1)])], q(1, 1), "seg").unwrap();
        assert_eq!(c.squares.into_iter().collect::<Vec<_>>(), vec![(0, 0), (1, 0), (2, 0)]);
    }
}
