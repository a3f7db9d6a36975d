use serde::Serialize;

use crate::geom::{rasterize_box, CellSet, Dim, Resolution};
use crate::num::{self, Rational};

use super::ObstacleError;

fn q(p: i128, d: i128) -> Rational {
    Rational::new(p, d)
}

/// Disjoint closed intervals in `[0, 1]`, sorted.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntervalSet {
    pub level: u32,
    #[serde(serialize_with = "ser_intervals")]
    pub intervals: Vec<(Rational, Rational)>,
}

fn ser_intervals<S: serde::Serializer>(v: &[(Rational, Rational)], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for (a, b) in v {
        seq.serialize_element(&[num::rational_string(a), num::rational_string(b)])?;
    }
    seq.end()
}

impl IntervalSet {
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn measure(&self) -> Rational {
        self.intervals.iter().fold(q(0, 1), |acc, (a, b)| acc + (b - a))
    }

    /// Common interval length, when all intervals have one.
    pub fn common_length(&self) -> Option<Rational> {
        let (a, b) = self.intervals.first()?;
        let l = b - a;
        self.intervals.iter().all(|(a, b)| b - a == l).then_some(l)
    }

    /// Every interval of `self` lies inside some interval of `outer`.
    pub fn is_nested_in(&self, outer: &IntervalSet) -> bool {
        self.intervals.iter().all(|(a, b)| outer.intervals.iter().any(|(c, d)| c <= a && b <= d))
    }

    /// Sorted, disjoint and inside `[0, 1]`.
    pub fn is_well_formed(&self) -> bool {
        let zero = q(0, 1);
        let one = q(1, 1);
        self.intervals.iter().all(|(a, b)| zero <= *a && a <= b && *b <= one)
            && self.intervals.windows(2).all(|w| w[0].1 < w[1].0)
    }
}

/// `F_n` of the Smith-Volterra-Cantor construction: each interval loses an open middle of width `2^(-2n)`.
pub fn svc_level(n: u32) -> Result<IntervalSet, ObstacleError> {
    if n > 40 {
        return Err(ObstacleError::BadParameter(format!("level {n} exceeds 40")));
    }
    let mut cur = vec![(q(0, 1), q(1, 1))];
    for k in 1..=n {
        let half_gap = q(1, 1i128 << (2 * k + 1));
        cur = cur
            .into_iter()
            .flat_map(|(a, b)| {
                let mid = (a + b) / q(2, 1);
                [(a, mid - half_gap), (mid + half_gap, b)]
            })
            .collect();
    }
    Ok(IntervalSet { level: n, intervals: cur })
}

/// The `2^n` closed intervals of the middle-third construction.
pub fn cantor_level(n: u32) -> Result<IntervalSet, ObstacleError> {
    if n > 60 {
        return Err(ObstacleError::BadParameter(format!("level {n} exceeds 60")));
    }
    let mut cur = vec![(q(0, 1), q(1, 1))];
    for _ in 0..n {
        cur = cur
            .into_iter()
            .flat_map(|(a, b)| {
                let t = (b - a) / q(3, 1);
                [(a, a + t), (b - t, b)]
            })
            .collect();
    }
    Ok(IntervalSet { level: n, intervals: cur })
}

/// Closed axis-parallel segment with exact endpoints.
pub type Segment2 = ([Rational; 2], [Rational; 2]);

/// Sides of the squares of `F_k x F_k` for `k = 0..=n_max`.
pub fn theta_segments(n_max: u32) -> Result<Vec<Segment2>, ObstacleError> {
    if n_max > 8 {
        return Err(ObstacleError::TooLarge { what: "theta segments", count: 4u128 << (2 * n_max), limit: 4 << 16 });
    }
    let mut out = Vec::new();
    for k in 0..=n_max {
        let f = svc_level(k)?;
        for (x0, x1) in &f.intervals {
            for (y0, y1) in &f.intervals {
                out.push(([*x0, *y0], [*x1, *y0]));
                out.push(([*x1, *y0], [*x1, *y1]));
                out.push(([*x0, *y1], [*x1, *y1]));
                out.push(([*x0, *y0], [*x0, *y1]));
            }
        }
    }
    Ok(out)
}

/// Cell cover of `⋃_{k <= n_max} ∂(F_k x F_k)`.
#[derive(Clone, Debug)]
pub struct ThetaSquares {
    pub cells: CellSet,
    pub segments: usize,
    /// Set when the cells are wider than the gaps of `F_{n_max}`.
    pub warning: Option<String>,
}

pub fn theta_squares(n_max: u32, res: Resolution) -> Result<ThetaSquares, ObstacleError> {
    let segs = theta_segments(n_max)?;
    let mut cells = CellSet::new(Dim::TWO, res, format!("theta squares to level {n_max}"));
    for (a, b) in &segs {
        cells.extend(rasterize_box(Dim::TWO, res, a, b)?);
    }
    let gap = q(1, 1i128 << (2 * n_max));
    let warning = (n_max > 0 && res.side() * q(2, 1) >= gap).then(|| {
        format!(
            "cell side {} does not resolve the level-{n_max} gap width {}",
            num::rational_string(&res.side()),
            num::rational_string(&gap)
        )
    });
    Ok(ThetaSquares { cells, segments: segs.len(), warning })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

/// Cell cover of `I x [lo, hi]` (intervals along `axis`, thickness across it).
pub fn extrude(
    set: &IntervalSet,
    axis: Axis,
    thickness: (Rational, Rational),
    res: Resolution,
) -> Result<CellSet, ObstacleError> {
    if thickness.0 > thickness.1 {
        return Err(ObstacleError::BadParameter("thickness range is reversed".into()));
    }
    let mut cells = CellSet::new(Dim::TWO, res, format!("level-{} intervals extruded along {:?}", set.level, axis));
    for (a, b) in &set.intervals {
        let (lo, hi) = match axis {
            Axis::X => ([*a, thickness.0], [*b, thickness.1]),
            Axis::Y => ([thickness.0, *a], [thickness.1, *b]),
        };
        cells.extend(rasterize_box(Dim::TWO, res, &lo, &hi)?);
    }
    Ok(cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn svc_first_levels() {
        assert_eq!(svc_level(0).unwrap().intervals, vec![(q(0, 1), q(1, 1))]);
        assert_eq!(svc_level(1).unwrap().intervals, vec![(q(0, 1), q(3, 8)), (q(5, 8), q(1, 1))]);
        let f2 = svc_level(2).unwrap();
        assert_eq!(f2.len(), 4);
        assert_eq!(f2.common_length(), Some(q(5, 32)));
        assert_eq!(f2.measure(), q(5, 8));
    }

    #[test]
    fn cantor_measure() {
        for n in 0..8 {
            let c = cantor_level(n).unwrap();
            assert_eq!(c.len(), 1 << n);
            assert_eq!(c.measure(), q(2i128.pow(n), 3i128.pow(n)));
        }
    }

    #[test]
    fn theta_counts() {
        assert_eq!(theta_segments(0).unwrap().len(), 4);
        assert_eq!(theta_segments(1).unwrap().len(), 4 + 16);
        assert_eq!(theta_segments(2).unwrap().len(), 4 + 16 + 64);
    }
}
