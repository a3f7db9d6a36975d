use std::collections::HashSet;
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::ifs::IfsSystem;

use super::CoverError;

/// Anchor points generated for one count.
const POINT_BUDGET: f64 = 2e6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoxCount {
    pub level: u32,
    pub side: f64,
    pub count: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionEstimate {
    pub estimate: f64,
    pub std_error: f64,
    /// `estimate ± 2 std_error`.
    pub interval: (f64, f64),
    pub scales: usize,
    pub octaves: f64,
}

impl DimensionEstimate {
    pub fn contains(&self, x: f64) -> bool {
        self.interval.0 <= x && x <= self.interval.1
    }
}

/// Boxes of side `side` holding at least one point; points on box faces go to the upper box.
fn occupied(points: &[[f64; 3]], side: f64) -> usize {
    let key = |x: f64| (x / side + 1e-9).floor() as i64;
    points.iter().map(|p| (key(p[0]), key(p[1]), key(p[2]))).collect::<HashSet<_>>().len()
}

/// Box counts of a point cloud at the given `(level, side)` scales.
pub fn box_counts_points(points: &[[f64; 3]], scales: &[(u32, f64)]) -> Vec<BoxCount> {
    scales.iter().map(|&(level, side)| BoxCount { level, side, count: occupied(points, side) }).collect()
}

/// Counts boxes of side `r_max^j` meeting the anchor points `f_w(c)` at a depth below the finest level.
pub fn box_counts(ifs: &IfsSystem, levels: RangeInclusive<u32>) -> Result<Vec<BoxCount>, CoverError> {
    if levels.is_empty() {
        return Err(CoverError::BadParameter("empty level range".into()));
    }
    let r = ifs.r_max().to_f64();
    let cap = (POINT_BUDGET.ln() / (ifs.len() as f64).ln()).floor() as u32;
    let depth = (*levels.end() + 2).min(cap).max(*levels.end());
    let points: Vec<[f64; 3]> = ifs.pieces_of_length(depth as usize).into_iter().map(|p| p.center).collect();
    let scales: Vec<(u32, f64)> = levels.map(|j| (j, r.powi(j as i32))).collect();
    Ok(box_counts_points(&points, &scales))
}

/// Least-squares slope of `log N` against `log(1/side)`.
pub fn box_dimension(counts: &[BoxCount]) -> Result<DimensionEstimate, CoverError> {
    if counts.len() < 4 {
        return Err(CoverError::BadParameter(format!("{} scales; need at least 4", counts.len())));
    }
    let (lo, hi) = counts.iter().fold((f64::INFINITY, 0.0f64), |(a, b), c| (a.min(c.side), b.max(c.side)));
    let octaves = (hi / lo).log2();
    if !(octaves >= 2.0) {
        return Err(CoverError::BadParameter(format!("scales span {octaves:.2} octaves; need at least 2")));
    }
    if counts.iter().any(|c| c.count == 0) {
        return Err(CoverError::BadParameter("a scale has no occupied boxes".into()));
    }
    if counts.iter().all(|c| c.count == counts[0].count) {
        return Err(CoverError::BadParameter("counts are constant across scales".into()));
    }
    let xs: Vec<f64> = counts.iter().map(|c| -c.side.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|c| (c.count as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    let se = (rss / (n - 2.0) / sxx).sqrt();
    Ok(DimensionEstimate {
        estimate: slope,
        std_error: se,
        interval: (slope - 2.0 * se, slope + 2.0 * se),
        scales: counts.len(),
        octaves,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ifs::catalog;

    #[test]
    fn square_counts_are_powers_of_four() {
        let c = box_counts(&catalog::filled_square(), 1..=5).unwrap();
        let n: Vec<usize> = c.iter().map(|b| b.count).collect();
        assert_eq!(n, vec![4, 16, 64, 256, 1024]);
    }

    #[test]
    fn too_few_scales() {
        let c = box_counts(&catalog::filled_square(), 1..=3).unwrap();
        assert!(box_dimension(&c).is_err());
    }

    #[test]
    fn constant_counts() {
        let c: Vec<BoxCount> = (0..5).map(|j| BoxCount { level: j, side: 0.5f64.powi(j as i32), count: 7 }).collect();
        assert!(box_dimension(&c).is_err());
    }
}
