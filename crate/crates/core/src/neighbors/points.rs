use rayon::prelude::*;
use serde::Serialize;

use crate::geom::{dist, Point};
use crate::ifs::{IfsSystem, Similarity};

use super::engine::{a_balls, cluster_balls, Cluster, PairEngine, Side};
use super::{ClosureStatus, NeighborClosure, NeighborError};

/// Pairs kept per refinement level before giving up.
pub const PAIR_CAP: usize = 200_000;
const MAX_LEVELS: u32 = 64;
/// Extent ratio at or above which a level counts as non-shrinking.
pub const NON_SHRINKING: f64 = 0.8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FinitenessStatus {
    CertifiedFinite,
    SuspectedInfinite,
    Unknown,
}

/// A ball known to hold intersection points.
#[derive(Clone, Debug)]
pub struct Enclosure {
    pub center: Point,
    pub radius: f64,
    /// Indices into the closure's map list.
    pub maps: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct IntersectionSet {
    pub points: Vec<Enclosure>,
    pub status: FinitenessStatus,
    pub target_radius: f64,
    /// Deepest refinement level used by any map.
    pub depth: u32,
}

impl IntersectionSet {
    pub fn is_certified_finite(&self) -> bool {
        self.status == FinitenessStatus::CertifiedFinite
    }

    pub fn centers(&self) -> Vec<Point> {
        self.points.iter().map(|e| e.center).collect()
    }
}

/// Level-by-level refinement of one pair search.
struct Trace {
    status: FinitenessStatus,
    clusters: Vec<Cluster>,
    depth: u32,
}

fn follow(engine: &PairEngine<'_>, target: f64) -> Trace {
    let r_max = engine.ifs().r_max().to_f64();
    let (ra, rb) = engine.roots();
    let mut pairs = vec![(ra, rb)];
    let mut prev: Option<f64> = None;
    let mut flat = 0;
    for t in 1..=MAX_LEVELS {
        let rho = r_max.powi(t as i32);
        pairs = match engine.refine(pairs, rho, PAIR_CAP) {
            Ok(p) => p,
            Err(_) => return Trace { status: FinitenessStatus::Unknown, clusters: Vec::new(), depth: t },
        };
        if pairs.is_empty() {
            return Trace { status: FinitenessStatus::CertifiedFinite, clusters: Vec::new(), depth: t };
        }
        let clusters = cluster_balls(&a_balls(&pairs));
        let extent = clusters.iter().fold(0.0f64, |m, c| m.max(c.extent()));
        if let Some(p) = prev {
            if extent >= NON_SHRINKING * p {
                flat += 1;
            } else {
                flat = 0;
            }
        }
        prev = Some(extent);
        if flat >= 3 {
            return Trace { status: FinitenessStatus::SuspectedInfinite, clusters, depth: t };
        }
        let small = clusters.iter().all(|c| c.enclosure_radius() <= target);
        if small && disjoint(&clusters) {
            return Trace { status: FinitenessStatus::CertifiedFinite, clusters, depth: t };
        }
    }
    Trace { status: FinitenessStatus::Unknown, clusters: Vec::new(), depth: MAX_LEVELS }
}

fn disjoint(clusters: &[Cluster]) -> bool {
    for (i, a) in clusters.iter().enumerate() {
        for b in &clusters[i + 1..] {
            if dist(&a.center(), &b.center()) <= a.enclosure_radius() + b.enclosure_radius() {
                return false;
            }
        }
    }
    true
}

/// Encloses `H(F) = ⋃_h K ∩ h(K)` over the closure's maps.
pub fn intersection_points(
    ifs: &IfsSystem,
    closure: &NeighborClosure,
    target_radius: f64,
) -> Result<IntersectionSet, NeighborError> {
    if let ClosureStatus::Overflow { limit } = closure.status {
        return Err(NeighborError::Overflow { limit });
    }
    if !(target_radius > 0.0) {
        return Err(NeighborError::BadParameter(format!("target radius {target_radius}")));
    }
    let id = Similarity::identity(ifs.dim());
    let traces: Vec<Trace> = closure
        .maps
        .par_iter()
        .map(|h| {
            let engine = PairEngine::new(ifs, Side { frame: id, eps: 0.0 }, Side { frame: h.map, eps: 0.0 });
            follow(&engine, target_radius)
        })
        .collect();
    let mut status = FinitenessStatus::CertifiedFinite;
    let mut depth = 0;
    let mut found: Vec<Enclosure> = Vec::new();
    for (k, tr) in traces.iter().enumerate() {
        depth = depth.max(tr.depth);
        match tr.status {
            FinitenessStatus::SuspectedInfinite => status = FinitenessStatus::SuspectedInfinite,
            FinitenessStatus::Unknown if status == FinitenessStatus::CertifiedFinite => {
                status = FinitenessStatus::Unknown
            }
            _ => {}
        }
        if tr.status != FinitenessStatus::CertifiedFinite {
            continue;
        }
        for c in &tr.clusters {
            let e = Enclosure {
                center: Point::from_array(ifs.dim(), c.center()),
                radius: c.enclosure_radius(),
                maps: vec![k],
            };
            match found
                .iter_mut()
                .find(|f| f.center.euclid_dist(&e.center) <= f.radius + e.radius)
            {
                Some(f) => {
                    if e.radius < f.radius {
                        f.center = e.center;
                        f.radius = e.radius;
                    }
                    f.maps.push(k);
                }
                None => found.push(e),
            }
        }
    }
    if status != FinitenessStatus::CertifiedFinite {
        found.clear();
    }
    found.sort_by(|a, b| {
        let (p, q) = (a.center.array(), b.center.array());
        p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])).then(p[2].total_cmp(&q[2]))
    });
    Ok(IntersectionSet { points: found, status, target_radius, depth })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "verdict", content = "count")]
pub enum PairVerdict {
    Finite(usize),
    SuspectedInfinite,
    Unknown,
}

/// Screening record for one pair `f_i(K) ∩ f_j(K)`, 1-based indices.
#[derive(Clone, Debug, Serialize)]
pub struct PairReport {
    pub i: usize,
    pub j: usize,
    pub verdict: PairVerdict,
    pub levels: Vec<u32>,
    pub clusters: Vec<usize>,
    pub extents: Vec<f64>,
    /// `extents[k+1] / extents[k]`.
    pub ratios: Vec<f64>,
    /// Cluster centers at the last level.
    pub centers: Vec<[f64; 3]>,
}

/// Tracks the clusters of `f_i(K) ∩ f_j(K)` over the given approximation levels.
pub fn pairwise_finiteness(
    ifs: &IfsSystem,
    levels: std::ops::RangeInclusive<u32>,
) -> Result<Vec<PairReport>, NeighborError> {
    if levels.is_empty() || *levels.start() == 0 {
        return Err(NeighborError::BadParameter("levels must be a nonempty range starting at 1 or later".into()));
    }
    let m = ifs.len();
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|i| (i + 1..m).map(move |j| (i, j))).collect();
    let r_max = ifs.r_max().to_f64();
    Ok(pairs
        .par_iter()
        .map(|&(i, j)| {
            let maps = ifs.maps();
            let engine = PairEngine::new(ifs, Side { frame: maps[i], eps: 0.0 }, Side { frame: maps[j], eps: 0.0 });
            let (ra, rb) = engine.roots();
            let mut current = vec![(ra, rb)];
            let mut report = PairReport {
                i: i + 1,
                j: j + 1,
                verdict: PairVerdict::Unknown,
                levels: Vec::new(),
                clusters: Vec::new(),
                extents: Vec::new(),
                ratios: Vec::new(),
                centers: Vec::new(),
            };
            for t in 1..=*levels.end() {
                current = match engine.refine(current, r_max.powi(t as i32), PAIR_CAP) {
                    Ok(p) => p,
                    Err(_) => return report,
                };
                if current.is_empty() {
                    report.verdict = PairVerdict::Finite(0);
                    return report;
                }
                if t >= *levels.start() {
                    let cl = cluster_balls(&a_balls(&current));
                    report.levels.push(t);
                    report.clusters.push(cl.len());
                    report.extents.push(cl.iter().fold(0.0f64, |m, c| m.max(c.extent())));
                    report.centers = cl.iter().map(|c| c.center()).collect();
                }
            }
            report.ratios = report.extents.windows(2).map(|w| w[1] / w[0]).collect();
            let n = report.clusters.len();
            report.verdict = if !report.ratios.is_empty() && report.ratios.iter().all(|r| *r >= NON_SHRINKING) {
                PairVerdict::SuspectedInfinite
            } else if n >= 2
                && report.ratios.last().is_some_and(|r| *r <= 0.75)
                && report.clusters[n - 1] == report.clusters[n - 2]
            {
                PairVerdict::Finite(report.clusters[n - 1])
            } else {
                PairVerdict::Unknown
            };
            report
        })
        .collect())
}

/// Encloses the contact set `f_i(K) ∩ f_j(K)` (1-based indices).
pub fn contact_points(ifs: &IfsSystem, i: usize, j: usize, target_radius: f64) -> Result<IntersectionSet, NeighborError> {
    let m = ifs.len();
    if i == 0 || j == 0 || i > m || j > m || i == j {
        return Err(NeighborError::BadParameter(format!("pair ({i}, {j}) for {m} maps")));
    }
    let maps = ifs.maps();
    let engine = PairEngine::new(ifs, Side { frame: maps[i - 1], eps: 0.0 }, Side { frame: maps[j - 1], eps: 0.0 });
    let tr = follow(&engine, target_radius);
    let points = if tr.status == FinitenessStatus::CertifiedFinite {
        tr.clusters
            .iter()
            .map(|c| Enclosure { center: Point::from_array(ifs.dim(), c.center()), radius: c.enclosure_radius(), maps: Vec::new() })
            .collect()
    } else {
        Vec::new()
    };
    Ok(IntersectionSet { points, status: tr.status, target_radius, depth: tr.depth })
}
