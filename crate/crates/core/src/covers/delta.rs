use rayon::prelude::*;
use serde::Serialize;

use crate::ifs::{IfsSystem, Similarity};
use crate::neighbors::{IntersectionSet, NeighborClosure};
use crate::num::Rational;

use super::distance::{point_distance_lb, set_distance_lb, Hole, OutOfBudget, PieceSet};
use super::CoverError;

const BUDGET: usize = 2_000_000;
const REL_TOL: f64 = 0.02;

/// The constants `δ` and `k` of the cover construction, with the bounds they were derived from.
#[derive(Clone, Debug, Serialize)]
pub struct DeltaK {
    pub eps: f64,
    #[serde(serialize_with = "crate::num::ser_rational")]
    pub delta: Rational,
    pub k: u32,
    /// `δ 2^-k`, the side of the squares in `C(η)`.
    #[serde(serialize_with = "crate::num::ser_rational")]
    pub eta: Rational,
    /// `¼ min{1, ε, min ‖x - y‖}` over distinct points of `H`.
    pub delta_cap: f64,
    pub h_min_distance: Option<f64>,
    /// Smallest `dist(x, h(K))` over pairs with `x ∉ h(K)`.
    pub neighbor_gap: Option<f64>,
    /// Lower bound on `dist(K \ (H)_δ, ⋃ h(K))`.
    pub separation: Option<f64>,
}

impl DeltaK {
    pub fn delta_f64(&self) -> f64 {
        crate::num::to_f64(&self.delta)
    }

    pub fn eta_f64(&self) -> f64 {
        crate::num::to_f64(&self.eta)
    }
}

pub(crate) fn check_inputs(closure: &NeighborClosure, h: &IntersectionSet) -> Result<(), CoverError> {
    if !closure.is_stabilized() {
        return Err(CoverError::Precondition("neighbor closure did not stabilize".into()));
    }
    if !h.is_certified_finite() {
        return Err(CoverError::Precondition(format!(
            "intersection points are not certified finite ({:?})",
            h.status
        )));
    }
    Ok(())
}

pub(crate) fn level_of(ifs: &IfsSystem, radius: f64) -> u32 {
    let r = ifs.r_max().to_f64();
    let rel = (radius / ifs.ball().radius).max(1e-300);
    (rel.ln() / r.ln()).ceil().max(0.0) as u32
}

fn budget_error(ifs: &IfsSystem, what: &str, e: OutOfBudget) -> CoverError {
    CoverError::Certification { what: what.into(), level: level_of(ifs, e.0) }
}

/// Largest `m / 2^j` not above `x` with the smallest `j` giving `m >= 16`.
fn dyadic_floor(x: f64) -> Rational {
    let mut j = 0u32;
    while j < 100 && x * 2f64.powi(j as i32) < 16.0 {
        j += 1;
    }
    Rational::new((x * 2f64.powi(j as i32)).floor() as i128, 1i128 << j)
}

/// Picks `δ` (a dyadic rational) satisfying both conditions and the least `k` for the separation bound.
pub fn select_delta_k(
    ifs: &IfsSystem,
    closure: &NeighborClosure,
    h: &IntersectionSet,
    eps: f64,
) -> Result<DeltaK, CoverError> {
    check_inputs(closure, h)?;
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(CoverError::BadParameter(format!("eps = {eps} must be positive")));
    }
    let pts = &h.points;
    let mut h_min: Option<f64> = None;
    for (i, a) in pts.iter().enumerate() {
        for b in &pts[i + 1..] {
            let d = a.center.euclid_dist(&b.center) - a.radius - b.radius;
            h_min = Some(h_min.map_or(d, |m: f64| m.min(d)));
        }
    }
    let delta_cap = 0.25 * 1f64.min(eps).min(h_min.unwrap_or(f64::INFINITY));
    if !(delta_cap > 0.0) {
        return Err(CoverError::Certification { what: "distinct points of H".into(), level: h.depth });
    }

    let abs_tol = 1e-12 * ifs.diameter_bound();
    let jobs: Vec<(usize, usize)> = (0..pts.len())
        .flat_map(|p| (0..closure.maps.len()).map(move |m| (p, m)))
        .filter(|&(p, m)| !pts[p].maps.contains(&m))
        .collect();
    let gaps: Result<Vec<f64>, OutOfBudget> = jobs
        .par_iter()
        .map(|&(p, m)| {
            let x = &pts[p];
            let set = PieceSet::new(ifs, closure.maps[m].map, Vec::new());
            let lb = point_distance_lb(&set, &x.center.array(), REL_TOL, abs_tol.max(x.radius), BUDGET)?;
            // within the enclosure the point may lie on h(K) after all
            Ok(if lb <= 10.0 * x.radius { f64::INFINITY } else { lb - x.radius })
        })
        .collect();
    let gaps = gaps.map_err(|e| budget_error(ifs, "dist(x, h(K)) for x in H", e))?;
    let neighbor_gap = gaps.into_iter().fold(None, |m: Option<f64>, g| {
        if g.is_finite() {
            Some(m.map_or(g, |m| m.min(g)))
        } else {
            m
        }
    });
    let bound = delta_cap.min(neighbor_gap.map_or(f64::INFINITY, |g| 0.5 * g));
    let delta = dyadic_floor(0.99 * bound);
    let delta_f = crate::num::to_f64(&delta);

    let holes: Vec<Hole> = pts
        .iter()
        .filter(|x| delta_f - x.radius > 0.0)
        .map(|x| Hole { center: x.center.array(), radius: delta_f - x.radius })
        .collect();
    let id = Similarity::identity(ifs.dim());
    let seps: Result<Vec<f64>, OutOfBudget> = closure
        .maps
        .par_iter()
        .map(|nm| {
            let a = PieceSet::new(ifs, id, holes.clone());
            let b = PieceSet::new(ifs, nm.map, Vec::new());
            set_distance_lb(&a, &b, REL_TOL, abs_tol, BUDGET)
        })
        .collect();
    let seps = seps.map_err(|e| budget_error(ifs, "dist(K \\ (H)_delta, h(K))", e))?;
    let separation = seps.into_iter().fold(None, |m: Option<f64>, s| Some(m.map_or(s, |m| m.min(s))));
    let mut k = 1u32;
    if let Some(sep) = separation {
        if !(sep > 0.0) {
            return Err(CoverError::Certification { what: "dist(K \\ (H)_delta, h(K)) > 0".into(), level: 0 });
        }
        while k < 60 && delta_f * 0.5f64.powi(k as i32 - 1) >= sep {
            k += 1;
        }
    }
    let eta = delta / Rational::from_integer(1i128 << k);
    Ok(DeltaK {
        eps,
        delta,
        k,
        eta,
        delta_cap,
        h_min_distance: h_min,
        neighbor_gap,
        separation: separation.filter(|s| s.is_finite()),
    })
}
