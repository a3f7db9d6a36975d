use rayon::prelude::*;
use serde::Serialize;

use crate::geom::dist;
use crate::ifs::{curtail, IfsSystem, Piece, Similarity};
use crate::neighbors::{IntersectionSet, NeighborClosure};
use crate::num::Real;

use super::delta::{check_inputs, level_of};
use super::distance::{set_distance_lb, Hole, OutOfBudget, PieceSet};
use super::CoverError;

const BUDGET: usize = 1_000_000;
const REL_TOL: f64 = 0.01;
/// Anchor points used for the diameter bound.
const DIAM_POINTS: usize = 5000;

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CoverPiece {
    /// `f_w(B_{2c₁}(x))`.
    Ball { word: String, center: [f64; 2], radius: f64 },
    /// `f_w(K \ [H]_{c₁})`.
    Piece { word: String, ratio: f64 },
}

impl CoverPiece {
    pub fn diameter_bound(&self, diam: f64) -> f64 {
        match self {
            CoverPiece::Ball { radius, .. } => 2.0 * radius,
            CoverPiece::Piece { ratio, .. } => ratio * diam,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverFamily {
    pub name: String,
    pub pieces: Vec<CoverPiece>,
    /// Certified lower bound on the distance between distinct members; `None` below two members.
    pub min_distance: Option<f64>,
    pub max_diameter: f64,
}

/// Two `cs`-separated families of sets with diameter at most `s`.
#[derive(Clone, Debug, Serialize)]
pub struct NagataCover {
    pub s: f64,
    pub eps: f64,
    pub c1: f64,
    pub c2: Option<f64>,
    pub c: f64,
    /// Certified upper bound on `diam K`; all constants are relative to it.
    pub diameter: f64,
    /// Smallest distance between distinct points of `H ∪ h(H)`.
    pub z_min_distance: Option<f64>,
    pub families: Vec<CoverFamily>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeparationFailure {
    pub family: String,
    pub first: String,
    pub second: String,
    pub distance: f64,
    pub required: f64,
}

/// Upper bound on `diam K` from anchor points at a fixed depth.
fn diameter_upper(ifs: &IfsSystem) -> f64 {
    let m = ifs.len() as f64;
    let depth = ((DIAM_POINTS as f64).ln() / m.ln()).floor().max(1.0) as usize;
    let pieces = ifs.pieces_of_length(depth);
    let slack = pieces.iter().fold(0.0f64, |a, p| a.max(p.radius));
    let far = pieces
        .par_iter()
        .map(|p| pieces.iter().fold(0.0f64, |a, q| a.max(dist(&p.center, &q.center))))
        .reduce(|| 0.0, f64::max);
    far + 2.0 * slack
}

fn z_points(closure: &NeighborClosure, h: &IntersectionSet) -> Vec<([f64; 3], f64)> {
    let mut z: Vec<([f64; 3], f64)> = h.points.iter().map(|x| (x.center.array(), x.radius)).collect();
    for nm in &closure.maps {
        let f = nm.map.float_only();
        for x in &h.points {
            z.push((f.apply_array(&x.center.array()), f.ratio() * x.radius));
        }
    }
    z
}

/// Smallest distance between points of `z` that are certainly distinct.
fn min_distinct(z: &[([f64; 3], f64)]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for (i, (p, rp)) in z.iter().enumerate() {
        for (q, rq) in &z[i + 1..] {
            let d = dist(p, q);
            if d > 2.0 * (rp + rq) + 1e-12 {
                let lb = d - rp - rq;
                best = Some(best.map_or(lb, |b: f64| b.min(lb)));
            }
        }
    }
    best
}

fn holes_for(f: &Similarity, h: &IntersectionSet, radius: f64) -> Vec<Hole> {
    h.points
        .iter()
        .filter(|x| radius > x.radius)
        .map(|x| Hole { center: f.apply_array(&x.center.array()), radius: f.ratio() * (radius - x.radius) })
        .collect()
}

fn budget_error(ifs: &IfsSystem, what: &str, e: OutOfBudget) -> CoverError {
    CoverError::Certification { what: what.into(), level: level_of(ifs, e.0) }
}

/// Nagata cover over `Q_{s/2}` with `c = min(c₁, c₂)`; `eps` is the working ε of the closure.
pub fn nagata_cover(
    ifs: &IfsSystem,
    closure: &NeighborClosure,
    h: &IntersectionSet,
    s: f64,
    eps: f64,
) -> Result<Result<NagataCover, SeparationFailure>, CoverError> {
    check_inputs(closure, h)?;
    if !(s > 0.0) || !s.is_finite() {
        return Err(CoverError::BadParameter(format!("s = {s} must be positive")));
    }
    if !(eps > 0.0) {
        return Err(CoverError::BadParameter(format!("eps = {eps} must be positive")));
    }
    let diam = diameter_upper(ifs);
    let z_min = min_distinct(&z_points(closure, h));
    // in units where diam K = 1
    let eps_n = (eps / diam).min(z_min.map_or(f64::INFINITY, |z| 0.99 * z / diam));
    let r_min = ifs.r_min().to_f64();
    let c1 = eps_n * r_min / 8.0;
    let hole_r = c1 * diam;
    let id = Similarity::identity(ifs.dim());
    let abs_tol = 1e-12 * diam;

    let seps: Result<Vec<f64>, OutOfBudget> = closure
        .maps
        .par_iter()
        .map(|nm| {
            let a = PieceSet::new(ifs, id, holes_for(&id, h, hole_r));
            let f = nm.map.float_only();
            let b = PieceSet::new(ifs, f, holes_for(&f, h, hole_r));
            set_distance_lb(&a, &b, REL_TOL, abs_tol, BUDGET)
        })
        .collect();
    let seps = seps.map_err(|e| budget_error(ifs, "dist(K \\ (H)_c1, h(K \\ (H)_c1))", e))?;
    let min_sep = seps.into_iter().fold(f64::INFINITY, f64::min);
    let c2 = if min_sep.is_finite() {
        if !(min_sep > 0.0) {
            return Err(CoverError::Certification { what: "c2 > 0".into(), level: 0 });
        }
        Some(0.5 * r_min * min_sep / diam)
    } else {
        None
    };
    let c = c2.map_or(c1, |c2| c1.min(c2));
    let required = c * s;

    let rho = s / (2.0 * diam);
    let pieces: Vec<Piece> = if rho >= 1.0 {
        vec![ifs.root_piece()]
    } else {
        let words = curtail(ifs, &Real::Float(rho))?;
        words
            .iter()
            .map(|w| {
                let map = crate::ifs::compose(ifs, w).expect("curtailed words are in range").float_only();
                Piece {
                    word: w.clone(),
                    center: map.apply_array(&ifs.ball().center.array()),
                    radius: map.ratio() * ifs.ball().radius,
                    map,
                }
            })
            .collect()
    };

    // family 1: maximal balls f_w(B_{2c₁}(x))
    let mut balls: Vec<(String, [f64; 3], f64)> = Vec::new();
    let mut slack: Vec<f64> = Vec::new();
    for p in &pieces {
        for x in &h.points {
            let center = p.map.apply_array(&x.center.array());
            let sr = p.map.ratio();
            // grown by the enclosure radius so the true ball is inside
            balls.push((p.word.to_string(), center, sr * (2.0 * hole_r + x.radius)));
            slack.push(2.0 * sr * x.radius + 1e-9 * diam);
        }
    }
    let maximal: Vec<usize> = (0..balls.len())
        .filter(|&i| {
            let (_, ci, ri) = &balls[i];
            !balls.iter().enumerate().any(|(j, (_, cj, rj))| {
                j != i && dist(ci, cj) + ri <= rj + slack[i] + slack[j] && (*ri < rj - slack[i] - slack[j] || j < i)
            })
        })
        .collect();
    let balls: Vec<(String, [f64; 3], f64)> = maximal.into_iter().map(|i| balls[i].clone()).collect();
    let mut ball_fail: Option<SeparationFailure> = None;
    let mut ball_min: Option<f64> = None;
    for (i, (wi, ci, ri)) in balls.iter().enumerate() {
        for (wj, cj, rj) in &balls[i + 1..] {
            let d = dist(ci, cj) - ri - rj;
            ball_min = Some(ball_min.map_or(d, |m: f64| m.min(d)));
            if d < required && ball_fail.is_none() {
                ball_fail = Some(SeparationFailure {
                    family: "balls".into(),
                    first: wi.clone(),
                    second: wj.clone(),
                    distance: d,
                    required,
                });
            }
        }
    }
    if let Some(f) = ball_fail {
        return Ok(Err(f));
    }
    let ball_family = CoverFamily {
        name: "balls".into(),
        max_diameter: balls.iter().fold(0.0f64, |m, b| m.max(2.0 * b.2)),
        pieces: balls
            .iter()
            .map(|(w, c, r)| CoverPiece::Ball { word: w.clone(), center: [c[0], c[1]], radius: *r })
            .collect(),
        min_distance: ball_min,
    };

    // family 2: f_w(K \ [H]_{c₁})
    let pairs: Vec<(usize, usize)> =
        (0..pieces.len()).flat_map(|i| (i + 1..pieces.len()).map(move |j| (i, j))).collect();
    let checked: Result<Vec<(usize, usize, f64)>, OutOfBudget> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let (p, q) = (&pieces[i], &pieces[j]);
            let coarse = dist(&p.center, &q.center) - p.radius - q.radius;
            if coarse >= required {
                return Ok((i, j, coarse));
            }
            let a = PieceSet::new(ifs, p.map, holes_for(&p.map, h, hole_r));
            let b = PieceSet::new(ifs, q.map, holes_for(&q.map, h, hole_r));
            Ok((i, j, set_distance_lb(&a, &b, REL_TOL, abs_tol, BUDGET)?))
        })
        .collect();
    let checked = checked.map_err(|e| budget_error(ifs, "distance between cover pieces", e))?;
    let mut piece_min: Option<f64> = None;
    for &(i, j, d) in &checked {
        if d < required {
            return Ok(Err(SeparationFailure {
                family: "pieces".into(),
                first: pieces[i].word.to_string(),
                second: pieces[j].word.to_string(),
                distance: d,
                required,
            }));
        }
        piece_min = Some(piece_min.map_or(d, |m: f64| m.min(d)));
    }
    let piece_family = CoverFamily {
        name: "pieces".into(),
        max_diameter: pieces.iter().fold(0.0f64, |m, p| m.max(p.map.ratio() * diam)),
        pieces: pieces
            .iter()
            .map(|p| CoverPiece::Piece { word: p.word.to_string(), ratio: p.map.ratio() })
            .collect(),
        min_distance: piece_min,
    };
    let families = vec![ball_family, piece_family];
    Ok(Ok(NagataCover { s, eps: eps_n * diam, c1, c2, c, diameter: diam, z_min_distance: z_min, families }))
}
