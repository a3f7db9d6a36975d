use std::collections::HashMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::geom::{dist, CellSet, Dim, Point, Resolution};
use crate::ifs::{approximate, compose, IfsSystem, Piece, Similarity};
use crate::neighbors::IntersectionSet;
use crate::num::{self, Rational, Real};

use super::delta::DeltaK;
use super::CoverError;

/// Squares kept in memory across all layers.
const SQUARE_LIMIT: usize = 5_000_000;

/// An open axis-parallel square, stored by the corners of its closure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Rect {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl Rect {
    pub fn side(&self) -> f64 {
        self.hi[0] - self.lo[0]
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * ((self.hi[0] - self.lo[0]) + (self.hi[1] - self.lo[1]))
    }

    pub fn contains_open(&self, p: [f64; 2]) -> bool {
        p[0] > self.lo[0] && p[0] < self.hi[0] && p[1] > self.lo[1] && p[1] < self.hi[1]
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverLayer {
    pub n: u32,
    /// `P_n`, empty for `n = 1`.
    pub pieces: Vec<String>,
    pub added: usize,
    /// `#U_n`.
    pub total: usize,
    /// `ℓ_n`, the summed square perimeters of `U_n`.
    pub boundary_length: f64,
    /// `2^(2-k) c #C(η) Σ_{j<=n} δ^j`.
    pub bound: f64,
}

/// The layers `U_1 ⊆ U_2 ⊆ ...` together with the data they were built from.
#[derive(Clone, Debug, Serialize)]
pub struct CoverSequence {
    pub constants: DeltaK,
    /// `#C(η)` for the whole attractor approximation.
    pub grid_count: usize,
    /// Measured `max(1, max_n #P_n)`.
    pub c: usize,
    /// Set when `#P_n` was still rising at the last layer.
    pub c_grows: bool,
    /// `2^(2-k) c #C(η)`, the `n`-independent bound.
    pub limit: f64,
    pub layers: Vec<CoverLayer>,
    pub approx_level: u32,
    #[serde(skip)]
    pub squares: Vec<(u32, Rect)>,
    #[serde(skip)]
    pub approx: CellSet,
    #[serde(skip)]
    pub h_points: Vec<(Point, f64)>,
}

impl CoverSequence {
    /// Squares of `U_n`.
    pub fn layer_squares(&self, n: u32) -> impl Iterator<Item = &Rect> + '_ {
        self.squares.iter().filter(move |(l, _)| *l <= n).map(|(_, r)| r)
    }
}

pub(crate) fn check_axis_aligned(ifs: &IfsSystem) -> Result<(), CoverError> {
    if ifs.dim() != Dim::TWO {
        return Err(CoverError::NotPlanar(ifs.dim().get()));
    }
    for (i, f) in ifs.maps().iter().enumerate() {
        let a = f.linear();
        let tol = 1e-12 * f.ratio();
        let diag = a[0][1].abs() <= tol && a[1][0].abs() <= tol;
        let anti = a[0][0].abs() <= tol && a[1][1].abs() <= tol;
        if !diag && !anti {
            return Err(CoverError::NotAxisAligned(i + 1));
        }
    }
    Ok(())
}

/// The attractor approximation shared by every layer, indexed by square.
struct Template {
    cells: Vec<([f64; 2], [f64; 2])>,
    /// Lattice index of each square of `C(η)` with the cells meeting it.
    squares: Vec<((i64, i64), Vec<u32>)>,
}

fn lattice_span(lo: f64, hi: f64, eta: f64) -> (i64, i64) {
    // k > 2 lo / eta - 1 and k < 2 hi / eta + 1, exact for dyadic inputs
    let a = 2.0 * lo / eta - 1.0;
    let b = 2.0 * hi / eta + 1.0;
    (a.floor() as i64 + 1, b.ceil() as i64 - 1)
}

fn template(approx: &CellSet, eta: f64) -> Template {
    let res = approx.resolution();
    let cells: Vec<([f64; 2], [f64; 2])> = approx
        .iter()
        .map(|c| {
            let (lo, hi) = res.cell_box(c);
            ([lo[0], lo[1]], [hi[0], hi[1]])
        })
        .collect();
    let mut map: HashMap<(i64, i64), Vec<u32>> = HashMap::new();
    for (idx, (lo, hi)) in cells.iter().enumerate() {
        let (i0, i1) = lattice_span(lo[0], hi[0], eta);
        let (j0, j1) = lattice_span(lo[1], hi[1], eta);
        for i in i0..=i1 {
            for j in j0..=j1 {
                map.entry((i, j)).or_default().push(idx as u32);
            }
        }
    }
    let mut squares: Vec<_> = map.into_iter().collect();
    squares.sort_by_key(|(k, _)| *k);
    Template { cells, squares }
}

fn square_rect(k: (i64, i64), eta: f64) -> Rect {
    let h = 0.5 * eta;
    let c = [k.0 as f64 * h, k.1 as f64 * h];
    Rect { lo: [c[0] - h, c[1] - h], hi: [c[0] + h, c[1] + h] }
}

/// Farthest point of a box from `p`.
fn far_dist(lo: &[f64; 2], hi: &[f64; 2], p: &[f64; 3]) -> f64 {
    let dx = (p[0] - lo[0]).abs().max((hi[0] - p[0]).abs());
    let dy = (p[1] - lo[1]).abs().max((hi[1] - p[1]).abs());
    dx.hypot(dy)
}

/// Lattice squares meeting some part of the approximation outside the holes.
fn kept_squares(t: &Template, eta: f64, holes: &[([f64; 3], f64)]) -> Vec<(i64, i64)> {
    if holes.is_empty() {
        return t.squares.iter().map(|(k, _)| *k).collect();
    }
    t.squares
        .iter()
        .filter(|(k, cells)| {
            let sq = square_rect(*k, eta);
            cells.iter().any(|&ci| {
                let (clo, chi) = t.cells[ci as usize];
                let lo = [clo[0].max(sq.lo[0]), clo[1].max(sq.lo[1])];
                let hi = [chi[0].min(sq.hi[0]), chi[1].min(sq.hi[1])];
                holes.iter().all(|(c, r)| far_dist(&lo, &hi, c) >= *r)
            })
        })
        .map(|(k, _)| *k)
        .collect()
}

fn map_rect(f: &Similarity, r: &Rect) -> Rect {
    let a = f.apply_array(&[r.lo[0], r.lo[1], 0.0]);
    let b = f.apply_array(&[r.hi[0], r.hi[1], 0.0]);
    Rect { lo: [a[0].min(b[0]), a[1].min(b[1])], hi: [a[0].max(b[0]), a[1].max(b[1])] }
}

fn real_pow(x: &Rational, n: u32) -> Real {
    let mut acc = Real::Exact(Rational::from_integer(1));
    for _ in 0..n {
        acc = crate::ifs::mul_real(&acc, &Real::Exact(*x));
    }
    acc
}

/// Whether some descendant ball of `p`, at most `extra` levels down, meets `[H]_reach`.
fn meets_deep(ifs: &IfsSystem, p: &Piece, h: &[(Point, f64)], reach: f64, extra: u32) -> bool {
    let hits = |q: &Piece| h.iter().any(|(x, r)| dist(&q.center, &x.array()) <= q.radius + reach + r);
    if !hits(p) {
        return false;
    }
    if extra == 0 {
        return true;
    }
    ifs.children(p).iter().any(|c| meets_deep(ifs, c, h, reach, extra - 1))
}

/// `P_n`: words of `Q_{δ^n}` whose piece meets `[H]_{δ^(n-1)}`.
fn p_words(ifs: &IfsSystem, h: &[(Point, f64)], rho: &Real, reach: f64) -> Vec<Piece> {
    let mut out = Vec::new();
    let mut stack = vec![(ifs.root_piece(), Real::Exact(Rational::from_integer(1)))];
    let ratios: Vec<Real> = ifs.maps().iter().map(|f| f.ratio_real()).collect();
    while let Some((p, sr)) = stack.pop() {
        let near = h.iter().any(|(x, r)| dist(&p.center, &x.array()) <= p.radius + reach + r);
        if !near {
            continue;
        }
        if !p.word.is_empty() && crate::ifs::le_real(&sr, rho) {
            if meets_deep(ifs, &p, h, reach, 3) {
                out.push(p);
            }
            continue;
        }
        for i in (0..ifs.len()).rev() {
            stack.push((ifs.child(&p, i), crate::ifs::mul_real(&sr, &ratios[i])));
        }
    }
    out
}

/// Builds `U_1, ..., U_{n_max}` for a planar IFS whose maps keep the axes.
pub fn cover_sequence(
    ifs: &IfsSystem,
    h: &IntersectionSet,
    constants: &DeltaK,
    n_max: u32,
) -> Result<CoverSequence, CoverError> {
    check_axis_aligned(ifs)?;
    if !h.is_certified_finite() {
        return Err(CoverError::Precondition("intersection points are not certified finite".into()));
    }
    if n_max == 0 {
        return Err(CoverError::BadParameter("n_max must be at least 1".into()));
    }
    let eta = constants.eta;
    let eta_f = num::to_f64(&eta);
    let delta_f = constants.delta_f64();
    let big_r = ifs.ball().radius;
    let r_max = ifs.r_max().to_f64();
    let mut level = 0u32;
    while big_r * r_max.powi(level as i32) > eta_f / 8.0 {
        level += 1;
    }
    let rho = ifs.level_rho(level);
    let mut side = eta / Rational::from_integer(8);
    while num::to_f64(&side) > rho.to_f64() * ifs.diameter_bound() {
        side /= Rational::from_integer(2);
    }
    let approx = approximate(ifs, &rho, Resolution::new(side)?)?;
    let t = template(&approx, eta_f);
    let grid_count = t.squares.len();
    let h_points: Vec<(Point, f64)> = h.points.iter().map(|e| (e.center, e.radius)).collect();

    let mut squares: Vec<(u32, Rect)> = Vec::new();
    let holes: Vec<([f64; 3], f64)> = h_points.iter().map(|(x, r)| (x.array(), delta_f - r)).collect();
    for k in kept_squares(&t, eta_f, &holes) {
        squares.push((1, square_rect(k, eta_f)));
    }
    let mut layers = vec![CoverLayer {
        n: 1,
        pieces: Vec::new(),
        added: squares.len(),
        total: squares.len(),
        boundary_length: squares.iter().map(|(_, r)| r.perimeter()).sum(),
        bound: 0.0,
    }];
    let mut p_counts = Vec::new();
    for n in 2..=n_max {
        let rho_n = real_pow(&constants.delta, n);
        let reach = delta_f.powi(n as i32 - 1);
        let pieces = p_words(ifs, &h_points, &rho_n, reach);
        p_counts.push(pieces.len());
        let estimate = squares.len() + pieces.len() * grid_count;
        if estimate > SQUARE_LIMIT {
            return Err(CoverError::TooLarge(estimate));
        }
        let dn = rho_n.to_f64();
        let added: Vec<Vec<Rect>> = pieces
            .par_iter()
            .map(|p| {
                let f = compose(ifs, &p.word).expect("in range").float_only();
                let inv = f.inverse();
                let sr = f.ratio();
                let pre: Vec<([f64; 3], f64)> = h_points
                    .iter()
                    .map(|(x, r)| (inv.apply_array(&x.array()), (dn - r) / sr))
                    .filter(|(y, rad)| dist(y, &ifs.ball().center.array()) < big_r + rad)
                    .collect();
                kept_squares(&t, eta_f, &pre).into_iter().map(|k| map_rect(&f, &square_rect(k, eta_f))).collect()
            })
            .collect();
        let mut count = 0;
        for v in added {
            count += v.len();
            squares.extend(v.into_iter().map(|r| (n, r)));
        }
        let prev = layers.last().expect("layer 1").boundary_length;
        let gained: f64 = squares[squares.len() - count..].iter().map(|(_, r)| r.perimeter()).sum();
        layers.push(CoverLayer {
            n,
            pieces: pieces.iter().map(|p| p.word.to_string()).collect(),
            added: count,
            total: squares.len(),
            boundary_length: prev + gained,
            bound: 0.0,
        });
    }
    let c = p_counts.iter().copied().max().unwrap_or(0).max(1);
    let c_grows = p_counts.len() >= 2 && p_counts[p_counts.len() - 1] > *p_counts[..p_counts.len() - 1].iter().max().unwrap();
    let scale = 0.5f64.powi(constants.k as i32 - 2) * c as f64 * grid_count as f64;
    for layer in &mut layers {
        let geo: f64 = (1..=layer.n).map(|j| delta_f.powi(j as i32)).sum();
        layer.bound = scale * geo;
    }
    Ok(CoverSequence {
        constants: constants.clone(),
        grid_count,
        c,
        c_grows,
        limit: scale,
        layers,
        approx_level: level,
        squares,
        approx,
        h_points,
    })
}
