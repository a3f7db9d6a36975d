use std::fmt;

use rayon::prelude::*;

use crate::geom::{rasterize_ball, CellSet, Dim, Point, Resolution};
use crate::num::{self, Real};

use super::{IfsError, Similarity};

/// Finite word over the map indices, stored 0-based and shown 1-based.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u16>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    /// From 1-based indices as written in the literature.
    pub fn from_one_based(indices: &[usize]) -> Word {
        Word(indices.iter().map(|&i| (i as u16).wrapping_sub(1)).collect())
    }

    pub fn from_indices(indices: Vec<u16>) -> Word {
        Word(indices)
    }

    /// 0-based indices.
    pub fn indices(&self) -> &[u16] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, i: usize) -> Word {
        let mut v = self.0.clone();
        v.push(i as u16);
        Word(v)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("()");
        }
        let wide = self.0.iter().any(|&i| i >= 9);
        let parts: Vec<String> = self.0.iter().map(|i| (i + 1).to_string()).collect();
        f.write_str(&parts.join(if wide { "." } else { "" }))
    }
}

/// Closed Euclidean ball.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

/// A piece `f_w(K)` with its enclosing ball `f_w(B)`.
#[derive(Clone, Debug)]
pub struct Piece {
    pub word: Word,
    pub map: Similarity,
    /// `f_w(c)` where `c` is the ball center; a point of the attractor.
    pub center: [f64; 3],
    pub radius: f64,
}

#[derive(Clone, Debug)]
pub struct IfsSystem {
    dim: Dim,
    maps: Vec<Similarity>,
    r_min: Real,
    r_max: Real,
    ball: Ball,
}

impl IfsSystem {
    pub fn new(maps: Vec<Similarity>) -> Result<IfsSystem, IfsError> {
        if maps.len() < 2 {
            return Err(IfsError::TooFewMaps(maps.len()));
        }
        let dim = maps[0].dim();
        for (index, f) in maps.iter().enumerate() {
            if f.dim() != dim {
                return Err(crate::geom::GeomError::DimensionMismatch {
                    expected: dim.get(),
                    found: f.dim().get(),
                }
                .into());
            }
            let r = f.ratio();
            if !(r > 0.0 && r < 1.0) {
                return Err(IfsError::NotContractive { index: index + 1, ratio: r });
            }
        }
        let pick = |better: fn(f64, f64) -> bool| {
            let mut best = maps[0].ratio_real();
            for f in &maps[1..] {
                let r = f.ratio_real();
                let replace = match (r.exact(), best.exact()) {
                    (Some(a), Some(b)) => better(num::to_f64(&a), num::to_f64(&b)) && a != b,
                    _ => better(r.to_f64(), best.to_f64()),
                };
                if replace {
                    best = r;
                }
            }
            best
        };
        let r_min = pick(|a, b| a < b);
        let r_max = pick(|a, b| a > b);
        let c = maps[0].fixed_point()?;
        let ca = c.array();
        let mut reach = 0.0f64;
        for f in &maps {
            reach = reach.max(crate::geom::dist(&f.apply_array(&ca), &ca));
        }
        if reach == 0.0 {
            return Err(IfsError::Input("all maps share a fixed point; the attractor is a point".into()));
        }
        let radius = reach / (1.0 - r_max.to_f64());
        for f in &maps {
            let excess = crate::geom::dist(&f.apply_array(&ca), &ca) + f.ratio() * radius - radius;
            if excess > 1e-12 * radius {
                return Err(IfsError::BallNotInvariant(excess));
            }
        }
        Ok(IfsSystem { dim, maps, r_min, r_max, ball: Ball { center: c, radius } })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn maps(&self) -> &[Similarity] {
        &self.maps
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn r_min(&self) -> Real {
        self.r_min
    }

    pub fn r_max(&self) -> Real {
        self.r_max
    }

    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    /// Upper bound for diam(K).
    pub fn diameter_bound(&self) -> f64 {
        2.0 * self.ball.radius
    }

    pub fn is_exact(&self) -> bool {
        self.maps.iter().all(|f| f.is_exact())
    }

    /// `C = ceil(log r_min / log r_max)`.
    pub fn suffix_bound(&self) -> usize {
        let c = (self.r_min.to_f64().ln() / self.r_max.to_f64().ln() - 1e-12).ceil();
        c.max(1.0) as usize
    }

    /// `r_max^level`, the piece scale used for approximation depth `level`.
    pub fn level_rho(&self, level: u32) -> Real {
        let mut acc = Real::Exact(num::Rational::from_integer(1));
        for _ in 0..level {
            acc = mul(&acc, &self.r_max);
        }
        acc
    }

    pub fn word_ratio(&self, w: &Word) -> Result<Real, IfsError> {
        let mut acc = Real::Exact(num::Rational::from_integer(1));
        for &i in w.indices() {
            let f = self.maps.get(i as usize).ok_or(IfsError::IndexOutOfRange {
                index: i as usize + 1,
                m: self.maps.len(),
            })?;
            acc = mul(&acc, &f.ratio_real());
        }
        Ok(acc)
    }

    pub fn root_piece(&self) -> Piece {
        Piece {
            word: Word::empty(),
            map: Similarity::identity(self.dim),
            center: self.ball.center.array(),
            radius: self.ball.radius,
        }
    }

    pub fn child(&self, p: &Piece, i: usize) -> Piece {
        let map = p.map.compose(&self.maps[i]);
        Piece {
            word: p.word.child(i),
            center: map.apply_array(&self.ball.center.array()),
            radius: map.ratio() * self.ball.radius,
            map,
        }
    }

    pub fn children(&self, p: &Piece) -> Vec<Piece> {
        (0..self.maps.len()).map(|i| self.child(p, i)).collect()
    }

    /// Pieces over `Q_rho`, in word order.
    pub fn pieces(&self, rho: &Real) -> Result<Vec<Piece>, IfsError> {
        let words = curtail(self, rho)?;
        Ok(words
            .par_iter()
            .map(|w| {
                let map = compose(self, w).expect("curtailed words are in range");
                Piece {
                    word: w.clone(),
                    center: map.apply_array(&self.ball.center.array()),
                    radius: map.ratio() * self.ball.radius,
                    map,
                }
            })
            .collect())
    }

    /// All pieces of word length exactly `n`.
    pub fn pieces_of_length(&self, n: usize) -> Vec<Piece> {
        let mut layer = vec![self.root_piece()];
        for _ in 0..n {
            layer = layer.iter().flat_map(|p| self.children(p)).collect();
        }
        layer
    }
}

pub(crate) fn mul(a: &Real, b: &Real) -> Real {
    match (a.exact(), b.exact()) {
        (Some(x), Some(y)) => match num::checked_mul(&x, &y) {
            Some(z) => Real::Exact(z),
            None => Real::Float(a.to_f64() * b.to_f64()),
        },
        _ => Real::Float(a.to_f64() * b.to_f64()),
    }
}

/// `a <= b`, exactly when both are exact; otherwise with a relative slack.
pub(crate) fn le(a: &Real, b: &Real) -> bool {
    match (a.exact(), b.exact()) {
        (Some(x), Some(y)) => x <= y,
        _ => a.to_f64() <= b.to_f64() * (1.0 + 1e-12),
    }
}

/// `f_{i1} ∘ ... ∘ f_{ik}`; the empty word gives the identity.
pub fn compose(ifs: &IfsSystem, w: &Word) -> Result<Similarity, IfsError> {
    let mut acc = Similarity::identity(ifs.dim);
    for &i in w.indices() {
        let f = ifs.maps.get(i as usize).ok_or(IfsError::IndexOutOfRange {
            index: (i as usize).wrapping_add(1),
            m: ifs.maps.len(),
        })?;
        acc = acc.compose(f);
    }
    Ok(acc)
}

/// The prefix-free word set `Q_rho`: first words with `sr(f_w) <= rho`.
pub fn curtail(ifs: &IfsSystem, rho: &Real) -> Result<Vec<Word>, IfsError> {
    let r = rho.to_f64();
    if !(r > 0.0 && r < 1.0) {
        return Err(IfsError::BadRho(r));
    }
    let ratios: Vec<Real> = ifs.maps.iter().map(|f| f.ratio_real()).collect();
    let mut out = Vec::new();
    // depth-first, children pushed in reverse to keep lexicographic order
    let mut stack: Vec<(Word, Real)> = vec![(Word::empty(), Real::Exact(num::Rational::from_integer(1)))];
    while let Some((w, sr)) = stack.pop() {
        if !w.is_empty() && le(&sr, rho) {
            out.push(w);
            continue;
        }
        for i in (0..ratios.len()).rev() {
            stack.push((w.child(i), mul(&sr, &ratios[i])));
        }
    }
    Ok(out)
}

/// Cell cover of `⋃_{w ∈ Q_rho} f_w(B)`.
pub fn approximate(ifs: &IfsSystem, rho: &Real, res: Resolution) -> Result<CellSet, IfsError> {
    let piece = rho.to_f64() * ifs.diameter_bound();
    if res.side_f64() > piece {
        return Err(IfsError::ResolutionTooCoarse { resolution: res.side_f64(), piece });
    }
    let pieces = ifs.pieces(rho)?;
    let chunks: Result<Vec<Vec<_>>, _> = pieces
        .par_iter()
        .map(|p| {
            let scale = p.center.iter().fold(1.0f64, |m, x| m.max(x.abs()));
            rasterize_ball(ifs.dim, res, &p.center, p.radius, 1e-12 * scale)
        })
        .collect();
    let mut set = CellSet::new(ifs.dim, res, format!("K at rho {}", rho));
    for chunk in chunks? {
        set.extend(chunk);
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::Rational;

    fn triangle() -> IfsSystem {
        let h = Real::Exact(Rational::new(1, 2));
        let z = Real::Exact(Rational::from_integer(0));
        let t = [[z, z], [h, z], [Real::Exact(Rational::new(1, 4)), Real::Float(3f64.sqrt() / 4.0)]];
        IfsSystem::new(t.iter().map(|t| Similarity::planar(h, z, false, *t).unwrap()).collect()).unwrap()
    }

    #[test]
    fn curtail_half_ratios() {
        let ifs = triangle();
        assert_eq!(curtail(&ifs, &Real::Exact(Rational::new(1, 2))).unwrap().len(), 3);
        assert_eq!(curtail(&ifs, &Real::Exact(Rational::new(1, 4))).unwrap().len(), 9);
    }

    #[test]
    fn word_display() {
        assert_eq!(Word::from_one_based(&[1, 2, 3]).to_string(), "123");
        assert_eq!(Word::empty().to_string(), "()");
    }

    #[test]
    fn ball_contains_fixed_points() {
        let ifs = triangle();
        for f in ifs.maps() {
            let p = f.fixed_point().unwrap();
            assert!(p.euclid_dist(&ifs.ball().center) <= ifs.ball().radius);
        }
    }
}
