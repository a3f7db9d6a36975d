use std::fmt;

use crate::geom::{Dim, Point};
use crate::num::{self, Rational, Real};

use super::IfsError;

type Mat = [[f64; 3]; 3];
type QMat = [[Rational; 3]; 3];

const ZERO: Rational = Rational::new_raw(0, 1);
const ONE: Rational = Rational::new_raw(1, 1);

#[derive(Clone, Copy, Debug, PartialEq)]
struct Exact {
    lin: QMat,
    trans: [Rational; 3],
    ratio: Rational,
}

/// `x -> A x + t` with `A = ratio * Q` and `Q` orthogonal.
///
/// Floating coefficients are always present; exact ones are kept while every
/// operation stays rational and fits in `i128`.
#[derive(Clone, Copy, Debug)]
pub struct Similarity {
    dim: Dim,
    lin: Mat,
    trans: [f64; 3],
    ratio: f64,
    exact: Option<Exact>,
}

/// Hashable identity of a similarity, exact or quantized.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MapKey {
    Exact(Vec<(i128, i128)>),
    Quantized(Vec<i64>),
}

impl Similarity {
    pub fn identity(dim: Dim) -> Similarity {
        let mut lin = [[0.0; 3]; 3];
        let mut q = [[ZERO; 3]; 3];
        for k in 0..dim.get() {
            lin[k][k] = 1.0;
            q[k][k] = ONE;
        }
        Similarity {
            dim,
            lin,
            trans: [0.0; 3],
            ratio: 1.0,
            exact: Some(Exact { lin: q, trans: [ZERO; 3], ratio: ONE }),
        }
    }

    /// Planar map: rotate by `rotation_deg` after an optional reflection in the x axis.
    pub fn planar(ratio: Real, rotation_deg: Real, reflect: bool, translate: [Real; 2]) -> Result<Similarity, IfsError> {
        let r = ratio.to_f64();
        if !(r > 0.0) || !r.is_finite() {
            return Err(IfsError::BadRatio(r));
        }
        let deg = rotation_deg.to_f64();
        let flip = if reflect { -1.0 } else { 1.0 };
        // exact cos/sin for multiples of 90 degrees
        let quarter = rotation_deg
            .exact()
            .filter(|q| (q / Rational::from_integer(90)).is_integer())
            .map(|q| (q / Rational::from_integer(90)).to_integer().rem_euclid(4));
        let (c, s) = match quarter {
            Some(0) => (1.0, 0.0),
            Some(1) => (0.0, 1.0),
            Some(2) => (-1.0, 0.0),
            Some(3) => (0.0, -1.0),
            _ => (deg.to_radians().cos(), deg.to_radians().sin()),
        };
        let mut lin = [[0.0; 3]; 3];
        lin[0][0] = r * c;
        lin[0][1] = -r * s * flip;
        lin[1][0] = r * s;
        lin[1][1] = r * c * flip;
        let trans = [translate[0].to_f64(), translate[1].to_f64(), 0.0];
        let exact = match (quarter, ratio.exact(), translate[0].exact(), translate[1].exact()) {
            (Some(_), Some(rq), Some(t0), Some(t1)) => {
                let cq = Rational::from_integer(c as i128);
                let sq = Rational::from_integer(s as i128);
                let fq = Rational::from_integer(flip as i128);
                let mut q = [[ZERO; 3]; 3];
                q[0][0] = rq * cq;
                q[0][1] = -rq * sq * fq;
                q[1][0] = rq * sq;
                q[1][1] = rq * cq * fq;
                Some(Exact { lin: q, trans: [t0, t1, ZERO], ratio: rq })
            }
            _ => None,
        };
        Ok(Similarity { dim: Dim::TWO, lin, trans, ratio: r, exact })
    }

    /// Map of the line: `x -> +-ratio x + t`.
    pub fn linear1d(ratio: Real, reflect: bool, translate: Real) -> Result<Similarity, IfsError> {
        let r = ratio.to_f64();
        if !(r > 0.0) || !r.is_finite() {
            return Err(IfsError::BadRatio(r));
        }
        let sign = if reflect { -1.0 } else { 1.0 };
        let mut lin = [[0.0; 3]; 3];
        lin[0][0] = sign * r;
        let exact = match (ratio.exact(), translate.exact()) {
            (Some(rq), Some(t)) => {
                let mut q = [[ZERO; 3]; 3];
                q[0][0] = rq * Rational::from_integer(sign as i128);
                Some(Exact { lin: q, trans: [t, ZERO, ZERO], ratio: rq })
            }
            _ => None,
        };
        Ok(Similarity { dim: Dim::ONE, lin, trans: [translate.to_f64(), 0.0, 0.0], ratio: r, exact })
    }

    /// Spatial map from an orthogonal matrix (rows).
    pub fn spatial(ratio: Real, orth: [[Real; 3]; 3], translate: [Real; 3]) -> Result<Similarity, IfsError> {
        let r = ratio.to_f64();
        if !(r > 0.0) || !r.is_finite() {
            return Err(IfsError::BadRatio(r));
        }
        let mut qf = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                qf[i][j] = orth[i][j].to_f64();
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                let d: f64 = (0..3).map(|k| qf[i][k] * qf[j][k]).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                if (d - want).abs() > 1e-9 {
                    return Err(IfsError::NotOrthogonal);
                }
            }
        }
        let mut lin = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                lin[i][j] = r * qf[i][j];
            }
        }
        let exact = (|| {
            let rq = ratio.exact()?;
            let mut q = [[ZERO; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    q[i][j] = orth[i][j].exact()?;
                }
            }
            for i in 0..3 {
                for j in 0..3 {
                    let d: Rational = (0..3).map(|k| q[i][k] * q[j][k]).sum();
                    if d != if i == j { ONE } else { ZERO } {
                        return None;
                    }
                }
            }
            let mut lq = [[ZERO; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    lq[i][j] = rq * q[i][j];
                }
            }
            Some(Exact {
                lin: lq,
                trans: [translate[0].exact()?, translate[1].exact()?, translate[2].exact()?],
                ratio: rq,
            })
        })();
        let trans = [translate[0].to_f64(), translate[1].to_f64(), translate[2].to_f64()];
        Ok(Similarity { dim: Dim::THREE, lin, trans, ratio: r, exact })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    /// Same map without the exact coefficients; cheap to compose.
    pub fn float_only(&self) -> Similarity {
        Similarity { exact: None, ..*self }
    }

    pub fn ratio(&self) -> f64 {
        self.ratio
    }

    pub fn ratio_real(&self) -> Real {
        match &self.exact {
            Some(e) => Real::Exact(e.ratio),
            None => Real::Float(self.ratio),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn translation(&self) -> [f64; 3] {
        self.trans
    }

    pub fn linear(&self) -> [[f64; 3]; 3] {
        self.lin
    }

    pub fn apply_array(&self, x: &[f64; 3]) -> [f64; 3] {
        let a = &self.lin;
        let mut out = self.trans;
        for i in 0..3 {
            out[i] += a[i][0] * x[0] + a[i][1] * x[1] + a[i][2] * x[2];
        }
        out
    }

    pub fn apply(&self, p: &Point) -> Point {
        if let (Some(e), Some(x)) = (&self.exact, p.exact_array()) {
            if let Some(y) = apply_exact(e, &x) {
                return Point::from_exact_array(self.dim, y);
            }
        }
        Point::from_array(self.dim, self.apply_array(&p.array()))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Similarity) -> Similarity {
        let mut lin = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                lin[i][j] = (0..3).map(|k| self.lin[i][k] * other.lin[k][j]).sum();
            }
        }
        let trans = self.apply_array(&other.trans);
        let exact = match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => compose_exact(a, b),
            _ => None,
        };
        Similarity { dim: self.dim, lin, trans, ratio: self.ratio * other.ratio, exact }
    }

    pub fn inverse(&self) -> Similarity {
        // A^-1 = A^T / r^2
        let r2 = self.ratio * self.ratio;
        let mut lin = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                lin[i][j] = self.lin[j][i] / r2;
            }
        }
        let mut trans = [0.0; 3];
        for i in 0..3 {
            trans[i] = -(0..3).map(|k| lin[i][k] * self.trans[k]).sum::<f64>();
        }
        let exact = self.exact.as_ref().and_then(inverse_exact);
        Similarity { dim: self.dim, lin, trans, ratio: 1.0 / self.ratio, exact }
    }

    /// Fixed point of a contraction.
    pub fn fixed_point(&self) -> Result<Point, IfsError> {
        if self.ratio >= 1.0 {
            return Err(IfsError::BadRatio(self.ratio));
        }
        let d = self.dim.get();
        if let Some(e) = &self.exact {
            if let Some(x) = fixed_exact(e, d) {
                return Ok(Point::from_exact_array(self.dim, x));
            }
        }
        // x = A x + t by iteration; converges since ratio < 1
        let mut x = self.trans;
        for _ in 0..10_000 {
            let y = self.apply_array(&x);
            let moved = crate::geom::dist(&x, &y);
            x = y;
            if moved <= 1e-17 * (1.0 + crate::geom::norm2(&x)) {
                break;
            }
        }
        Ok(Point::from_array(self.dim, x))
    }

    /// Whether this is the identity, exactly or within `tol` on coefficients.
    pub fn is_identity(&self, tol: f64) -> bool {
        let d = self.dim.get();
        if let Some(e) = &self.exact {
            return (0..d).all(|i| {
                e.trans[i] == ZERO && (0..d).all(|j| e.lin[i][j] == if i == j { ONE } else { ZERO })
            });
        }
        (0..d).all(|i| {
            self.trans[i].abs() <= tol
                && (0..d).all(|j| (self.lin[i][j] - if i == j { 1.0 } else { 0.0 }).abs() <= tol)
        })
    }

    /// Identity key for deduplication; floats are quantized to `quantum`.
    pub fn key(&self, quantum: f64) -> MapKey {
        let d = self.dim.get();
        if let Some(e) = &self.exact {
            let mut v = Vec::with_capacity(d * d + d);
            for i in 0..d {
                for j in 0..d {
                    v.push((*e.lin[i][j].numer(), *e.lin[i][j].denom()));
                }
                v.push((*e.trans[i].numer(), *e.trans[i].denom()));
            }
            return MapKey::Exact(v);
        }
        let mut v = Vec::with_capacity(d * d + d);
        for i in 0..d {
            for j in 0..d {
                v.push((self.lin[i][j] / 1e-9).round() as i64);
            }
            v.push((self.trans[i] / quantum).round() as i64);
        }
        MapKey::Quantized(v)
    }

    /// `ratio` in `[lo, hi]`, exactly when possible.
    pub fn ratio_within(&self, lo: &Real, hi: &Real) -> bool {
        if let (Some(e), Some(l), Some(h)) = (&self.exact, lo.exact(), hi.exact()) {
            return l <= e.ratio && e.ratio <= h;
        }
        let tol = 1e-12 * self.ratio;
        lo.to_f64() - tol <= self.ratio && self.ratio <= hi.to_f64() + tol
    }
}

impl PartialEq for Similarity {
    fn eq(&self, other: &Self) -> bool {
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => self.dim == other.dim && a == b,
            _ => self.dim == other.dim && self.lin == other.lin && self.trans == other.trans,
        }
    }
}

impl fmt::Display for Similarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = self.dim.get();
        match &self.exact {
            Some(e) => {
                write!(f, "x -> [")?;
                for i in 0..d {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    let row: Vec<String> = (0..d).map(|j| num::rational_string(&e.lin[i][j])).collect();
                    write!(f, "{}", row.join(" "))?;
                }
                let t: Vec<String> = (0..d).map(|i| num::rational_string(&e.trans[i])).collect();
                write!(f, "] x + ({})", t.join(", "))
            }
            None => {
                write!(f, "x -> [")?;
                for i in 0..d {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    let row: Vec<String> = (0..d).map(|j| format!("{}", num::round_sig(self.lin[i][j]))).collect();
                    write!(f, "{}", row.join(" "))?;
                }
                let t: Vec<String> = (0..d).map(|i| format!("{}", num::round_sig(self.trans[i]))).collect();
                write!(f, "] x + ({})", t.join(", "))
            }
        }
    }
}

fn apply_exact(e: &Exact, x: &[Rational; 3]) -> Option<[Rational; 3]> {
    let mut out = e.trans;
    for i in 0..3 {
        for k in 0..3 {
            if e.lin[i][k] != ZERO && x[k] != ZERO {
                out[i] = num::checked_add(&out[i], &num::checked_mul(&e.lin[i][k], &x[k])?)?;
            }
        }
    }
    Some(out)
}

fn compose_exact(a: &Exact, b: &Exact) -> Option<Exact> {
    let mut lin = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                if a.lin[i][k] != ZERO && b.lin[k][j] != ZERO {
                    lin[i][j] = num::checked_add(&lin[i][j], &num::checked_mul(&a.lin[i][k], &b.lin[k][j])?)?;
                }
            }
        }
    }
    let trans = apply_exact(a, &b.trans)?;
    Some(Exact { lin, trans, ratio: num::checked_mul(&a.ratio, &b.ratio)? })
}

fn inverse_exact(e: &Exact) -> Option<Exact> {
    let r2 = num::checked_mul(&e.ratio, &e.ratio)?;
    let mut lin = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            if e.lin[j][i] != ZERO {
                lin[i][j] = num::checked_div(&e.lin[j][i], &r2)?;
            }
        }
    }
    let mut trans = [ZERO; 3];
    for i in 0..3 {
        for k in 0..3 {
            if lin[i][k] != ZERO && e.trans[k] != ZERO {
                trans[i] = num::checked_sub(&trans[i], &num::checked_mul(&lin[i][k], &e.trans[k])?)?;
            }
        }
    }
    Some(Exact { lin, trans, ratio: num::checked_div(&ONE, &e.ratio)? })
}

/// Solves `(I - A) x = t` over the rationals.
fn fixed_exact(e: &Exact, d: usize) -> Option<[Rational; 3]> {
    let mut m = [[ZERO; 4]; 3];
    for i in 0..d {
        for j in 0..d {
            m[i][j] = if i == j { ONE } else { ZERO } - e.lin[i][j];
        }
        m[i][3] = e.trans[i];
    }
    for col in 0..d {
        let piv = (col..d).find(|&r| m[r][col] != ZERO)?;
        m.swap(col, piv);
        let p = m[col][col];
        for j in col..4 {
            m[col][j] = num::checked_div(&m[col][j], &p)?;
        }
        for r in 0..d {
            if r != col && m[r][col] != ZERO {
                let f = m[r][col];
                for j in col..4 {
                    m[r][j] = num::checked_sub(&m[r][j], &num::checked_mul(&f, &m[col][j])?)?;
                }
            }
        }
    }
    let mut x = [ZERO; 3];
    for i in 0..d {
        x[i] = m[i][3];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i128, d: i128) -> Real {
        Real::Exact(Rational::new(p, d))
    }

    #[test]
    fn compose_and_invert_exactly() {
        let f = Similarity::planar(q(1, 2), q(90, 1), false, [q(1, 2), q(0, 1)]).unwrap();
        let g = Similarity::planar(q(1, 3), q(0, 1), true, [q(0, 1), q(1, 3)]).unwrap();
        let h = f.compose(&g);
        assert!(h.is_exact());
        assert_eq!(h.ratio_real(), q(1, 6));
        assert!(h.compose(&h.inverse()).is_identity(0.0));
        let p = Point::from_rationals(&[Rational::new(1, 5), Rational::new(2, 7)]).unwrap();
        assert_eq!(h.apply(&p), f.apply(&g.apply(&p)));
    }

    #[test]
    fn fixed_point_of_half_map() {
        let f = Similarity::planar(q(1, 2), q(0, 1), false, [q(1, 2), q(0, 1)]).unwrap();
        let c = f.fixed_point().unwrap();
        assert_eq!(c.exact().unwrap(), &[Rational::from_integer(1), Rational::from_integer(0)]);
    }

    #[test]
    fn float_rotation_keeps_ratio() {
        let f = Similarity::planar(Real::Float(0.6), Real::Float(30.0), false, [q(0, 1), q(0, 1)]).unwrap();
        assert!(!f.is_exact());
        let a = Point::xy(0.3, -1.0);
        let b = Point::xy(2.0, 0.5);
        let d = f.apply(&a).euclid_dist(&f.apply(&b));
        assert!((d - 0.6 * a.euclid_dist(&b)).abs() < 1e-12);
    }
}
