use serde::{Deserialize, Serialize};

use super::GeomError;
use crate::num::{self, Rational};

/// Ambient dimension, 1 to 3.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct Dim(u8);

impl Dim {
    pub const ONE: Dim = Dim(1);
    pub const TWO: Dim = Dim(2);
    pub const THREE: Dim = Dim(3);

    pub fn new(d: usize) -> Result<Dim, GeomError> {
        match d {
            1..=3 => Ok(Dim(d as u8)),
            _ => Err(GeomError::UnsupportedDimension(d)),
        }
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }
}

impl TryFrom<u8> for Dim {
    type Error = GeomError;
    fn try_from(d: u8) -> Result<Self, Self::Error> {
        Dim::new(d as usize)
    }
}

impl From<Dim> for u8 {
    fn from(d: Dim) -> u8 {
        d.0
    }
}

/// A point of R^d. Carries exact coordinates when every input coordinate was rational.
#[derive(Clone, Copy, Debug)]
pub struct Point {
    dim: Dim,
    xs: [f64; 3],
    exact: Option<[Rational; 3]>,
}

impl PartialEq for Point {
    fn eq(&self, other: &Self) -> bool {
        if self.dim != other.dim {
            return false;
        }
        match (&self.exact, &other.exact) {
            (Some(a), Some(b)) => a == b,
            _ => self.coords() == other.coords(),
        }
    }
}

impl Point {
    pub fn new(coords: &[f64]) -> Result<Point, GeomError> {
        let dim = Dim::new(coords.len())?;
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(GeomError::NonFinite);
        }
        let mut xs = [0.0; 3];
        xs[..coords.len()].copy_from_slice(coords);
        Ok(Point { dim, xs, exact: None })
    }

    pub fn from_rationals(coords: &[Rational]) -> Result<Point, GeomError> {
        let dim = Dim::new(coords.len())?;
        let mut xs = [0.0; 3];
        let mut ex = [Rational::from_integer(0); 3];
        for (i, q) in coords.iter().enumerate() {
            xs[i] = num::to_f64(q);
            ex[i] = *q;
        }
        Ok(Point { dim, xs, exact: Some(ex) })
    }

    /// Rational coordinates are kept when every float is a short dyadic.
    pub fn from_f64_exactish(coords: &[f64]) -> Result<Point, GeomError> {
        let qs: Option<Vec<Rational>> = coords.iter().map(|&c| num::dyadic(c)).collect();
        match qs {
            Some(qs) => Point::from_rationals(&qs),
            None => Point::new(coords),
        }
    }

    /// Planar point; exact when both coordinates are short dyadics.
    pub fn xy(x: f64, y: f64) -> Point {
        let exact = match (num::dyadic(x), num::dyadic(y)) {
            (Some(a), Some(b)) => Some([a, b, Rational::from_integer(0)]),
            _ => None,
        };
        Point { dim: Dim::TWO, xs: [x, y, 0.0], exact }
    }

    pub fn origin(dim: Dim) -> Point {
        Point {
            dim,
            xs: [0.0; 3],
            exact: Some([Rational::from_integer(0); 3]),
        }
    }

    pub(crate) fn from_array(dim: Dim, xs: [f64; 3]) -> Point {
        Point { dim, xs, exact: None }
    }

    pub(crate) fn from_exact_array(dim: Dim, ex: [Rational; 3]) -> Point {
        let mut xs = [0.0; 3];
        for i in 0..dim.get() {
            xs[i] = num::to_f64(&ex[i]);
        }
        Point { dim, xs, exact: Some(ex) }
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn coords(&self) -> &[f64] {
        &self.xs[..self.dim.get()]
    }

    pub fn array(&self) -> [f64; 3] {
        self.xs
    }

    pub fn x(&self) -> f64 {
        self.xs[0]
    }

    pub fn y(&self) -> f64 {
        self.xs[1]
    }

    pub fn exact(&self) -> Option<&[Rational]> {
        self.exact.as_ref().map(|e| &e[..self.dim.get()])
    }

    pub(crate) fn exact_array(&self) -> Option<[Rational; 3]> {
        self.exact
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    fn check_dim(&self, other: &Point) -> Result<(), GeomError> {
        if self.dim != other.dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim.get(),
                found: other.dim.get(),
            });
        }
        Ok(())
    }

    /// `other - self` as a vector; exact when both points are.
    pub fn to(&self, other: &Point) -> Result<Point, GeomError> {
        self.check_dim(other)?;
        let d = self.dim.get();
        if let (Some(a), Some(b)) = (&self.exact, &other.exact) {
            let mut out = [Rational::from_integer(0); 3];
            let mut ok = true;
            for i in 0..d {
                match num::checked_sub(&b[i], &a[i]) {
                    Some(v) => out[i] = v,
                    None => ok = false,
                }
            }
            if ok {
                return Ok(Point::from_exact_array(self.dim, out));
            }
        }
        let mut xs = [0.0; 3];
        for i in 0..d {
            xs[i] = other.xs[i] - self.xs[i];
        }
        Ok(Point::from_array(self.dim, xs))
    }

    pub fn translate(&self, v: &[f64]) -> Point {
        let mut xs = self.xs;
        for (i, c) in v.iter().enumerate().take(self.dim.get()) {
            xs[i] += c;
        }
        Point::from_array(self.dim, xs)
    }

    pub fn euclid_dist(&self, other: &Point) -> f64 {
        dist(&self.xs, &other.xs)
    }

    pub fn midpoint(&self, other: &Point) -> Point {
        let mut xs = [0.0; 3];
        for i in 0..3 {
            xs[i] = 0.5 * (self.xs[i] + other.xs[i]);
        }
        Point::from_array(self.dim, xs)
    }
}

pub(crate) fn dist(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    (dx * dx + dy * dy + dz * dz).sqrt()
}

pub(crate) fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub(crate) fn norm2(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}
