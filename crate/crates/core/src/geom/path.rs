use super::point::{dot, norm2, sub};
use super::{Dim, GeomError, Norm, Point};
use crate::num::{self, Rational};

/// Directed segment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Segment {
    pub start: Point,
    pub end: Point,
}

impl Segment {
    pub fn new(start: Point, end: Point) -> Result<Segment, GeomError> {
        if start.dim() != end.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: start.dim().get(),
                found: end.dim().get(),
            });
        }
        Ok(Segment { start, end })
    }

    pub fn direction(&self) -> [f64; 3] {
        sub(&self.end.array(), &self.start.array())
    }

    pub fn is_degenerate(&self) -> bool {
        self.start == self.end
    }

    pub fn euclid_len(&self) -> f64 {
        norm2(&self.direction())
    }

    pub fn point_at(&self, t: f64) -> Point {
        let a = self.start.array();
        let d = self.direction();
        Point::from_array(self.start.dim(), [a[0] + t * d[0], a[1] + t * d[1], a[2] + t * d[2]])
    }
}

/// Polygonal chain. Consecutive duplicate vertices are dropped on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyPath {
    vertices: Vec<Point>,
}

impl PolyPath {
    pub fn new(points: Vec<Point>) -> Result<PolyPath, GeomError> {
        if points.len() < 2 {
            return Err(GeomError::TooFewVertices(points.len()));
        }
        let dim = points[0].dim();
        let mut vertices: Vec<Point> = Vec::with_capacity(points.len());
        for p in points {
            if p.dim() != dim {
                return Err(GeomError::DimensionMismatch {
                    expected: dim.get(),
                    found: p.dim().get(),
                });
            }
            if vertices.last() != Some(&p) {
                vertices.push(p);
            }
        }
        Ok(PolyPath { vertices })
    }

    pub fn from_xy(points: &[[f64; 2]]) -> Result<PolyPath, GeomError> {
        PolyPath::new(points.iter().map(|p| Point::xy(p[0], p[1])).collect())
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn dim(&self) -> Dim {
        self.vertices[0].dim()
    }

    pub fn start(&self) -> &Point {
        &self.vertices[0]
    }

    pub fn end(&self) -> &Point {
        self.vertices.last().expect("path has a vertex")
    }

    /// True when every vertex coincides (all duplicates collapsed).
    pub fn is_degenerate(&self) -> bool {
        self.vertices.len() < 2
    }

    pub fn segments(&self) -> impl Iterator<Item = Segment> + '_ {
        self.vertices.windows(2).map(|w| Segment { start: w[0], end: w[1] })
    }

    pub fn reversed(&self) -> PolyPath {
        let mut v = self.vertices.clone();
        v.reverse();
        PolyPath { vertices: v }
    }

    /// Concatenation; `other` must start where `self` ends.
    pub fn concat(&self, other: &PolyPath) -> Result<PolyPath, GeomError> {
        if self.end().euclid_dist(other.start()) > 1e-12 {
            return Err(GeomError::NotContiguous);
        }
        let mut v = self.vertices.clone();
        v.extend_from_slice(&other.vertices[1..]);
        PolyPath::new_unchecked(v)
    }

    pub(crate) fn new_unchecked(points: Vec<Point>) -> Result<PolyPath, GeomError> {
        let mut vertices: Vec<Point> = Vec::with_capacity(points.len());
        for p in points {
            if vertices.last() != Some(&p) {
                vertices.push(p);
            }
        }
        if vertices.is_empty() {
            return Err(GeomError::TooFewVertices(0));
        }
        Ok(PolyPath { vertices })
    }

    pub fn euclid_len(&self) -> f64 {
        self.segments().map(|s| s.euclid_len()).sum()
    }
}

/// Path length with its exact value when the norm and coordinates allow one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Length {
    pub value: f64,
    pub exact: Option<Rational>,
}

pub fn path_length(path: &PolyPath, norm: &Norm) -> Result<Length, GeomError> {
    norm.validate(path.dim())?;
    let mut value = 0.0;
    let mut exact = Some(Rational::from_integer(0));
    for w in path.vertices.windows(2) {
        let v = w[0].to(&w[1])?;
        value += norm.eval(v.coords());
        exact = match (exact, v.exact()) {
            (Some(acc), Some(ev)) => norm
                .eval_exact(ev)
                .and_then(|len| num::checked_add(&acc, &len)),
            _ => None,
        };
    }
    if let Some(q) = exact {
        value = num::to_f64(&q);
    }
    Ok(Length { value, exact })
}

/// Angle between the direction vectors, in [0, pi].
pub fn segment_angle(a: &Segment, b: &Segment) -> Result<f64, GeomError> {
    if a.is_degenerate() || b.is_degenerate() {
        return Err(GeomError::DegenerateSegment);
    }
    if a.start.dim() != b.start.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: a.start.dim().get(),
            found: b.start.dim().get(),
        });
    }
    Ok(vector_angle(&a.direction(), &b.direction()))
}

pub(crate) fn vector_angle(u: &[f64; 3], v: &[f64; 3]) -> f64 {
    let c = dot(u, v) / (norm2(u) * norm2(v));
    c.clamp(-1.0, 1.0).acos()
}

/// `(x+y)/2 + s(y-x)/2 + (1-|s|) z` with `z` in the mid-disk orthogonal to `y - x`.
pub fn double_cone_point(x: &Point, y: &Point, delta: f64, s: f64, z: &Point) -> Result<Point, GeomError> {
    if !(delta > 0.0) {
        return Err(GeomError::NonPositive("delta"));
    }
    if !(s.abs() <= 1.0) {
        return Err(GeomError::ConeParameter(s));
    }
    let axis = x.to(y)?;
    if z.dim() != x.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: x.dim().get(),
            found: z.dim().get(),
        });
    }
    let a = axis.array();
    let za = z.array();
    let la = norm2(&a);
    if la == 0.0 {
        return Err(GeomError::DegenerateSegment);
    }
    let lz = norm2(&za);
    if dot(&a, &za).abs() > 1e-9 * la * lz.max(1.0) {
        return Err(GeomError::NotOrthogonal);
    }
    if lz > delta * (1.0 + 1e-12) {
        return Err(GeomError::OutsideMidDisk { norm: lz, delta });
    }
    let (xa, ya) = (x.array(), y.array());
    let w = 1.0 - s.abs();
    let mut out = [0.0; 3];
    for i in 0..3 {
        out[i] = 0.5 * (xa[i] + ya[i]) + 0.5 * s * a[i] + w * za[i];
    }
    // apexes are returned exactly
    if s == -1.0 {
        return Ok(*x);
    }
    if s == 1.0 {
        return Ok(*y);
    }
    Ok(Point::from_array(x.dim(), out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lengths() {
        let p = PolyPath::from_xy(&[[0.0, 0.0], [3.0, 4.0]]).unwrap();
        assert_eq!(path_length(&p, &Norm::Euclidean).unwrap().value, 5.0);
        let l1 = path_length(&p, &Norm::taxicab()).unwrap();
        assert_eq!(l1.exact, Some(Rational::from_integer(7)));
        let l = PolyPath::from_xy(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]).unwrap();
        assert_eq!(path_length(&l, &Norm::Euclidean).unwrap().value, 2.0);
    }

    #[test]
    fn collapses_duplicates() {
        let p = PolyPath::from_xy(&[[0.0, 0.0], [0.0, 0.0], [1.0, 0.0], [1.0, 0.0]]).unwrap();
        assert_eq!(p.vertices().len(), 2);
    }

    #[test]
    fn angles() {
        let e = Segment::new(Point::xy(0.0, 0.0), Point::xy(1.0, 0.0)).unwrap();
        let par = Segment::new(Point::xy(5.0, 5.0), Point::xy(7.0, 5.0)).unwrap();
        let opp = Segment::new(Point::xy(0.0, 0.0), Point::xy(-1.0, 0.0)).unwrap();
        let up = Segment::new(Point::xy(0.0, 0.0), Point::xy(0.0, 3.0)).unwrap();
        assert_eq!(segment_angle(&e, &par).unwrap(), 0.0);
        assert!((segment_angle(&e, &opp).unwrap() - std::f64::consts::PI).abs() < 1e-15);
        assert!((segment_angle(&e, &up).unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let dot = Segment::new(Point::xy(1.0, 1.0), Point::xy(1.0, 1.0)).unwrap();
        assert_eq!(segment_angle(&e, &dot), Err(GeomError::DegenerateSegment));
    }

    #[test]
    fn cone_points() {
        let x = Point::xy(0.0, 0.0);
        let y = Point::xy(2.0, 0.0);
        let z = Point::xy(0.0, 0.5);
        assert_eq!(double_cone_point(&x, &y, 1.0, -1.0, &z).unwrap(), x);
        assert_eq!(double_cone_point(&x, &y, 1.0, 1.0, &z).unwrap(), y);
        let mid = double_cone_point(&x, &y, 1.0, 0.0, &z).unwrap();
        assert_eq!(mid.coords(), &[1.0, 0.5]);
        assert!(double_cone_point(&x, &y, 1.0, 1.5, &z).is_err());
        assert_eq!(
            double_cone_point(&x, &y, 1.0, 0.0, &Point::xy(0.3, 0.3)),
            Err(GeomError::NotOrthogonal)
        );
    }
}
