use serde::{Deserialize, Serialize};

use super::{Dim, GeomError};
use crate::num::{self, Rational};

/// Norms on R^d. `P(1.0)` and `P(f64::INFINITY)` are the taxicab and sup norms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Norm {
    Euclidean,
    P { p: f64 },
    Polygon(PolygonNorm),
}

impl Norm {
    pub fn taxicab() -> Norm {
        Norm::P { p: 1.0 }
    }

    pub fn sup() -> Norm {
        Norm::P { p: f64::INFINITY }
    }

    pub fn p(p: f64) -> Result<Norm, GeomError> {
        if p.is_nan() || p < 1.0 {
            return Err(GeomError::InvalidNorm(format!("p = {p} is below 1")));
        }
        Ok(Norm::P { p })
    }

    pub fn validate(&self, dim: Dim) -> Result<(), GeomError> {
        match self {
            Norm::Euclidean => Ok(()),
            Norm::P { p } if p.is_nan() || *p < 1.0 => {
                Err(GeomError::InvalidNorm(format!("p = {p} is below 1")))
            }
            Norm::P { .. } => Ok(()),
            Norm::Polygon(_) if dim != Dim::TWO => Err(GeomError::InvalidNorm(
                "polygonal unit balls are planar only".into(),
            )),
            Norm::Polygon(_) => Ok(()),
        }
    }

    pub fn eval(&self, v: &[f64]) -> f64 {
        match self {
            Norm::Euclidean => v.iter().map(|c| c * c).sum::<f64>().sqrt(),
            Norm::P { p } if p.is_infinite() => v.iter().fold(0.0, |m, c| m.max(c.abs())),
            Norm::P { p } if *p == 1.0 => v.iter().map(|c| c.abs()).sum(),
            Norm::P { p } if *p == 2.0 => v.iter().map(|c| c * c).sum::<f64>().sqrt(),
            Norm::P { p } => {
                let m = v.iter().fold(0.0f64, |m, c| m.max(c.abs()));
                if m == 0.0 {
                    return 0.0;
                }
                m * v.iter().map(|c| (c.abs() / m).powf(*p)).sum::<f64>().powf(1.0 / p)
            }
            Norm::Polygon(poly) => poly.gauge(v),
        }
    }

    /// Exact value for the taxicab and sup norms on rational vectors.
    pub fn eval_exact(&self, v: &[Rational]) -> Option<Rational> {
        match self {
            Norm::P { p } if *p == 1.0 => {
                let mut acc = Rational::from_integer(0);
                for c in v {
                    acc = num::checked_add(&acc, &num::abs(c))?;
                }
                Some(acc)
            }
            Norm::P { p } if p.is_infinite() => {
                v.iter().map(num::abs).max().or(Some(Rational::from_integer(0)))
            }
            _ => None,
        }
    }

    /// Unit sphere contains no segment.
    pub fn is_strictly_convex(&self) -> bool {
        match self {
            Norm::Euclidean => true,
            Norm::P { p } => *p > 1.0 && p.is_finite(),
            Norm::Polygon(_) => false,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Norm::Euclidean => "euclidean".into(),
            Norm::P { p } if p.is_infinite() => "sup".into(),
            Norm::P { p } => format!("p{p}"),
            Norm::Polygon(poly) => format!("polygon{}", poly.vertices.len()),
        }
    }
}

/// A centrally symmetric convex polygon used as a unit ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolygonSpec", into = "PolygonSpec")]
pub struct PolygonNorm {
    vertices: Vec<[f64; 2]>,
    /// Outward edge normals scaled so that the edge line is `a . p = 1`.
    facets: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolygonSpec {
    pub vertices: Vec<[f64; 2]>,
}

impl TryFrom<PolygonSpec> for PolygonNorm {
    type Error = GeomError;
    fn try_from(s: PolygonSpec) -> Result<Self, Self::Error> {
        PolygonNorm::new(s.vertices)
    }
}

impl From<PolygonNorm> for PolygonSpec {
    fn from(p: PolygonNorm) -> Self {
        PolygonSpec { vertices: p.vertices }
    }
}

impl PolygonNorm {
    /// Vertices in counterclockwise order.
    pub fn new(vertices: Vec<[f64; 2]>) -> Result<PolygonNorm, GeomError> {
        let n = vertices.len();
        if n < 4 || n % 2 != 0 {
            return Err(GeomError::InvalidNorm(
                "unit polygon needs an even number (>= 4) of vertices".into(),
            ));
        }
        let scale = vertices.iter().fold(0.0f64, |m, v| m.max(v[0].abs()).max(v[1].abs()));
        let tol = 1e-9 * scale.max(1.0);
        for (i, v) in vertices.iter().enumerate() {
            let w = vertices[(i + n / 2) % n];
            if (v[0] + w[0]).abs() > tol || (v[1] + w[1]).abs() > tol {
                return Err(GeomError::InvalidNorm("unit polygon is not centrally symmetric".into()));
            }
        }
        let mut facets = Vec::with_capacity(n);
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            let cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0]);
            if cross <= 0.0 {
                return Err(GeomError::InvalidNorm(
                    "unit polygon must be strictly convex and counterclockwise".into(),
                ));
            }
            // outward normal of edge ab
            let nrm = [b[1] - a[1], a[0] - b[0]];
            let off = nrm[0] * a[0] + nrm[1] * a[1];
            if off <= 0.0 {
                return Err(GeomError::InvalidNorm("origin must be interior".into()));
            }
            facets.push([nrm[0] / off, nrm[1] / off]);
        }
        Ok(PolygonNorm { vertices, facets })
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    fn gauge(&self, v: &[f64]) -> f64 {
        self.facets
            .iter()
            .map(|a| a[0] * v[0] + a[1] * v[1])
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_polygon_is_sup_norm() {
        let sq = PolygonNorm::new(vec![[1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0]]).unwrap();
        let n = Norm::Polygon(sq);
        for v in [[0.3, -2.0], [1.0, 1.0], [-0.5, 0.25]] {
            assert!((n.eval(&v) - Norm::sup().eval(&v)).abs() < 1e-12);
        }
        assert!(!n.is_strictly_convex());
    }

    #[test]
    fn rejects_asymmetric_polygon() {
        assert!(PolygonNorm::new(vec![[1.0, 0.0], [0.0, 1.0], [-1.0, 0.0], [0.0, -2.0]]).is_err());
    }

    #[test]
    fn p_norm_values() {
        let v = [3.0, 4.0];
        assert!((Norm::p(2.0).unwrap().eval(&v) - 5.0).abs() < 1e-12);
        assert!((Norm::p(3.0).unwrap().eval(&v) - 91f64.powf(1.0 / 3.0)).abs() < 1e-12);
        assert!(Norm::p(0.5).is_err());
    }
}
