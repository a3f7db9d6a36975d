use serde::{Deserialize, Serialize};

use crate::num::{Rational, Real};

use super::{IfsError, IfsSystem, Similarity};

/// A number in an input file: JSON number or a string such as `"1/3"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NumLit {
    Number(serde_json::Number),
    Text(String),
}

impl NumLit {
    pub fn to_real(&self) -> Result<Real, IfsError> {
        let text = match self {
            NumLit::Number(n) => n.to_string(),
            NumLit::Text(s) => s.clone(),
        };
        text.parse::<Real>().map_err(|e| IfsError::Input(e.to_string()))
    }
}

impl From<Real> for NumLit {
    fn from(r: Real) -> Self {
        match r {
            Real::Exact(q) => NumLit::Text(crate::num::rational_string(&q)),
            Real::Float(x) => NumLit::Number(
                serde_json::Number::from_f64(x).unwrap_or_else(|| serde_json::Number::from(0)),
            ),
        }
    }
}

fn zero() -> NumLit {
    NumLit::Number(0.into())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub ratio: NumLit,
    #[serde(default = "zero")]
    pub rotation_deg: NumLit,
    #[serde(default)]
    pub reflect: bool,
    pub translate: Vec<NumLit>,
    /// Orthogonal part as rows, for `dim = 3`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<NumLit>>>,
}

/// IFS input file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IfsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: usize,
    pub maps: Vec<MapSpec>,
}

impl IfsSpec {
    pub fn from_json(text: &str) -> Result<IfsSpec, IfsError> {
        serde_json::from_str(text).map_err(|e| IfsError::Input(format!("line {} column {}: {e}", e.line(), e.column())))
    }

    pub fn build(&self) -> Result<IfsSystem, IfsError> {
        let mut maps = Vec::with_capacity(self.maps.len());
        for (k, m) in self.maps.iter().enumerate() {
            if m.translate.len() != self.dim {
                return Err(IfsError::Input(format!(
                    "map {}: translate has {} entries for dim {}",
                    k + 1,
                    m.translate.len(),
                    self.dim
                )));
            }
            let t: Vec<Real> = m.translate.iter().map(NumLit::to_real).collect::<Result<_, _>>()?;
            let ratio = m.ratio.to_real()?;
            let f = match self.dim {
                1 => {
                    let rot = m.rotation_deg.to_real()?;
                    let half_turn = match rot.exact() {
                        Some(q) if q == Rational::from_integer(0) => false,
                        Some(q) if q == Rational::from_integer(180) => true,
                        _ => return Err(IfsError::Input("dim 1 allows rotation 0 or 180 only".into())),
                    };
                    Similarity::linear1d(ratio, m.reflect ^ half_turn, t[0])?
                }
                2 => Similarity::planar(ratio, m.rotation_deg.to_real()?, m.reflect, [t[0], t[1]])?,
                3 => {
                    let one = Real::Exact(Rational::from_integer(1));
                    let nil = Real::Exact(Rational::from_integer(0));
                    let mut q = [[nil; 3]; 3];
                    match &m.matrix {
                        Some(rows) => {
                            if rows.len() != 3 || rows.iter().any(|r| r.len() != 3) {
                                return Err(IfsError::Input("matrix must be 3x3".into()));
                            }
                            for i in 0..3 {
                                for j in 0..3 {
                                    q[i][j] = rows[i][j].to_real()?;
                                }
                            }
                        }
                        None => {
                            for (i, row) in q.iter_mut().enumerate() {
                                row[i] = one;
                            }
                        }
                    }
                    Similarity::spatial(ratio, q, [t[0], t[1], t[2]])?
                }
                d => return Err(crate::geom::GeomError::UnsupportedDimension(d).into()),
            };
            maps.push(f);
        }
        IfsSystem::new(maps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals_and_numbers() {
        let spec = IfsSpec::from_json(
            r#"{"dim": 2, "maps": [
                {"ratio": "1/3", "translate": [0, 0]},
                {"ratio": "1/3", "translate": ["2/3", 0.0]}
            ]}"#,
        )
        .unwrap();
        let ifs = spec.build().unwrap();
        assert!(ifs.is_exact());
        assert_eq!(ifs.r_max(), Real::Exact(Rational::new(1, 3)));
    }

    #[test]
    fn rejects_expanding_map() {
        let spec = IfsSpec::from_json(
            r#"{"dim": 1, "maps": [{"ratio": 2, "translate": [0]}, {"ratio": 0.5, "translate": [1]}]}"#,
        )
        .unwrap();
        assert!(matches!(spec.build(), Err(IfsError::NotContractive { index: 1, .. })));
    }
}
