//! Points, norms, segments, polygonal paths and conservative cell covers.

mod cells;
mod norm;
mod path;
mod point;

use thiserror::Error;

pub use cells::{
    box_segment_dist, neighborhood, rasterize_ball, rasterize_box, segment_cell_contacts, Cell,
    CellOracle, CellSet, Region, Resolution,
};
pub use norm::{Norm, PolygonNorm, PolygonSpec};
pub use path::{double_cone_point, path_length, segment_angle, Length, PolyPath, Segment};
pub(crate) use path::vector_angle;
pub use point::{Dim, Point};
pub(crate) use point::{dist, norm2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("dimension {0} is not supported (expected 1, 2 or 3)")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("coordinate is not finite")]
    NonFinite,
    #[error("invalid norm: {0}")]
    InvalidNorm(String),
    #[error("segment has coincident endpoints")]
    DegenerateSegment,
    #[error("z is not orthogonal to y - x")]
    NotOrthogonal,
    #[error("z has norm {norm} outside the mid-disk of radius {delta}")]
    OutsideMidDisk { norm: f64, delta: f64 },
    #[error("cone parameter s = {0} outside [-1, 1]")]
    ConeParameter(f64),
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("a path needs at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("paths do not join end to start")]
    NotContiguous,
    #[error("cell sets have different resolutions")]
    ResolutionMismatch,
    #[error("cover would need {0} cells, above the limit")]
    TooManyCells(u64),
}
