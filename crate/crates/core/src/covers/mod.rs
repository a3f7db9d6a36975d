//! Square covers, separation constants, surrounding loops and scaling diagnostics.

mod contour;
mod delta;
mod dimension;
mod distance;
mod grid;
mod nagata;
mod porosity;
mod sequence;

use thiserror::Error;

use crate::geom::GeomError;
use crate::ifs::IfsError;
use crate::neighbors::NeighborError;

pub use contour::{contacts_near, outer_boundary, surrounding_loop, LoopResult};
pub use delta::{select_delta_k, DeltaK};
pub use dimension::{box_counts, box_counts_points, box_dimension, BoxCount, DimensionEstimate};
pub use grid::{grid_cover, grid_cover_boxes, SquareCover};
pub use nagata::{nagata_cover, CoverFamily, CoverPiece, NagataCover, SeparationFailure};
pub use porosity::{porosity_scan, sample_cell_centers, PorosityReport, PorosityVerdict, PorosityWitness};
pub use sequence::{cover_sequence, CoverLayer, CoverSequence, Rect};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoverError {
    #[error("covers are planar; got dimension {0}")]
    NotPlanar(usize),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("could not certify {what} (reached level {level})")]
    Certification { what: String, level: u32 },
    #[error("map {0} does not keep the coordinate axes")]
    NotAxisAligned(usize),
    #[error("cover boundary has {components} outer components, expected 1")]
    NotEnclosing { components: usize },
    #[error("cover would hold {0} squares")]
    TooLarge(usize),
    #[error(transparent)]
    Ifs(#[from] IfsError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Neighbor(#[from] NeighborError),
}
