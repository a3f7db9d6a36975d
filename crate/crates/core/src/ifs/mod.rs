//! Similarity maps, iterated function systems, words and attractor covers.

pub mod catalog;
mod input;
mod similarity;
mod system;

use thiserror::Error;

use crate::geom::GeomError;

pub use input::{IfsSpec, MapSpec, NumLit};
pub use similarity::{MapKey, Similarity};
pub use system::{approximate, compose, curtail, Ball, IfsSystem, Piece, Word};
pub(crate) use system::{le as le_real, mul as mul_real};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IfsError {
    #[error("an IFS needs at least 2 maps, got {0}")]
    TooFewMaps(usize),
    #[error("map {index} has ratio {ratio}, not in (0, 1)")]
    NotContractive { index: usize, ratio: f64 },
    #[error("ratio {0} is not positive and finite")]
    BadRatio(f64),
    #[error("orthogonal part is not orthogonal")]
    NotOrthogonal,
    #[error("word index {index} outside 1..={m}")]
    IndexOutOfRange { index: usize, m: usize },
    #[error("rho = {0} outside (0, 1)")]
    BadRho(f64),
    #[error("resolution {resolution} is coarser than the piece size {piece}")]
    ResolutionTooCoarse { resolution: f64, piece: f64 },
    #[error("bounding ball is not forward invariant (excess {0})")]
    BallNotInvariant(f64),
    #[error("invalid IFS input: {0}")]
    Input(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
}
