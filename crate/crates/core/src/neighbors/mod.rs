//! Neighbor maps, the finite type closure and intersection points.

mod closure;
pub(crate) mod engine;
mod points;

use thiserror::Error;

use crate::ifs::IfsError;

pub use closure::{
    epsilon_sweep, expansion_defect, neighbor_closure, overlap_test, ClosureParams, ClosureStatus, EpsSweep,
    NeighborClosure, NeighborMap,
};
pub use points::{
    contact_points, intersection_points, pairwise_finiteness, Enclosure, FinitenessStatus, IntersectionSet, PairReport,
    PairVerdict, NON_SHRINKING, PAIR_CAP,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NeighborError {
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("neighbor closure overflowed its cap of {limit} maps")]
    Overflow { limit: usize },
    #[error(transparent)]
    Ifs(#[from] IfsError),
}
