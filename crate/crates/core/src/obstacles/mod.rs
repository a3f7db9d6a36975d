//! Exact obstacle generators: Cantor-type interval sets, the gap-threaded square boundaries and
//! Bedford-McMullen patterns.

mod bmc;
mod intervals;

use thiserror::Error;

use crate::geom::GeomError;

pub use bmc::{
    bmc_cells, bmc_pattern, bmc_window_check, min_crossing_variation, BmcCells, BmcPattern, CrossingBound,
    WindowCheck,
};
pub use intervals::{
    cantor_level, extrude, svc_level, theta_segments, theta_squares, Axis, IntervalSet, ThetaSquares,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObstacleError {
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("{what} would need {count} items (limit {limit})")]
    TooLarge { what: &'static str, count: u128, limit: u128 },
    #[error("invalid pattern: {0}")]
    Pattern(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
}
