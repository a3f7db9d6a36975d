//! Witness paths through obstacle complements and the diagnostics around them.

mod finite_type;
mod grid;
mod repair;
mod witness;

use serde::Serialize;
use thiserror::Error;

use crate::covers::CoverError;
use crate::geom::{GeomError, PolyPath};
use crate::ifs::IfsError;

pub use finite_type::{finite_type_witness_2d, FiniteTypeWitness, SpliceDisk};
pub use repair::{repair_path, RepairReport};
pub use witness::{
    angle_excess, cone_witness, count_intersections, witness_path, Intersections, PathComponent, WitnessOptions,
};

/// Components above this count read as countable rather than finite.
pub const FINITE_COMPONENT_CAP: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PermeabilityError {
    #[error("no path: {0}")]
    NoPath(String),
    #[error("no cone witness after {attempts} attempts")]
    NotFound { attempts: usize },
    #[error("no admissible parallel line; best intersection length {achieved} against budget {budget}")]
    NoAdmissibleLine { achieved: f64, budget: f64 },
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("search grid would need {0} cells")]
    TooLarge(u64),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Ifs(#[from] IfsError),
    #[error(transparent)]
    Cover(#[from] CoverError),
}

/// Finite-resolution reading of the null / finite / countable taxonomy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictHint {
    NullLike,
    FiniteLike,
    CountableLike,
    Blocked,
}

/// `Blocked` when the excess is above `delta`; otherwise by component count.
pub fn verdict_hint(excess: f64, delta: f64, components: usize) -> VerdictHint {
    if excess > delta + 1e-12 * delta.max(1.0) {
        VerdictHint::Blocked
    } else if components == 0 {
        VerdictHint::NullLike
    } else if components <= FINITE_COMPONENT_CAP {
        VerdictHint::FiniteLike
    } else {
        VerdictHint::CountableLike
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WitnessReport {
    pub vertices: Vec<[f64; 2]>,
    pub norm: String,
    pub length: f64,
    pub distance: f64,
    /// `length - distance` in the chosen norm.
    pub excess: f64,
    pub delta: f64,
    pub intersection_components: usize,
    pub level: Option<u32>,
    pub resolution: f64,
    pub verdict: VerdictHint,
    /// An endpoint sat in an obstacle cell and the search started from the nearest free cell.
    pub endpoint_adjusted: bool,
}

impl WitnessReport {
    pub fn path(&self) -> PolyPath {
        PolyPath::from_xy(&self.vertices).expect("report paths have two vertices")
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum LevelOutcome {
    Found(WitnessReport),
    NoPath { reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct LevelEntry {
    pub level: u32,
    pub obstacle_cells: Option<usize>,
    #[serde(flatten)]
    pub outcome: LevelOutcome,
}

/// Witness reports for fixed `(x, y, delta)` over increasing obstacle levels.
#[derive(Clone, Debug, Serialize)]
pub struct ProfileSeries {
    pub from: [f64; 2],
    pub to: [f64; 2],
    pub delta: f64,
    pub levels: Vec<LevelEntry>,
}

impl ProfileSeries {
    pub fn new(from: [f64; 2], to: [f64; 2], delta: f64) -> ProfileSeries {
        ProfileSeries { from, to, delta, levels: Vec::new() }
    }

    pub fn push(&mut self, entry: LevelEntry) -> Result<(), PermeabilityError> {
        if let Some(last) = self.levels.last() {
            if entry.level <= last.level {
                return Err(PermeabilityError::BadParameter(format!(
                    "level {} does not follow level {}",
                    entry.level, last.level
                )));
            }
        }
        self.levels.push(entry);
        Ok(())
    }

    pub fn all_blocked(&self) -> bool {
        !self.levels.is_empty() && self.levels.iter().all(|e| matches!(e.outcome, LevelOutcome::NoPath { .. }))
    }

    pub fn excesses(&self) -> Vec<Option<f64>> {
        self.levels
            .iter()
            .map(|e| match &e.outcome {
                LevelOutcome::Found(r) => Some(r.excess),
                LevelOutcome::NoPath { .. } => None,
            })
            .collect()
    }
}
