//! Permeability analysis for self-similar sets and planar obstacle sets.

pub mod geom;
pub mod ifs;
pub mod num;
pub mod neighbors;
pub mod covers;
pub mod obstacles;
pub mod permeability;
