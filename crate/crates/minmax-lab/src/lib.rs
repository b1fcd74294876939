//! Numerical laboratory for Gauss maps of surfaces in S³, Moebius canonical
//! families, maps S³ → S² and finite-dimensional sweepout minmax.

pub mod algebra;
pub mod cli;
pub mod error;
pub mod grid;
pub mod minmax;
pub mod surface;
pub mod canonical;
pub mod spheremaps;
pub mod report;
pub mod scan;
pub mod verify;

pub use error::{LabError, Result};
