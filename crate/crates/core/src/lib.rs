//! Numerical laboratory for rotationally symmetric nonpositively curved
//! metrics that are flat in a tube around an axis, the twisted cylinders
//! they descend to, finite-field orthogonal-group holonomy elements, and the
//! Euclidean ingredients of closing arguments for fat flats.

pub mod arith;
pub mod cli;
pub mod cylinder;
pub mod error;
pub mod flats;
pub mod flow;
pub mod geometry;
pub mod profiles;
pub mod report;
pub mod suite;

pub use error::{Error, Result};
