//! Exact q-series, E8 lattice geometry and certified evaluation of the
//! eight-dimensional magic function for sphere packing.

pub mod ball;
pub mod certify;
pub mod error;
pub mod evaluator;
pub mod lattice;
pub mod linalg;
pub mod modforms;
pub mod qseries;

pub use ball::{Mag, RealBall};
pub use error::{Error, Result};
pub use qseries::QSeries;
