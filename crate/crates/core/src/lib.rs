//! Thermodynamic formalism for hyperbolic polynomial maps.

pub mod critical;
pub mod cycles;
pub mod error;
pub mod metric;
pub mod poly;
pub mod report;
pub mod roots;
pub mod scan;
pub mod stats;
pub mod thermo;

pub use error::{Error, ErrorClass, Result};
pub use num_complex::Complex64;
