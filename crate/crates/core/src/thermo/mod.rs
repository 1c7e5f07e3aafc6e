//! Discretised conformal repellers: covers, pressure, dimension and equilibrium states.

pub mod cover;
pub mod dimension;
pub mod measure;
pub mod pressure;

pub use cover::{build_markov_cover, Cell, Coding, MarkovCover};
pub use dimension::{bowen_root, hausdorff_dimension, hausdorff_dimension_with, DimensionOptions, DimensionReport};
pub use measure::{equilibrium_orbit_measure, lyapunov, observable_variance, variance, Atom, OrbitMeasure};
pub use pressure::{julia_cycles_dividing, orbit_pressure, pressure_matrix, pressure_orbits, PressureEstimate};
