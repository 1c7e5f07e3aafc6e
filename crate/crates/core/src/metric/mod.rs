//! Multiplier functions, the entropy functional `G = δ·M_ν` and the metrics it induces
//! on the parameter plane of `z^2 + c`.

pub mod entropy;
pub mod multiplier;
pub mod tensor;

pub use entropy::{entropy_functional, orbit_dimension, EntropyFunctionalRecord, DEFAULT_HORIZON};
pub use multiplier::{complex_multiplier_function, multiplier_function};
pub use tensor::{
    delta_hessian, g_gradient, g_metric, harmonicity_residual, pressure_metric, pressure_metric_routes,
    MetricKind, MetricTensor, PressureRoutes, DEFAULT_STEP,
};
