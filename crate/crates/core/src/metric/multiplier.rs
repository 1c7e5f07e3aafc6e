use num_complex::Complex64;
use rayon::prelude::*;

use crate::cycles::{continue_cycle_tracked, Cycle};
use crate::error::{Error, Result};
use crate::thermo::OrbitMeasure;

/// Nominal continuation steps for a parameter displacement `dc`.
pub(crate) fn steps_for(dc: Complex64) -> usize {
    ((dc.norm() / 0.02).ceil() as usize).max(1)
}

pub(crate) fn measure_base(measure: &OrbitMeasure) -> Result<Complex64> {
    measure.base().ok_or_else(|| {
        Error::InvalidInput("orbit measure has no base parameter; build it from a quadratic map".into())
    })
}

/// Continues one cycle, tagging failures with the cycle they came from.
pub(crate) fn follow(cycle: &Cycle, c0: Complex64, c: Complex64) -> Result<(Cycle, Complex64)> {
    continue_cycle_tracked(cycle, c0, c, steps_for(c - c0)).map_err(|e| match e {
        Error::ContinuationFailed(msg) => Error::ContinuationFailed(format!(
            "period-{} cycle through {:.6}: {msg}",
            cycle.period(),
            cycle.canonical_point()
        )),
        other => other,
    })
}

/// `M_μ(c) = Σ w (1/k) log|λ(φ_c(x̂))|`, each atom continued from the measure's base to `c`.
pub fn multiplier_function(measure: &OrbitMeasure, c: Complex64) -> Result<f64> {
    Ok(complex_multiplier_function(measure, c)?.re)
}

/// `M̃_μ(c) = Σ w (1/k) log λ(φ_c(x̂))`, the logarithm continued along the
/// segment from the base so that it is holomorphic in `c`.
pub fn complex_multiplier_function(measure: &OrbitMeasure, c: Complex64) -> Result<Complex64> {
    let c0 = measure_base(measure)?;
    if !c.re.is_finite() || !c.im.is_finite() {
        return Err(Error::InvalidInput(format!("parameter must be finite, got {c}")));
    }
    let logs: Vec<Complex64> = measure
        .atoms()
        .par_iter()
        .map(|a| follow(&a.cycle, c0, c).map(|(_, log)| log))
        .collect::<Result<_>>()?;
    Ok(measure
        .atoms()
        .iter()
        .zip(&logs)
        .map(|(a, log)| log * (a.weight / a.cycle.period() as f64))
        .sum())
}
