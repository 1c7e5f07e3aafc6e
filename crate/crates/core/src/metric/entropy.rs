use num_complex::Complex64;
use rayon::prelude::*;

use crate::cycles::Cycle;
use crate::error::{Error, Result};
use crate::metric::multiplier::follow;
use crate::poly::PolyMap;
use crate::thermo::measure::equilibrium_from_cycles;
use crate::thermo::{julia_cycles_dividing, OrbitMeasure};

/// Default period horizon for metric evaluations.
pub const DEFAULT_HORIZON: usize = 10;

/// `G_f = δ(f)·M_ν(f)` at a base parameter, with the orbit approximation of ν
/// that later evaluations reuse.
#[derive(Clone, Debug)]
pub struct EntropyFunctionalRecord {
    pub base: Complex64,
    pub delta0: f64,
    pub lyap0: f64,
    pub measure: OrbitMeasure,
    pub g0: f64,
}

impl EntropyFunctionalRecord {
    /// Builds the record for `z^2 + c0` from all repelling cycles whose period divides `n`.
    ///
    /// `delta0` is the orbit dimension at horizon `n` (see [`orbit_dimension`]), so the
    /// atoms' weights `k |λ|^(-δ n/k)` already sum to one.
    pub fn new(c0: Complex64, n: usize) -> Result<Self> {
        let map = PolyMap::quadratic(c0);
        let cycles = julia_cycles_dividing(&map, n)?;
        if cycles.is_empty() {
            return Err(Error::NoCycles(n));
        }
        let delta0 = orbit_dimension(&cycles, n)?;
        let measure = equilibrium_from_cycles(cycles, delta0, n, Some(c0))?;
        let lyap0: f64 = measure
            .atoms()
            .iter()
            .map(|a| a.weight * a.cycle.multiplier().norm().ln() / a.cycle.period() as f64)
            .sum();
        if !(delta0 > 0.0 && delta0 < 2.0) || !(lyap0 > 0.0) {
            return Err(Error::Regime(format!(
                "entropy functional needs 0 < δ < 2 and M > 0, got δ = {delta0}, M = {lyap0}"
            )));
        }
        Ok(Self {
            base: c0,
            delta0,
            lyap0,
            measure,
            g0: delta0 * lyap0,
        })
    }

    pub fn horizon(&self) -> usize {
        self.measure.period_horizon()
    }
}

/// Root `s` of `Σ k |λ|^(-s n/k) = 1` over cycles whose periods divide `n`:
/// the dimension the horizon-`n` orbit sums see.
pub fn orbit_dimension(cycles: &[Cycle], n: usize) -> Result<f64> {
    let logs: Vec<(f64, f64)> = cycles
        .iter()
        .map(|c| {
            let k = c.period() as f64;
            (k.ln(), n as f64 / k * c.multiplier().norm().ln())
        })
        .collect();
    dimension_from_logs(&logs)
}

/// `logs[x] = (log k, (n/k) log|λ|)`.
fn dimension_from_logs(logs: &[(f64, f64)]) -> Result<f64> {
    if logs.is_empty() || logs.iter().any(|&(_, l)| !(l > 0.0)) {
        return Err(Error::Regime("orbit dimension needs repelling cycles".into()));
    }
    let eval = |s: f64| {
        let terms: Vec<f64> = logs.iter().map(|(lk, l)| lk - s * l).collect();
        let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        let mut slope = 0.0;
        for (t, (_, l)) in terms.iter().zip(logs) {
            let w = (t - top).exp();
            sum += w;
            slope -= w * l;
        }
        (top + sum.ln(), slope / sum)
    };
    // The function is convex and decreasing, so Newton from s = 0 increases
    // monotonically to the root.
    let mut s = 0.0;
    for _ in 0..200 {
        let (v, d) = eval(s);
        let step = -v / d;
        s += step;
        if step.abs() <= 1e-15 * s.abs().max(1.0) {
            return Ok(s);
        }
    }
    Err(Error::Regime("orbit dimension iteration did not converge".into()))
}

/// `G(c) = δ_n(c)·M_ν(c)`: both factors come from the record's cycles continued to `c`.
pub fn entropy_functional(record: &EntropyFunctionalRecord, c: Complex64) -> Result<f64> {
    if !c.re.is_finite() || !c.im.is_finite() {
        return Err(Error::InvalidInput(format!("parameter must be finite, got {c}")));
    }
    let n = record.horizon() as f64;
    let atoms = record.measure.atoms();
    let ells: Vec<f64> = atoms
        .par_iter()
        .map(|a| follow(&a.cycle, record.base, c).map(|(cy, _)| n / cy.period() as f64 * cy.multiplier().norm().ln()))
        .collect::<Result<_>>()?;
    let logs: Vec<(f64, f64)> = atoms
        .iter()
        .zip(&ells)
        .map(|(a, &l)| ((a.cycle.period() as f64).ln(), l))
        .collect();
    let delta = dimension_from_logs(&logs)?;
    let lyap: f64 = atoms.iter().zip(&ells).map(|(a, l)| a.weight * l).sum::<f64>() / n;
    Ok(delta * lyap)
}
