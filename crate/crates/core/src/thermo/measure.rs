//! Orbit measures: weighted collections of repelling cycles, equilibrium
//! approximations and variances.

use num_complex::Complex64;

use crate::cycles::Cycle;
use crate::error::{Error, Result};
use crate::poly::PolyMap;
use crate::thermo::pressure::{julia_cycles_dividing, log_sum_exp};

#[derive(Clone, Debug, PartialEq)]
pub struct Atom {
    pub cycle: Cycle,
    pub weight: f64,
}

/// A probability measure carried by finitely many repelling cycles, each cycle
/// spreading its weight uniformly over its points.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitMeasure {
    atoms: Vec<Atom>,
    period_horizon: usize,
    base: Option<Complex64>,
}

impl OrbitMeasure {
    /// Validates and normalises `atoms`. `base` is the family parameter the
    /// cycles belong to, needed to continue them to other parameters.
    pub fn new(atoms: Vec<Atom>, period_horizon: usize, base: Option<Complex64>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidInput("an orbit measure needs at least one atom".into()));
        }
        if atoms.iter().any(|a| !(a.weight >= 0.0) || !a.weight.is_finite()) {
            return Err(Error::InvalidInput("atom weights must be finite and nonnegative".into()));
        }
        if atoms.iter().any(|a| !a.cycle.is_repelling()) {
            return Err(Error::InvalidInput("orbit measures are carried by repelling cycles".into()));
        }
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if !(total > 0.0) {
            return Err(Error::InvalidInput("total atom weight must be positive".into()));
        }
        let atoms = atoms
            .into_iter()
            .map(|a| Atom {
                weight: a.weight / total,
                cycle: a.cycle,
            })
            .collect();
        Ok(Self {
            atoms,
            period_horizon,
            base,
        })
    }

    /// The primitive orbit measure of a single cycle.
    pub fn primitive(cycle: Cycle, base: Option<Complex64>) -> Result<Self> {
        let k = cycle.period();
        Self::new(vec![Atom { cycle, weight: 1.0 }], k, base)
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn period_horizon(&self) -> usize {
        self.period_horizon
    }

    pub fn base(&self) -> Option<Complex64> {
        self.base
    }

    pub fn total_weight(&self) -> f64 {
        self.atoms.iter().map(|a| a.weight).sum()
    }
}

/// Periodic-orbit approximation of the equilibrium state of `-δ log|f'|`.
///
/// Every repelling cycle whose period `k` divides `n` is an atom. Each of its
/// `k` points is a fixed point of `f^n` with `|(f^n)'| = |λ|^(n/k)`, so the
/// cycle's weight is `k |λ|^(-δ n/k)` before normalisation.
pub fn equilibrium_orbit_measure(map: &PolyMap, delta: f64, n: usize) -> Result<OrbitMeasure> {
    let cycles = julia_cycles_dividing(map, n)?;
    equilibrium_from_cycles(cycles, delta, n, map.family_param())
}

pub(crate) fn equilibrium_from_cycles(
    cycles: Vec<Cycle>,
    delta: f64,
    n: usize,
    base: Option<Complex64>,
) -> Result<OrbitMeasure> {
    if cycles.is_empty() {
        return Err(Error::NoCycles(n));
    }
    let logs: Vec<f64> = cycles
        .iter()
        .map(|c| {
            let k = c.period() as f64;
            k.ln() - delta * (n as f64 / k) * c.multiplier().norm().ln()
        })
        .collect();
    let norm = log_sum_exp(&logs);
    let atoms = cycles
        .into_iter()
        .zip(&logs)
        .map(|(cycle, l)| Atom {
            cycle,
            weight: (l - norm).exp(),
        })
        .collect();
    OrbitMeasure::new(atoms, n, base)
}

/// `∫ log|f'| dμ`: each atom contributes its weight times the average of
/// `log|f'|` over the cycle, which is `(1/k) log|λ|`.
pub fn lyapunov(measure: &OrbitMeasure, map: &PolyMap) -> f64 {
    measure
        .atoms()
        .iter()
        .map(|a| {
            let pts = a.cycle.points();
            let sum: f64 = pts.iter().map(|&z| map.derivative(z).norm().ln()).sum();
            a.weight * sum / pts.len() as f64
        })
        .sum()
}

/// Variance of `log|f'|` under the equilibrium state of `-base_delta log|f'|`,
/// as the second derivative of `t ↦ P_n(base_delta - t)` by a central
/// difference with step `scale`.
pub fn variance(map: &PolyMap, base_delta: f64, scale: f64, n: usize) -> Result<f64> {
    let cycles = julia_cycles_dividing(map, n)?;
    observable_variance_on(&cycles, base_delta, |c| c.multiplier().norm().ln(), scale, n)
}

/// Variance of a cycle observable `ψ` under the same equilibrium state.
///
/// `birkhoff(cycle)` must return the sum of `ψ` over one period of the cycle.
/// The tilted pressure `P_n(t) = (1/n) log Σ |(f^n)'|^(-δ) e^{t S_n ψ}` is
/// differenced at `t = ±scale`.
pub fn observable_variance<F>(map: &PolyMap, base_delta: f64, birkhoff: F, scale: f64, n: usize) -> Result<f64>
where
    F: Fn(&Cycle) -> f64,
{
    let cycles = julia_cycles_dividing(map, n)?;
    observable_variance_on(&cycles, base_delta, birkhoff, scale, n)
}

fn observable_variance_on<F>(cycles: &[Cycle], delta: f64, birkhoff: F, scale: f64, n: usize) -> Result<f64>
where
    F: Fn(&Cycle) -> f64,
{
    if cycles.is_empty() {
        return Err(Error::NoCycles(n));
    }
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::InvalidInput(format!("variance step must be positive, got {scale}")));
    }
    let base: Vec<(f64, f64)> = cycles
        .iter()
        .map(|c| {
            let k = c.period() as f64;
            let reps = n as f64 / k;
            (k.ln() - delta * reps * c.multiplier().norm().ln(), reps * birkhoff(c))
        })
        .collect();
    let tilted = |t: f64| {
        let terms: Vec<f64> = base.iter().map(|(l, s)| l + t * s).collect();
        log_sum_exp(&terms) / n as f64
    };
    let p_plus = tilted(scale);
    let p_mid = tilted(0.0);
    let p_minus = tilted(-scale);
    let second = (p_plus - 2.0 * p_mid + p_minus) / (scale * scale);

    // Rounding in each pressure value is a few ulps of the largest term involved.
    let magnitude = base
        .iter()
        .map(|(l, s)| l.abs() + scale * s.abs())
        .fold(p_mid.abs(), f64::max)
        / n as f64;
    let noise = 8.0 * f64::EPSILON * magnitude / (scale * scale);
    if noise > 1e-6 {
        return Err(Error::NoiseFloor { scale });
    }
    if second.abs() <= noise.max(1e-12) || (-1e-8..0.0).contains(&second) {
        return Ok(0.0);
    }
    Ok(second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::periodic_cycles;

    fn q(re: f64) -> PolyMap {
        PolyMap::quadratic(Complex64::new(re, 0.0))
    }

    #[test]
    fn circle_equilibrium_is_uniform_on_each_period() {
        let m = equilibrium_orbit_measure(&q(0.0), 1.0, 6).unwrap();
        assert!((m.total_weight() - 1.0).abs() < 1e-12);
        let sixes: Vec<f64> = m.atoms().iter().filter(|a| a.cycle.period() == 6).map(|a| a.weight).collect();
        assert_eq!(sixes.len(), 9);
        for w in &sixes {
            assert!((w - sixes[0]).abs() < 1e-15);
        }
    }

    #[test]
    fn circle_lyapunov_is_log_two() {
        let f = q(0.0);
        let m = equilibrium_orbit_measure(&f, 1.0, 8).unwrap();
        assert!((lyapunov(&m, &f) - std::f64::consts::LN_2).abs() < 1e-13);
        let one = OrbitMeasure::primitive(periodic_cycles(&f, 1, true).unwrap().remove(0), None).unwrap();
        assert!((lyapunov(&one, &f) - std::f64::consts::LN_2).abs() < 1e-14);
    }

    #[test]
    fn basilica_fixed_point_lyapunov() {
        let f = q(-1.0);
        let fixed = periodic_cycles(&f, 1, true).unwrap();
        let big = fixed.into_iter().max_by(|a, b| a.multiplier().norm().total_cmp(&b.multiplier().norm())).unwrap();
        let m = OrbitMeasure::primitive(big, Some(Complex64::new(-1.0, 0.0))).unwrap();
        assert!((lyapunov(&m, &f) - (1.0 + 5f64.sqrt()).ln()).abs() < 1e-13);
    }

    #[test]
    fn variance_vanishes_for_constant_derivative() {
        assert_eq!(variance(&q(0.0), 1.0, 1e-2, 8).unwrap(), 0.0);
        assert_eq!(observable_variance(&q(-1.0), 1.2, |c| 0.7 * c.period() as f64, 1e-2, 8).unwrap(), 0.0);
    }

    #[test]
    fn too_small_scale_hits_noise_floor() {
        assert!(matches!(variance(&q(-1.0), 1.2, 1e-9, 8), Err(Error::NoiseFloor { .. })));
    }

    #[test]
    fn rejects_invalid_atoms() {
        let f = q(0.0);
        let attracting = periodic_cycles(&f, 1, false).unwrap().remove(0);
        assert!(OrbitMeasure::primitive(attracting, None).is_err());
        assert!(OrbitMeasure::new(vec![], 1, None).is_err());
    }
}
