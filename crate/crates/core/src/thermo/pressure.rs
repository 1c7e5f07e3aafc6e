//! Pressure of the geometric potential `-s log|f'|`, by two estimators.

use crate::cycles::{cycles_dividing, Cycle};
use crate::error::{Error, Result};
use crate::poly::PolyMap;
use crate::thermo::cover::MarkovCover;

const MAX_POWER_ITER: usize = 100_000;
const POWER_TOL: f64 = 1e-12;

/// `log ρ(L_s)` where `L_s[i][j] = A[i][j] |f'|^(-s)` on the cover's edges.
pub fn pressure_matrix(cover: &MarkovCover, s: f64) -> Result<f64> {
    let mut v = Vec::new();
    pressure_matrix_warm(cover, s, &mut v)
}

/// As [`pressure_matrix`], reusing `v` as the starting eigenvector and leaving
/// the converged eigenvector in it.
pub fn pressure_matrix_warm(cover: &MarkovCover, s: f64, v: &mut Vec<f64>) -> Result<f64> {
    if !(0.0..=4.0).contains(&s) {
        return Err(Error::InvalidInput(format!("pressure exponent s must lie in [0, 4], got {s}")));
    }
    let n = cover.len();
    let weights: Vec<[f64; 2]> = (0..n)
        .map(|i| cover.edge_derivatives(i).map(|d| d.powf(-s)))
        .collect();
    if v.len() != n || v.iter().any(|x| !(*x > 0.0)) {
        *v = vec![1.0; n];
    }
    let mut u = vec![0.0; n];
    let mut gap = f64::INFINITY;
    for _ in 0..MAX_POWER_ITER {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for i in 0..n {
            let [j0, j1] = cover.successors(i);
            let w = weights[i];
            u[i] = w[0] * v[j0] + w[1] * v[j1];
            let ratio = u[i] / v[i];
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        // Collatz–Wielandt: lo <= ρ <= hi.
        gap = hi - lo;
        let top = u.iter().copied().fold(0.0, f64::max);
        for (vi, ui) in v.iter_mut().zip(&u) {
            *vi = ui / top;
        }
        if gap <= POWER_TOL * hi {
            return Ok((0.5 * (hi + lo)).ln());
        }
    }
    Err(Error::PowerIteration {
        iterations: MAX_POWER_ITER,
        gap,
        cells: n,
    })
}

/// Orbit-sum pressure at horizon `n` together with the horizon-`n-1` value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PressureEstimate {
    pub value: f64,
    pub previous: Option<f64>,
}

impl PressureEstimate {
    /// `|P_n - P_{n-1}|`, the reported error estimate.
    pub fn gap(&self) -> Option<f64> {
        self.previous.map(|p| (self.value - p).abs())
    }
}

/// `P_n(s) = (1/n) log Σ |(f^n)'(x)|^(-s)` over the repelling fixed points of `f^n`.
pub fn pressure_orbits(map: &PolyMap, s: f64, n: usize) -> Result<PressureEstimate> {
    let value = orbit_pressure(&julia_cycles_dividing(map, n)?, s, n);
    let previous = if n >= 2 {
        Some(orbit_pressure(&julia_cycles_dividing(map, n - 1)?, s, n - 1))
    } else {
        None
    };
    Ok(PressureEstimate { value, previous })
}

/// Repelling cycles whose period divides `n`.
pub fn julia_cycles_dividing(map: &PolyMap, n: usize) -> Result<Vec<Cycle>> {
    Ok(cycles_dividing(map, n)?
        .into_iter()
        .filter(Cycle::is_repelling)
        .collect())
}

/// `P_n(s)` from a precomputed list of repelling cycles with periods dividing `n`.
///
/// A cycle of period `k` contributes its `k` points, each with
/// `|(f^n)'| = |λ|^(n/k)`. The sum is evaluated in log-sum-exp form.
pub fn orbit_pressure(cycles: &[Cycle], s: f64, n: usize) -> f64 {
    let terms: Vec<f64> = cycles
        .iter()
        .map(|c| {
            let k = c.period() as f64;
            k.ln() - s * (n as f64 / k) * c.multiplier().norm().ln()
        })
        .collect();
    log_sum_exp(&terms) / n as f64
}

pub(crate) fn log_sum_exp(terms: &[f64]) -> f64 {
    let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !top.is_finite() {
        return top;
    }
    top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermo::cover::build_markov_cover;
    use num_complex::Complex64;

    fn q(re: f64) -> PolyMap {
        PolyMap::quadratic(Complex64::new(re, 0.0))
    }

    #[test]
    fn circle_pressure_line() {
        let cover = build_markov_cover(&q(0.0), 6).unwrap();
        let ln2 = std::f64::consts::LN_2;
        assert!((pressure_matrix(&cover, 1.0).unwrap()).abs() < 1e-12);
        assert!((pressure_matrix(&cover, 0.0).unwrap() - ln2).abs() < 1e-12);
    }

    #[test]
    fn cantor_entropy() {
        let cover = build_markov_cover(&q(-6.0), 6).unwrap();
        assert!((pressure_matrix(&cover, 0.0).unwrap() - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn orbit_sums_for_z_squared() {
        let p1 = pressure_orbits(&q(0.0), 1.0, 8).unwrap();
        assert!((p1.value - (255.0f64 / 256.0).ln() / 8.0).abs() < 1e-14);
        let p0 = pressure_orbits(&q(0.0), 0.0, 8).unwrap();
        assert!((p0.value - 255f64.ln() / 8.0).abs() < 1e-14);
        assert!(p0.gap().unwrap() > 0.0);
    }

    #[test]
    fn orbit_pressure_at_zero_counts_fixed_points() {
        let p = pressure_orbits(&q(-1.0), 0.0, 1).unwrap();
        assert!((p.value - 2f64.ln()).abs() < 1e-14);
        assert!(p.previous.is_none());
    }

    #[test]
    fn exponent_range_is_checked() {
        let cover = build_markov_cover(&q(0.0), 4).unwrap();
        assert!(pressure_matrix(&cover, -0.1).is_err());
        assert!(pressure_matrix(&cover, 4.5).is_err());
    }
}
