//! Simultaneous polynomial root finding (Aberth–Ehrlich) with Newton polishing.
//!
//! The explicit-coefficient entry point is [`poly_roots`]. The iteration itself
//! is written against a Newton-ratio callback so that polynomials which are
//! only available implicitly (such as `f^n(z) - z`) can reuse it.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};

pub const DEFAULT_MAX_SWEEPS: usize = 500;

/// Above this many roots the Aberth sweep runs in Jacobi form across threads.
const PARALLEL_THRESHOLD: usize = 512;

#[derive(Clone, Copy, Debug)]
pub struct RootOptions {
    pub max_sweeps: usize,
    /// Residual bound relative to `sum |a_j| |r|^j`.
    pub residual_tol: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            max_sweeps: DEFAULT_MAX_SWEEPS,
            residual_tol: 1e-10,
        }
    }
}

/// Newton ratio `p(z) / p'(z)` together with a backward-error estimate
/// `|p(z)| / scale(z)`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct NewtonStep {
    pub ratio: Complex64,
    pub backward_error: f64,
}

/// All roots of `p(z) = sum coeffs[j] z^j`, with multiplicity.
pub fn poly_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    poly_roots_with(coeffs, RootOptions::default())
}

pub fn poly_roots_with(coeffs: &[Complex64], opts: RootOptions) -> Result<Vec<Complex64>> {
    let degree = coeffs.len().saturating_sub(1);
    if degree == 0 {
        return Err(Error::InvalidInput("polynomial must have degree at least 1".into()));
    }
    if coeffs[degree].norm() == 0.0 {
        return Err(Error::InvalidInput("leading coefficient must be nonzero".into()));
    }
    if coeffs.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidInput("coefficients must be finite".into()));
    }

    // Exact zero roots are split off so the remaining polynomial has a nonzero constant term.
    let zeros = coeffs.iter().take_while(|c| c.norm() == 0.0).count();
    let reduced = &coeffs[zeros..];
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];
    let m = reduced.len() - 1;
    if m == 0 {
        return Ok(roots);
    }
    if m == 1 {
        roots.push(-reduced[0] / reduced[1]);
        return Ok(roots);
    }

    let newton = |z: Complex64| horner_newton(reduced, z);
    let init = initial_guesses(reduced);
    let found = aberth(init, &newton, opts.max_sweeps).map_err(|(sweeps, worst)| {
        Error::RootsNotConverged {
            degree,
            sweeps,
            worst_residual: worst,
            polynomial: coeffs.to_vec(),
        }
    })?;

    let mut worst = 0.0f64;
    for z in found {
        let z = polish(z, &newton, 8);
        worst = worst.max(horner_newton(reduced, z).backward_error);
        roots.push(z);
    }
    if worst > opts.residual_tol {
        return Err(Error::RootsNotConverged {
            degree,
            sweeps: opts.max_sweeps,
            worst_residual: worst,
            polynomial: coeffs.to_vec(),
        });
    }
    Ok(roots)
}

fn horner_newton(coeffs: &[Complex64], z: Complex64) -> NewtonStep {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    let r = z.norm();
    for &a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
        scale = scale * r + a.norm();
    }
    NewtonStep {
        ratio: if dp.norm() == 0.0 { p } else { p / dp },
        backward_error: p.norm() / scale.max(f64::MIN_POSITIVE),
    }
}

/// Guesses spread on a circle whose radius is the geometric mean of the root moduli.
fn initial_guesses(coeffs: &[Complex64]) -> Vec<Complex64> {
    let m = coeffs.len() - 1;
    let radius = (coeffs[0].norm() / coeffs[m].norm()).powf(1.0 / m as f64);
    let center = -coeffs[m - 1] / (coeffs[m] * m as f64);
    let radius = if radius.is_finite() && radius > 0.0 { radius } else { 1.0 };
    (0..m)
        .map(|k| {
            let theta = std::f64::consts::TAU * k as f64 / m as f64 + 0.4;
            center + Complex64::from_polar(radius, theta)
        })
        .collect()
}

/// Newton iterations until the correction stops shrinking.
pub(crate) fn polish<F>(mut z: Complex64, newton: &F, max_iter: usize) -> Complex64
where
    F: Fn(Complex64) -> NewtonStep,
{
    let mut last = f64::INFINITY;
    for _ in 0..max_iter {
        let step = newton(z);
        let size = step.ratio.norm();
        if !size.is_finite() || size >= last {
            break;
        }
        z -= step.ratio;
        last = size;
        if size <= 1e-16 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

/// Aberth–Ehrlich sweeps from `init`. On failure returns the sweep count and
/// the worst backward error among the unconverged roots.
pub(crate) fn aberth<F>(
    z: Vec<Complex64>,
    newton: &F,
    max_sweeps: usize,
) -> std::result::Result<Vec<Complex64>, (usize, f64)>
where
    F: Fn(Complex64) -> NewtonStep + Sync,
{
    let done = vec![false; z.len()];
    aberth_masked(z, done, newton, max_sweeps)
}

/// Aberth sweeps that move only the roots not yet marked `done`; the others
/// stay fixed but still repel the moving ones.
pub(crate) fn aberth_masked<F>(
    mut z: Vec<Complex64>,
    mut done: Vec<bool>,
    newton: &F,
    max_sweeps: usize,
) -> std::result::Result<Vec<Complex64>, (usize, f64)>
where
    F: Fn(Complex64) -> NewtonStep + Sync,
{
    let n = z.len();
    for _ in 0..max_sweeps {
        if n >= PARALLEL_THRESHOLD {
            let snapshot = z.clone();
            let updates: Vec<Option<(Complex64, f64)>> = (0..n)
                .into_par_iter()
                .map(|k| {
                    if done[k] {
                        return None;
                    }
                    Some(aberth_correction(k, &snapshot, newton))
                })
                .collect();
            for (k, u) in updates.into_iter().enumerate() {
                if let Some((w, be)) = u {
                    z[k] -= w;
                    if converged(w, be, z[k]) {
                        done[k] = true;
                    }
                }
            }
        } else {
            for k in 0..n {
                if done[k] {
                    continue;
                }
                let (w, be) = aberth_correction(k, &z, newton);
                z[k] -= w;
                if converged(w, be, z[k]) {
                    done[k] = true;
                }
            }
        }
        if done.iter().all(|&d| d) {
            return Ok(z);
        }
    }
    let worst = (0..n)
        .filter(|&k| !done[k])
        .map(|k| newton(z[k]).backward_error)
        .fold(0.0, f64::max);
    Err((max_sweeps, worst))
}

fn converged(w: Complex64, backward_error: f64, z: Complex64) -> bool {
    w.norm() <= 1e-14 * (1.0 + z.norm()) || backward_error <= 1e-15
}

/// Returns the correction for root `k` and the backward error before it is applied.
fn aberth_correction<F>(k: usize, z: &[Complex64], newton: &F) -> (Complex64, f64)
where
    F: Fn(Complex64) -> NewtonStep,
{
    let step = newton(z[k]);
    let ratio = step.ratio;
    if step.backward_error == 0.0 {
        return (Complex64::new(0.0, 0.0), 0.0);
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for (j, &zj) in z.iter().enumerate() {
        if j != k {
            let d = z[k] - zj;
            if d.norm() > 0.0 {
                sum += d.inv();
            }
        }
    }
    let denom = Complex64::new(1.0, 0.0) - ratio * sum;
    let w = if denom.norm() == 0.0 { ratio } else { ratio / denom };
    if w.is_finite() {
        (w, step.backward_error)
    } else {
        // A nudge keeps coincident guesses from staying stuck together.
        (Complex64::new(1e-3, 1e-3) * (1.0 + z[k].norm()), step.backward_error)
    }
}
