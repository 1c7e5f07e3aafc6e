//! Hausdorff dimension as the zero of the pressure (Bowen's equation).

use crate::error::{Error, Result};
use crate::poly::PolyMap;
use crate::thermo::cover::{build_markov_cover, MarkovCover, MAX_DEPTH};
use crate::thermo::pressure::pressure_matrix_warm;

#[derive(Clone, Copy, Debug)]
pub struct DimensionOptions {
    /// Stop once two successive depths agree to this tolerance.
    pub tol: f64,
    pub depth_min: usize,
    pub depth_max: usize,
}

impl Default for DimensionOptions {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            depth_min: 6,
            depth_max: MAX_DEPTH,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimensionReport {
    pub delta: f64,
    /// Depth of the cover that produced `delta`.
    pub depth: usize,
    /// `|δ(depth) - δ(depth - 1)|`.
    pub change: f64,
    /// `(depth, δ)` for every depth that produced a cover.
    pub history: Vec<(usize, f64)>,
}

/// The Bowen root `δ` of `z ↦ f(z)`, to tolerance `tol`.
pub fn hausdorff_dimension(map: &PolyMap, tol: f64) -> Result<f64> {
    hausdorff_dimension_with(
        map,
        DimensionOptions {
            tol,
            ..DimensionOptions::default()
        },
    )
    .map(|r| r.delta)
}

/// Refines the cover one level at a time (each level doubles the number of
/// cells) until successive Bowen roots agree to `opts.tol`. Depths whose cover
/// still contains the critical value are skipped. Depth `depth_min - 1` is
/// solved as the first reference, so `depth_min == depth_max` pins the depth.
pub fn hausdorff_dimension_with(map: &PolyMap, opts: DimensionOptions) -> Result<DimensionReport> {
    if !(opts.tol >= 1e-9) || !opts.tol.is_finite() {
        return Err(Error::InvalidInput(format!("dimension tolerance must be at least 1e-9, got {}", opts.tol)));
    }
    if opts.depth_min == 0 || opts.depth_max > MAX_DEPTH || opts.depth_min > opts.depth_max {
        return Err(Error::InvalidInput(format!(
            "depth range {}..={} must lie within 1..={MAX_DEPTH}",
            opts.depth_min, opts.depth_max
        )));
    }
    let mut history: Vec<(usize, f64)> = Vec::new();
    let mut warm = Vec::new();
    let mut last_change = f64::INFINITY;
    for depth in opts.depth_min.saturating_sub(1).max(1)..=opts.depth_max {
        let cover = match build_markov_cover(map, depth) {
            Ok(c) => c,
            Err(Error::CoverCrossesCriticalValue { .. }) if depth < opts.depth_max => continue,
            Err(e) => return Err(e),
        };
        // Warm start: the depth-k eigenvector, duplicated, approximates depth k+1.
        if !warm.is_empty() {
            warm = prolong(&warm, &cover);
        }
        let delta = bowen_root_warm(&cover, opts.tol * 1e-3, &mut warm)?;
        if let Some(&(_, prev)) = history.last() {
            last_change = (delta - prev).abs();
            history.push((depth, delta));
            if depth >= opts.depth_min && last_change < opts.tol {
                return Ok(DimensionReport {
                    delta,
                    depth,
                    change: last_change,
                    history,
                });
            }
        } else {
            history.push((depth, delta));
        }
    }
    let delta = history.last().map_or(f64::NAN, |h| h.1);
    Err(Error::DimensionNotConverged {
        delta,
        change: last_change,
        tol: opts.tol,
    })
}

/// Maps an eigenvector on the `2^k` cells to the `2^(k+1)` cells of a finer cover.
fn prolong(v: &[f64], cover: &MarkovCover) -> Vec<f64> {
    let n = cover.len();
    if v.len() * 2 != n {
        return Vec::new();
    }
    // In both codings cell j at depth k+1 lies inside cell j/2 at depth k.
    (0..n).map(|j| v[j / 2]).collect()
}

/// Zero of `s ↦ pressure_matrix(cover, s)` on `[0, 2]`.
pub fn bowen_root(cover: &MarkovCover, tol: f64) -> Result<f64> {
    let mut warm = Vec::new();
    bowen_root_warm(cover, tol, &mut warm)
}

fn bowen_root_warm(cover: &MarkovCover, tol: f64, warm: &mut Vec<f64>) -> Result<f64> {
    let mut a = 0.0;
    let mut b = 2.0;
    let mut fa = pressure_matrix_warm(cover, a, warm)?;
    let mut fb = pressure_matrix_warm(cover, b, warm)?;
    if !(fa > 0.0 && fb < 0.0) {
        return Err(Error::Regime(format!(
            "pressure has no sign change on [0, 2] (P(0) = {fa:.6}, P(2) = {fb:.6})"
        )));
    }
    // Illinois variant of regula falsi.
    let mut side = 0i8;
    let tol = tol.max(1e-14);
    for _ in 0..200 {
        let x = (a * fb - b * fa) / (fb - fa);
        let fx = pressure_matrix_warm(cover, x, warm)?;
        if fx.abs() <= 1e-14 || (b - a) <= tol {
            return Ok(x);
        }
        if fx > 0.0 {
            a = x;
            fa = fx;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        } else {
            b = x;
            fb = fx;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        }
        if (b - a) <= tol {
            return Ok(0.5 * (a + b));
        }
    }
    Ok(0.5 * (a + b))
}
