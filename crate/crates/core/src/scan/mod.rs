//! Parameter-plane scans of the Hausdorff dimension and the local-maximum detector.

pub mod config;
mod detect;

use std::io::Write;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::critical::{classify_critical_orbits, CriticalFate};
use crate::error::{Error, Result};
use crate::poly::PolyMap;
use crate::stats::fmt17;
use crate::thermo::{hausdorff_dimension_with, DimensionOptions};

pub use config::{ClassifyConfig, DetectConfig, DimensionConfig, GridConfig, OutputConfig, RunConfig, StencilConfig};
pub use detect::detect_local_maxima;

/// Classification signature of a grid cell. Cells of equal signature that are
/// 4-connected are treated as one hyperbolic component.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case", tag = "class", content = "period")]
pub enum CellClass {
    /// Attracting fixed point: the main cardioid, which holds `z^2`.
    Central,
    Attracting(usize),
    /// The critical orbit escapes (shift locus).
    Escape,
    Undecided,
}

impl CellClass {
    pub fn name(&self) -> &'static str {
        match self {
            CellClass::Central => "central",
            CellClass::Attracting(_) => "attracting",
            CellClass::Escape => "escape",
            CellClass::Undecided => "undecided",
        }
    }

    pub fn period(&self) -> Option<usize> {
        match self {
            CellClass::Central => Some(1),
            CellClass::Attracting(p) => Some(*p),
            _ => None,
        }
    }

    pub fn is_hyperbolic(&self) -> bool {
        !matches!(self, CellClass::Undecided)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanCell {
    pub c: Complex64,
    pub class: CellClass,
    pub delta: Option<f64>,
    pub flags: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanGrid {
    /// `(re_min, re_max, im_min, im_max)`.
    pub rect: (f64, f64, f64, f64),
    pub nx: usize,
    pub ny: usize,
    /// Row-major; row 0 is `im_max`.
    pub cells: Vec<ScanCell>,
    /// Per-cell dimension tolerance.
    pub tol: f64,
    pub include_shift_locus: bool,
}

impl ScanGrid {
    pub fn cell(&self, ix: usize, iy: usize) -> &ScanCell {
        &self.cells[iy * self.nx + ix]
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(b"re_c,im_c,class,period,delta,flags\n")?;
        for cell in &self.cells {
            let period = cell.class.period().map(|p| p.to_string()).unwrap_or_default();
            let delta = cell.delta.map(fmt17).unwrap_or_default();
            writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt17(cell.c.re),
                fmt17(cell.c.im),
                cell.class.name(),
                period,
                delta,
                cell.flags.join(";")
            )?;
        }
        Ok(())
    }

    /// Binary greymap, `grey = round(clamp(δ, 0, 2)·127.5)`, 0 where δ is absent.
    pub fn write_pgm<W: Write>(&self, mut out: W) -> Result<()> {
        write!(out, "P5\n{} {}\n255\n", self.nx, self.ny)?;
        let bytes: Vec<u8> = self.cells.iter().map(|c| grey(c.delta)).collect();
        out.write_all(&bytes)?;
        Ok(())
    }
}

fn grey(delta: Option<f64>) -> u8 {
    match delta {
        Some(d) if d.is_finite() => (d.clamp(0.0, 2.0) * 127.5).round() as u8,
        _ => 0,
    }
}

/// Parameter of grid node `(ix, iy)` before jitter.
pub fn grid_point(g: &GridConfig, ix: usize, iy: usize) -> Complex64 {
    let lerp = |lo: f64, hi: f64, i: usize, n: usize| {
        if n == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    };
    Complex64::new(lerp(g.re_min, g.re_max, ix, g.nx), lerp(g.im_max, g.im_min, iy, g.ny))
}

fn sample_point(cfg: &RunConfig, index: usize) -> Complex64 {
    let g = &cfg.grid;
    let c = grid_point(g, index % g.nx, index / g.nx);
    if cfg.stencil.seed == 0 || cfg.stencil.amplitude == 0.0 {
        return c;
    }
    // One stream per cell keeps the displacement independent of the schedule.
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.stencil.seed);
    rng.set_stream(index as u64);
    let a = cfg.stencil.amplitude;
    let dx = if g.nx > 1 { (g.re_max - g.re_min) / (g.nx - 1) as f64 } else { 0.0 };
    let dy = if g.ny > 1 { (g.im_max - g.im_min) / (g.ny - 1) as f64 } else { 0.0 };
    c + Complex64::new(rng.random_range(-a..=a) * dx, rng.random_range(-a..=a) * dy)
}

pub fn classify_cell(c: Complex64, max_iter: usize) -> Result<CellClass> {
    let report = classify_critical_orbits(&PolyMap::quadratic(c), max_iter)?;
    Ok(match report.critical.first().map(|r| &r.fate) {
        Some(CriticalFate::Attracted { period: 1, .. }) => CellClass::Central,
        Some(CriticalFate::Attracted { period, .. }) => CellClass::Attracting(*period),
        Some(CriticalFate::Escapes { .. }) => CellClass::Escape,
        _ => CellClass::Undecided,
    })
}

/// Short tag for a per-cell failure, written to the `flags` column.
fn flag_for(e: &Error) -> String {
    match e {
        Error::DimensionNotConverged { .. } => "dimension-not-converged".into(),
        Error::CoverCrossesCriticalValue { .. } => "cover-crosses-critical-value".into(),
        Error::Regime(_) => "unsupported-regime".into(),
        Error::PowerIteration { .. } => "power-iteration".into(),
        _ => "numerical-failure".into(),
    }
}

fn evaluate_cell(cfg: &RunConfig, index: usize) -> ScanCell {
    let c = sample_point(cfg, index);
    let mut flags = Vec::new();
    if cfg.stencil.seed != 0 {
        flags.push("jittered".to_string());
    }
    let class = match classify_cell(c, cfg.classify.max_iter) {
        Ok(class) => class,
        Err(e) => {
            flags.push(flag_for(&e));
            CellClass::Undecided
        }
    };
    let mut delta = None;
    if class.is_hyperbolic() {
        let opts = DimensionOptions {
            tol: cfg.dimension.tol,
            depth_min: cfg.dimension.depth_min,
            depth_max: cfg.dimension.depth_max,
        };
        match hausdorff_dimension_with(&PolyMap::quadratic(c), opts) {
            Ok(r) if r.delta > 0.0 && r.delta < 2.0 => delta = Some(r.delta),
            Ok(_) => flags.push("delta-out-of-range".into()),
            Err(e) => flags.push(flag_for(&e)),
        }
    }
    ScanCell { c, class, delta, flags }
}

/// Classifies every grid cell and solves for δ on the hyperbolic ones. Cells run
/// in parallel and are gathered by index, so the result does not depend on the
/// schedule. Per-cell failures end up in `flags`.
pub fn scan_grid(cfg: &RunConfig) -> Result<ScanGrid> {
    cfg.validate()?;
    let g = &cfg.grid;
    let cells = (0..g.nx * g.ny).into_par_iter().map(|i| evaluate_cell(cfg, i)).collect();
    Ok(ScanGrid {
        rect: (g.re_min, g.re_max, g.im_min, g.im_max),
        nx: g.nx,
        ny: g.ny,
        cells,
        tol: cfg.dimension.tol,
        include_shift_locus: cfg.detect.include_shift_locus,
    })
}

/// Runs [`scan_grid`] and writes the configured CSV, PGM and summary files.
pub fn scan_dimension(cfg: &RunConfig) -> Result<ScanGrid> {
    let grid = scan_grid(cfg)?;
    let mut csv = Vec::new();
    grid.write_csv(&mut csv)?;
    std::fs::write(&cfg.output.csv, csv)?;
    if let Some(path) = &cfg.output.pgm {
        let mut pgm = Vec::new();
        grid.write_pgm(&mut pgm)?;
        std::fs::write(path, pgm)?;
    }
    if let Some(path) = &cfg.output.summary {
        let text = serde_json::to_string_pretty(&scan_summary(&grid)).map_err(|e| Error::Config(e.to_string()))?;
        std::fs::write(path, text + "\n")?;
    }
    Ok(grid)
}

/// Counts per class and the detector output, as a JSON value with sorted keys.
pub fn scan_summary(grid: &ScanGrid) -> serde_json::Value {
    let mut classes = std::collections::BTreeMap::new();
    for cell in &grid.cells {
        *classes.entry(cell.class.name()).or_insert(0usize) += 1;
    }
    let with_delta = grid.cells.iter().filter(|c| c.delta.is_some()).count();
    let maxima: Vec<serde_json::Value> = detect_local_maxima(grid)
        .into_iter()
        .map(|i| {
            let cell = &grid.cells[i];
            serde_json::json!({
                "index": i,
                "re_c": cell.c.re,
                "im_c": cell.c.im,
                "delta": cell.delta,
            })
        })
        .collect();
    serde_json::json!({
        "nx": grid.nx,
        "ny": grid.ny,
        "classes": classes,
        "cells_with_delta": with_delta,
        "noise_guard": 2.0 * grid.tol,
        "local_maxima": maxima,
    })
}
