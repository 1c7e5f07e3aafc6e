use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::thermo::cover::MAX_DEPTH;

/// Parameter rectangle and resolution. Endpoints are inclusive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DimensionConfig {
    /// Per-cell tolerance on successive depths; also sets the detector's noise guard.
    pub tol: f64,
    pub depth_min: usize,
    pub depth_max: usize,
}

impl Default for DimensionConfig {
    fn default() -> Self {
        Self {
            tol: 1e-2,
            depth_min: 10,
            depth_max: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ClassifyConfig {
    pub max_iter: usize,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        Self { max_iter: 20_000 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DetectConfig {
    /// Also look for maxima among escape cells (Cantor Julia sets).
    pub include_shift_locus: bool,
}

/// Random displacement of each sample inside its grid cell. Seed 0 disables it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StencilConfig {
    pub seed: u64,
    /// Maximal displacement as a fraction of the grid spacing.
    pub amplitude: f64,
}

impl Default for StencilConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            amplitude: 0.25,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: PathBuf,
    #[serde(default)]
    pub pgm: Option<PathBuf>,
    /// JSON summary with the detected local maxima.
    #[serde(default)]
    pub summary: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    #[serde(default)]
    pub dimension: DimensionConfig,
    #[serde(default)]
    pub classify: ClassifyConfig,
    #[serde(default)]
    pub detect: DetectConfig,
    #[serde(default)]
    pub stencil: StencilConfig,
    pub output: OutputConfig,
}

const MAX_CELLS: usize = 1 << 20;

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        let bounds = [g.re_min, g.re_max, g.im_min, g.im_max];
        if bounds.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("grid bounds must be finite".into()));
        }
        if g.nx == 0 || g.ny == 0 || g.nx.saturating_mul(g.ny) > MAX_CELLS {
            return Err(Error::Config(format!("grid must have 1..={MAX_CELLS} cells, got {}x{}", g.nx, g.ny)));
        }
        if g.re_min > g.re_max || g.im_min > g.im_max {
            return Err(Error::Config("grid bounds must satisfy min <= max".into()));
        }
        if (g.nx > 1 && g.re_min == g.re_max) || (g.ny > 1 && g.im_min == g.im_max) {
            return Err(Error::Config("a degenerate grid side admits a single cell only".into()));
        }
        let d = &self.dimension;
        if !(d.tol > 0.0) || !d.tol.is_finite() {
            return Err(Error::Config(format!("dimension.tol must be positive, got {}", d.tol)));
        }
        if d.tol < 1e-9 {
            return Err(Error::Config(format!("dimension.tol must be at least 1e-9, got {}", d.tol)));
        }
        if d.depth_min < 2 || d.depth_max > MAX_DEPTH || d.depth_min > d.depth_max {
            return Err(Error::Config(format!(
                "dimension depths {}..={} must lie within 2..={MAX_DEPTH}",
                d.depth_min, d.depth_max
            )));
        }
        if self.classify.max_iter == 0 {
            return Err(Error::Config("classify.max_iter must be positive".into()));
        }
        let a = self.stencil.amplitude;
        if !(0.0..0.5).contains(&a) {
            return Err(Error::Config(format!("stencil.amplitude must lie in [0, 0.5), got {a}")));
        }
        let o = &self.output;
        let paths = std::iter::once(&o.csv).chain(o.pgm.iter()).chain(o.summary.iter());
        if paths.into_iter().any(|p| p.as_os_str().is_empty()) {
            return Err(Error::Config("output paths must be nonempty".into()));
        }
        Ok(())
    }
}
