use num_complex::Complex64;
use serde::Serialize;

use crate::cycles::multiplier_derivative;
use crate::error::{Error, Result};
use crate::metric::entropy::{entropy_functional, EntropyFunctionalRecord};
use crate::metric::multiplier::multiplier_function;
use crate::poly::PolyMap;
use crate::thermo::{bowen_root, build_markov_cover, OrbitMeasure};

/// Default finite-difference step.
pub const DEFAULT_STEP: f64 = 1e-2;

/// Two routes to the pressure metric must agree within this relative margin.
const ROUTE_LIMIT: f64 = 0.25;

/// Entries smaller than this fraction of the trace are compared absolutely.
const ENTRY_FLOOR: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    GMetric,
    PressureMetric,
    DeltaHessian,
}

/// Symmetric form `g11 x² + 2 g12 x y + g22 y²` on the tangent plane at `base`,
/// in the coordinates `c = x + i y`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricTensor {
    pub g11: f64,
    pub g12: f64,
    pub g22: f64,
    pub base: Complex64,
    pub kind: MetricKind,
    pub step: f64,
    /// Largest entrywise relative change when the step is halved.
    pub richardson_change: Option<f64>,
}

impl MetricTensor {
    pub fn trace(&self) -> f64 {
        self.g11 + self.g22
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let mean = 0.5 * (self.g11 + self.g22);
        let r = (0.5 * (self.g11 - self.g22)).hypot(self.g12);
        [mean - r, mean + r]
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// `‖v‖² = vᵀ g v`.
    pub fn norm_sq(&self, v: [f64; 2]) -> f64 {
        self.g11 * v[0] * v[0] + 2.0 * self.g12 * v[0] * v[1] + self.g22 * v[1] * v[1]
    }

    fn scaled(&self, factor: f64, kind: MetricKind) -> Self {
        Self {
            g11: self.g11 * factor,
            g12: self.g12 * factor,
            g22: self.g22 * factor,
            kind,
            ..*self
        }
    }

    /// Largest entrywise relative difference, with entries below 1% of the
    /// trace measured against that floor instead.
    pub fn relative_difference(&self, other: &MetricTensor) -> f64 {
        let floor = ENTRY_FLOOR * self.trace().abs().max(other.trace().abs());
        [(self.g11, other.g11), (self.g12, other.g12), (self.g22, other.g22)]
            .iter()
            .map(|&(a, b)| (a - b).abs() / a.abs().max(b.abs()).max(floor).max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max)
    }
}

fn check_step(h: f64) -> Result<()> {
    if !(1e-4..=1e-1).contains(&h) {
        return Err(Error::InvalidInput(format!("finite-difference step must lie in [1e-4, 1e-1], got {h}")));
    }
    Ok(())
}

/// Second differences of `f` at `c0` along 1, i and (1+i)/√2.
fn hessian<F>(f: &F, c0: Complex64, h: f64, kind: MetricKind) -> Result<MetricTensor>
where
    F: Fn(Complex64) -> Result<f64>,
{
    let mid = f(c0)?;
    let second = |dir: Complex64| -> Result<f64> {
        Ok((f(c0 + dir * h)? - 2.0 * mid + f(c0 - dir * h)?) / (h * h))
    };
    let g11 = second(Complex64::new(1.0, 0.0))?;
    let g22 = second(Complex64::new(0.0, 1.0))?;
    let diag = second(Complex64::new(1.0, 1.0) / 2f64.sqrt())?;
    Ok(MetricTensor {
        g11,
        g12: diag - 0.5 * (g11 + g22),
        g22,
        base: c0,
        kind,
        step: h,
        richardson_change: None,
    })
}

fn hessian_checked<F>(f: &F, c0: Complex64, h: f64, kind: MetricKind) -> Result<MetricTensor>
where
    F: Fn(Complex64) -> Result<f64>,
{
    let coarse = hessian(f, c0, h, kind)?;
    let fine = hessian(f, c0, 0.5 * h, kind)?;
    Ok(MetricTensor {
        richardson_change: Some(coarse.relative_difference(&fine)),
        ..coarse
    })
}

/// Hessian of `c ↦ G(c)` at the record's base: the G-metric.
pub fn g_metric(record: &EntropyFunctionalRecord, h: f64) -> Result<MetricTensor> {
    check_step(h)?;
    hessian_checked(&|c| entropy_functional(record, c), record.base, h, MetricKind::GMetric)
}

/// Central-difference gradient `(∂G/∂x, ∂G/∂y)` at the base.
pub fn g_gradient(record: &EntropyFunctionalRecord, h: f64) -> Result<[f64; 2]> {
    check_step(h)?;
    let c0 = record.base;
    let g = |dc: Complex64| entropy_functional(record, c0 + dc);
    Ok([
        (g(Complex64::new(h, 0.0))? - g(Complex64::new(-h, 0.0))?) / (2.0 * h),
        (g(Complex64::new(0.0, h))? - g(Complex64::new(0.0, -h))?) / (2.0 * h),
    ])
}

/// The pressure metric by two independent routes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PressureRoutes {
    /// G-metric divided by `δ M_ν`.
    pub hessian: MetricTensor,
    /// Variance of the derivative of the normalised potential under ν, divided by `δ M_ν`.
    pub variance: MetricTensor,
    pub disagreement: f64,
}

/// Computes both routes without judging their agreement.
pub fn pressure_metric_routes(record: &EntropyFunctionalRecord, h: f64) -> Result<PressureRoutes> {
    let g = g_metric(record, h)?;
    let conformal = record.delta0 * record.lyap0;
    let hessian = g.scaled(1.0 / conformal, MetricKind::PressureMetric);
    let var = variance_form(record)?;
    let variance = MetricTensor {
        g11: var[0] / conformal,
        g12: var[1] / conformal,
        g22: var[2] / conformal,
        base: record.base,
        kind: MetricKind::PressureMetric,
        step: 0.0,
        richardson_change: None,
    };
    Ok(PressureRoutes {
        hessian,
        variance,
        disagreement: hessian.relative_difference(&variance),
    })
}

/// `‖v‖_P² = ‖v‖_G² / (δ M_ν)`, after checking it against the variance route.
pub fn pressure_metric(record: &EntropyFunctionalRecord, h: f64) -> Result<MetricTensor> {
    let routes = pressure_metric_routes(record, h)?;
    if routes.disagreement > ROUTE_LIMIT {
        return Err(Error::RouteDisagreement {
            disagreement: routes.disagreement,
            limit: ROUTE_LIMIT,
        });
    }
    Ok(routes.hessian)
}

/// `(1/n) Σ W a(u) a(v)` for `u, v ∈ {1, i}`, where along a direction `u`
/// the potential on cycle `x` moves by `a = -(δ' ℓ + δ ℓ')` with
/// `ℓ = (n/k) log|λ|` and `δ'` keeping the orbit sums normalised.
fn variance_form(record: &EntropyFunctionalRecord) -> Result<[f64; 3]> {
    let n = record.horizon() as f64;
    let delta = record.delta0;
    let atoms = record.measure.atoms();
    let mut ell = Vec::with_capacity(atoms.len());
    let mut dell = Vec::with_capacity(atoms.len());
    for a in atoms {
        let lam = a.cycle.multiplier();
        let reps = n / a.cycle.period() as f64;
        let ratio = multiplier_derivative(record.base, &a.cycle)? / lam;
        ell.push(reps * lam.norm().ln());
        // d/dx log|λ| = Re(λ'/λ), d/dy log|λ| = Re(i λ'/λ) = -Im(λ'/λ).
        dell.push([reps * ratio.re, -reps * ratio.im]);
    }
    let n_m = n * record.lyap0;
    let mut out = [0.0; 3];
    let mut slopes = [0.0; 2];
    for d in 0..2 {
        let mean: f64 = atoms.iter().zip(&dell).map(|(a, dl)| a.weight * dl[d]).sum();
        slopes[d] = -delta * mean / n_m;
    }
    for ((a, l), dl) in atoms.iter().zip(&ell).zip(&dell) {
        let ax = -(slopes[0] * l + delta * dl[0]);
        let ay = -(slopes[1] * l + delta * dl[1]);
        out[0] += a.weight * ax * ax;
        out[1] += a.weight * ax * ay;
        out[2] += a.weight * ay * ay;
    }
    Ok(out.map(|v| v / n))
}

/// Five-point Laplacian of `M_μ` at the measure's base.
pub fn harmonicity_residual(measure: &OrbitMeasure, h: f64) -> Result<f64> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidInput(format!("step must be positive, got {h}")));
    }
    let c0 = measure.base().ok_or_else(|| Error::InvalidInput("orbit measure has no base parameter".into()))?;
    let m = |dc: Complex64| multiplier_function(measure, c0 + dc);
    let sum = m(Complex64::new(h, 0.0))?
        + m(Complex64::new(-h, 0.0))?
        + m(Complex64::new(0.0, h))?
        + m(Complex64::new(0.0, -h))?
        - 4.0 * m(Complex64::new(0.0, 0.0))?;
    Ok(sum / (h * h))
}

/// Hessian of `c ↦ δ(c)` from Bowen roots on covers of one common depth, the
/// shallowest depth from `depth_min` up whose stencil covers all avoid the
/// critical value.
pub fn delta_hessian(c0: Complex64, h: f64, depth_min: usize) -> Result<MetricTensor> {
    check_step(h)?;
    let stencil = [
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
        Complex64::new(1.0, 1.0) / 2f64.sqrt(),
    ];
    let mut last = None;
    for depth in depth_min..=crate::thermo::cover::MAX_DEPTH {
        let delta = |c: Complex64| -> Result<f64> {
            let cover = build_markov_cover(&PolyMap::quadratic(c), depth)?;
            bowen_root(&cover, 1e-13)
        };
        let ok = stencil.iter().all(|d| {
            [*d * h, -*d * h, *d * (0.5 * h), -*d * (0.5 * h)]
                .iter()
                .all(|dc| build_markov_cover(&PolyMap::quadratic(c0 + dc), depth).is_ok())
        });
        if !ok {
            last = Some(Error::CoverCrossesCriticalValue { depth });
            continue;
        }
        return hessian_checked(&delta, c0, h, MetricKind::DeltaHessian);
    }
    Err(last.unwrap_or_else(|| Error::InvalidInput(format!("depth_min {depth_min} exceeds the maximum depth"))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::periodic_cycles;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tensor_algebra() {
        let t = MetricTensor {
            g11: 2.0,
            g12: 1.0,
            g22: 2.0,
            base: c(0.0, 0.0),
            kind: MetricKind::GMetric,
            step: 1e-2,
            richardson_change: None,
        };
        assert_eq!(t.eigenvalues(), [1.0, 3.0]);
        assert_eq!(t.norm_sq([0.0, 0.0]), 0.0);
        assert_eq!(t.norm_sq([1.0, 1.0]), 6.0);
    }

    #[test]
    fn basilica_metrics() {
        let r = EntropyFunctionalRecord::new(c(-1.0, 0.0), 10).unwrap();
        let g = g_metric(&r, 1e-2).unwrap();
        assert!(g.min_eigenvalue() > 0.0, "{g:?}");
        assert!(g.richardson_change.unwrap() < 0.05);
        // Real bases are symmetric under conjugation; the diagonal stencil only
        // leaves an O(h^2) mixed term.
        assert!(g.g12.abs() < 1e-3 * g.trace());
        let routes = pressure_metric_routes(&r, 1e-2).unwrap();
        assert!(routes.disagreement < 0.1, "{routes:?}");
        let p = pressure_metric(&r, 1e-2).unwrap();
        let back = p.scaled(r.delta0 * r.lyap0, MetricKind::GMetric);
        assert!((back.g11 - g.g11).abs() <= 1e-10 * g.g11.abs());
    }

    #[test]
    fn fixed_point_is_harmonic() {
        let f = PolyMap::quadratic(c(0.05, 0.0));
        let cyc = periodic_cycles(&f, 1, true).unwrap();
        let big = cyc.into_iter().max_by(|a, b| a.multiplier().norm().total_cmp(&b.multiplier().norm())).unwrap();
        let m = OrbitMeasure::primitive(big, Some(c(0.05, 0.0))).unwrap();
        let r1 = harmonicity_residual(&m, 1e-2).unwrap().abs();
        let r2 = harmonicity_residual(&m, 5e-3).unwrap().abs();
        assert!(r2 * 3.0 <= r1, "{r1} {r2}");
    }

    #[test]
    fn step_range_is_enforced() {
        let r = EntropyFunctionalRecord::new(c(-1.0, 0.0), 4).unwrap();
        assert!(g_metric(&r, 0.5).is_err());
        assert!(g_metric(&r, 1e-6).is_err());
    }
}
