//! One-point reports: the critical-point condition proxy and the metric bundle.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::critical::classify_critical_orbits;
use crate::cycles::{multiplier_derivative, periodic_cycles};
use crate::error::{Error, Result};
use crate::metric::{g_metric, pressure_metric_routes, EntropyFunctionalRecord, MetricTensor};
use crate::poly::PolyMap;

/// Per-period minima at or below this value do not support the condition.
pub const CONDITION_FLOOR: f64 = 1e-8;

const CLASSIFY_ITER: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConditionVerdict {
    /// Every per-period minimum up to the horizon is bounded away from zero.
    ConditionHoldsUpToHorizon,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct CriticalConditionReport {
    pub c0: Complex64,
    pub n_max: usize,
    /// `min over period-n Julia cycles of (1/n)|dλ/dc| / |λ|`, for `n = 1..=n_max`;
    /// `None` when every cycle of exact period `n` is attracting.
    pub minima: Vec<Option<f64>>,
    pub running_inf: Vec<f64>,
    pub verdict: ConditionVerdict,
}

impl CriticalConditionReport {
    pub fn to_json(&self) -> Value {
        json!({
            "c0": [self.c0.re, self.c0.im],
            "n_max": self.n_max,
            "minima": self.minima,
            "running_inf": self.running_inf,
            "verdict": self.verdict,
        })
    }
}

fn require_hyperbolic(map: &PolyMap) -> Result<()> {
    let report = classify_critical_orbits(map, CLASSIFY_ITER)?;
    if report.is_hyperbolic_connected() || report.all_escape() {
        Ok(())
    } else {
        Err(Error::Regime("critical orbit neither escapes nor converges to an attracting cycle".into()))
    }
}

/// Finite-horizon proxy for the sufficient condition that `c0` is not a critical
/// point of δ: the infimum over cycles of `(1/n)|Dλ/λ|` stays positive. For the
/// one-parameter family `Dλ` is the complex derivative in `c`.
///
/// The verdict never claims that `c0` is critical.
pub fn critical_condition(c0: Complex64, n_max: usize) -> Result<CriticalConditionReport> {
    let map = PolyMap::quadratic(c0);
    require_hyperbolic(&map)?;
    let mut minima = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut best: Option<f64> = None;
        for cycle in periodic_cycles(&map, n, true)? {
            let d = multiplier_derivative(c0, &cycle)?;
            let v = d.norm() / (n as f64 * cycle.multiplier().norm());
            best = Some(best.map_or(v, |b| b.min(v)));
        }
        minima.push(best);
    }
    let running_inf: Vec<f64> = minima
        .iter()
        .scan(f64::INFINITY, |acc, m| {
            *acc = acc.min(m.unwrap_or(f64::INFINITY));
            Some(*acc)
        })
        .collect();
    let holds = running_inf.last().is_some_and(|&m| m.is_finite() && m > CONDITION_FLOOR);
    Ok(CriticalConditionReport {
        c0,
        n_max,
        minima,
        running_inf,
        verdict: if holds {
            ConditionVerdict::ConditionHoldsUpToHorizon
        } else {
            ConditionVerdict::Inconclusive
        },
    })
}

#[derive(Clone, Copy, Debug)]
pub struct MetricReportOptions {
    pub h: f64,
    pub horizon: usize,
    /// Refuse parameters whose critical orbit escapes.
    pub guard_shift_locus: bool,
}

impl Default for MetricReportOptions {
    fn default() -> Self {
        Self {
            h: crate::metric::DEFAULT_STEP,
            horizon: crate::metric::DEFAULT_HORIZON,
            guard_shift_locus: true,
        }
    }
}

/// Verdict vocabulary: "positive-definite", "positive-semidefinite", "indefinite".
pub fn definiteness(t: &MetricTensor) -> &'static str {
    let [lo, hi] = t.eigenvalues();
    let scale = hi.abs().max(lo.abs());
    if lo > 1e-12 * scale {
        "positive-definite"
    } else if lo >= -1e-12 * scale {
        "positive-semidefinite"
    } else {
        "indefinite"
    }
}

fn tensor_json(t: &MetricTensor) -> Value {
    json!({
        "g11": t.g11,
        "g12": t.g12,
        "g22": t.g22,
        "eigenvalues": t.eigenvalues(),
        "richardson_change": t.richardson_change,
        "verdict": definiteness(t),
    })
}

/// δ, `M_ν`, the G-metric and both pressure-metric routes at `c0`, as a JSON
/// record with sorted keys. A shift-locus base under the guard yields a record
/// whose verdict is "excluded: shift locus".
pub fn metric_report(c0: Complex64, opts: MetricReportOptions) -> Result<Value> {
    if !c0.re.is_finite() || !c0.im.is_finite() {
        return Err(Error::InvalidInput(format!("parameter must be finite, got {c0}")));
    }
    let map = PolyMap::quadratic(c0);
    let classes = classify_critical_orbits(&map, CLASSIFY_ITER)?;
    if classes.all_escape() && opts.guard_shift_locus {
        return Ok(json!({
            "c0": [c0.re, c0.im],
            "verdict": "excluded: shift locus",
        }));
    }
    if !classes.is_hyperbolic_connected() && !classes.all_escape() {
        return Err(Error::Regime("critical orbit neither escapes nor converges to an attracting cycle".into()));
    }
    let record = EntropyFunctionalRecord::new(c0, opts.horizon)?;
    let g = g_metric(&record, opts.h)?;
    let routes = pressure_metric_routes(&record, opts.h)?;
    let both_pd = definiteness(&g) == "positive-definite" && definiteness(&routes.hessian) == "positive-definite";
    Ok(json!({
        "c0": [c0.re, c0.im],
        "horizon": opts.horizon,
        "step": opts.h,
        "delta": record.delta0,
        "lyapunov": record.lyap0,
        "g0": record.g0,
        "g_metric": tensor_json(&g),
        "pressure_metric": {
            "hessian": tensor_json(&routes.hessian),
            "variance": tensor_json(&routes.variance),
            "route_disagreement": routes.disagreement,
        },
        "verdict": if both_pd { "positive-definite" } else { "not-positive-definite" },
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn origin_fixed_point_term_is_one() {
        let r = critical_condition(Complex64::new(0.0, 0.0), 1).unwrap();
        assert!((r.minima[0].unwrap() - 1.0).abs() < 1e-12, "{:?}", r.minima);
        assert_eq!(r.verdict, ConditionVerdict::ConditionHoldsUpToHorizon);
    }

    #[test]
    fn empty_horizon_is_inconclusive() {
        let r = critical_condition(Complex64::new(-1.0, 0.0), 0).unwrap();
        assert!(r.minima.is_empty() && r.running_inf.is_empty());
        assert_eq!(r.verdict, ConditionVerdict::Inconclusive);
    }

    #[test]
    fn running_inf_is_nonincreasing() {
        let r = critical_condition(Complex64::new(-1.0, 0.0), 6).unwrap();
        // The only 2-cycle of the basilica is the attracting one.
        assert_eq!(r.minima[1], None);
        assert!(r.minima.iter().flatten().all(|&m| m > 0.0));
        assert!(r.running_inf.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn shift_locus_is_excluded() {
        let v = metric_report(Complex64::new(-6.0, 0.0), MetricReportOptions::default()).unwrap();
        assert_eq!(v["verdict"], "excluded: shift locus");
    }

    #[test]
    fn definiteness_vocabulary() {
        let mut t = MetricTensor {
            g11: 2.0,
            g12: 0.0,
            g22: 1.0,
            base: Complex64::new(0.0, 0.0),
            kind: crate::metric::MetricKind::GMetric,
            step: 1e-2,
            richardson_change: None,
        };
        assert_eq!(definiteness(&t), "positive-definite");
        t.g22 = 0.0;
        assert_eq!(definiteness(&t), "positive-semidefinite");
        t.g22 = -1.0;
        assert_eq!(definiteness(&t), "indefinite");
    }
}
