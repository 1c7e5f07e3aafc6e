//! Multiplier statistics: the counting function N_T, its comparison with
//! Li(T^δ), annulus occupancy and the reality test for multipliers.

use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::cycles::{lex, periodic_cycles, N_CAP};
use crate::error::{Error, Result};
use crate::poly::PolyMap;

/// Imaginary parts below this fraction of `|λ|` are rounding noise.
const REALITY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CensusEntry {
    pub period: usize,
    pub multiplier: Complex64,
    pub modulus: f64,
    #[serde(skip)]
    canonical: Complex64,
}

/// Every repelling cycle of period at most `n_max`, sorted by multiplier modulus.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MultiplierCensus {
    entries: Vec<CensusEntry>,
    n_max: usize,
    coeffs: Vec<Complex64>,
    monomial: bool,
    completeness_bound: f64,
}

impl MultiplierCensus {
    pub fn entries(&self) -> &[CensusEntry] {
        &self.entries
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Coefficients of the map the census was taken from.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_monomial(&self) -> bool {
        self.monomial
    }

    /// Smallest multiplier modulus among period `n_max + 1` cycles. Below it
    /// no unlisted cycle of period `n_max + 1` can interfere with a count.
    pub fn completeness_bound(&self) -> f64 {
        self.completeness_bound
    }

    /// `#{entries with |λ| < t}`.
    pub fn count_below(&self, t: f64) -> usize {
        self.entries.partition_point(|e| e.modulus < t)
    }

    fn guard(&self, t: f64) -> Result<()> {
        if !(t <= self.completeness_bound) {
            return Err(Error::OutOfRange(format!(
                "T = {t} lies beyond the complete range of the census (moduli below {})",
                self.completeness_bound
            )));
        }
        Ok(())
    }

    /// Writes `period,re_lambda,im_lambda,modulus` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "period,re_lambda,im_lambda,modulus")?;
        for e in &self.entries {
            writeln!(
                out,
                "{},{},{},{}",
                e.period,
                fmt17(e.multiplier.re),
                fmt17(e.multiplier.im),
                fmt17(e.modulus)
            )?;
        }
        Ok(())
    }
}

/// Shortest scientific form with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Builds the census of repelling cycles with period `1..=n_max`, plus the
/// completeness bound from period `n_max + 1`.
pub fn census(map: &PolyMap, n_max: usize) -> Result<MultiplierCensus> {
    if n_max == 0 || n_max >= N_CAP {
        return Err(Error::InvalidInput(format!(
            "census horizon must lie in 1..={} (period n_max + 1 is enumerated for the completeness bound)",
            N_CAP - 1
        )));
    }
    let per_period: Vec<Vec<CensusEntry>> = (1..=n_max + 1)
        .into_par_iter()
        .map(|n| {
            Ok(periodic_cycles(map, n, true)?
                .into_iter()
                .map(|c| CensusEntry {
                    period: n,
                    multiplier: c.multiplier(),
                    modulus: c.multiplier().norm(),
                    canonical: c.canonical_point(),
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    let completeness_bound = per_period[n_max]
        .iter()
        .map(|e| e.modulus)
        .fold(f64::INFINITY, f64::min);
    let mut entries: Vec<CensusEntry> = per_period[..n_max].iter().flatten().copied().collect();
    entries.sort_by(|a, b| {
        a.modulus
            .total_cmp(&b.modulus)
            .then(a.period.cmp(&b.period))
            .then_with(|| lex(a.canonical, b.canonical))
    });
    Ok(MultiplierCensus {
        entries,
        n_max,
        coeffs: map.coeffs().to_vec(),
        monomial: map.is_monomial_conjugate(),
        completeness_bound,
    })
}

/// `Li(x) = ∫_2^x dt / log t`, by adaptive Gauss–Kronrod quadrature in `u = log t`.
pub fn li_offset(x: f64) -> Result<f64> {
    if !(x >= 2.0) || !x.is_finite() {
        return Err(Error::OutOfRange(format!("Li(x) needs x >= 2, got {x}")));
    }
    let (a, b) = (2f64.ln(), x.ln());
    if b == a {
        return Ok(0.0);
    }
    let f = |u: f64| u.exp() / u;
    // Absolute 1e-10 until rounding of the result itself dominates.
    let rough = gk15(&f, a, b).0.abs();
    let tol = 1e-10f64.max(1e-15 * rough);
    Ok(adaptive(&f, a, b, tol, 50))
}

fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
    let (value, err) = gk15(f, a, b);
    if err <= tol || depth == 0 {
        return value;
    }
    let m = 0.5 * (a + b);
    adaptive(f, a, m, 0.5 * tol, depth - 1) + adaptive(f, m, b, 0.5 * tol, depth - 1)
}

/// 15-point Kronrod estimate and its difference from the embedded 7-point Gauss rule.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    const XK: [f64; 8] = [
        0.991_455_371_120_812_6,
        0.949_107_912_342_758_5,
        0.864_864_423_359_769_1,
        0.741_531_185_599_394_4,
        0.586_087_235_467_691_1,
        0.405_845_151_377_397_2,
        0.207_784_955_007_898_5,
        0.0,
    ];
    const WK: [f64; 8] = [
        0.022_935_322_010_529_22,
        0.063_092_092_629_978_55,
        0.104_790_010_322_250_2,
        0.140_653_259_715_525_9,
        0.169_004_726_639_267_9,
        0.190_350_578_064_785_4,
        0.204_432_940_075_298_9,
        0.209_482_141_084_728_0,
    ];
    const WG: [f64; 4] = [
        0.129_484_966_168_869_7,
        0.279_705_391_489_276_7,
        0.381_830_050_505_118_9,
        0.417_959_183_673_469_4,
    ];
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let pair = f(c - h * XK[i]) + f(c + h * XK[i]);
        kron += WK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// `N_T / Li(T^δ)` for each `T`.
pub fn oh_winter_ratio(census: &MultiplierCensus, delta: f64, t_list: &[f64]) -> Result<Vec<f64>> {
    if census.is_monomial() {
        return Err(Error::Excluded("monomial"));
    }
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidInput(format!("dimension must be positive, got {delta}")));
    }
    t_list
        .iter()
        .map(|&t| {
            census.guard(t)?;
            let x = t.powf(delta);
            if !(x > 2.0) {
                return Err(Error::OutOfRange(format!("T^δ = {x} must exceed 2")));
            }
            Ok(census.count_below(t) as f64 / li_offset(x)?)
        })
        .collect()
}

/// `#{entries with T <= |λ| < T + S}`.
pub fn annulus_occupancy(census: &MultiplierCensus, t: f64, s: f64) -> Result<usize> {
    if !(s >= 0.0) || !t.is_finite() || !s.is_finite() {
        return Err(Error::InvalidInput(format!("annulus needs finite T and S >= 0, got T = {t}, S = {s}")));
    }
    census.guard(t + s)?;
    Ok(census.count_below(t + s) - census.count_below(t))
}

/// `max |Im λ| / |λ|` over the census, with rounding-level imaginary parts treated as zero.
pub fn reality_defect(census: &MultiplierCensus) -> f64 {
    census
        .entries()
        .iter()
        .map(|e| {
            let r = e.multiplier.im.abs() / e.modulus;
            if r <= REALITY_TOL * e.period as f64 {
                0.0
            } else {
                r
            }
        })
        .fold(0.0, f64::max)
}
