//! Critical orbit classification: the hyperbolicity witness.

use num_complex::Complex64;

use crate::cycles::{Cycle, Stability};
use crate::error::Result;
use crate::poly::PolyMap;

/// Distance at which an orbit counts as captured by its attracting cycle.
pub const CAPTURE_TOL: f64 = 1e-9;

/// Candidate periods are only examined up to this length.
const MAX_DETECTED_PERIOD: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub enum CriticalFate {
    /// The orbit left the escape disk at iteration `iteration`.
    Escapes { iteration: usize },
    /// The orbit converges to `cycle`, an attracting cycle of exact period `period`.
    Attracted { cycle: Cycle, period: usize },
    Undecided,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalPointReport {
    pub point: Complex64,
    pub fate: CriticalFate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalOrbitReport {
    pub critical: Vec<CriticalPointReport>,
    pub iterations_used: usize,
    pub escape_radius: f64,
}

impl CriticalOrbitReport {
    /// True when every critical point is attracted to an attracting cycle.
    pub fn is_hyperbolic_connected(&self) -> bool {
        self.critical
            .iter()
            .all(|c| matches!(c.fate, CriticalFate::Attracted { .. }))
    }

    /// True when every critical point escapes (shift locus).
    pub fn all_escape(&self) -> bool {
        self.critical
            .iter()
            .all(|c| matches!(c.fate, CriticalFate::Escapes { .. }))
    }

    /// The period of the first attracting cycle found, if any.
    pub fn attracting_period(&self) -> Option<usize> {
        self.critical.iter().find_map(|c| match c.fate {
            CriticalFate::Attracted { period, .. } => Some(period),
            _ => None,
        })
    }
}

/// Follows each critical orbit for at most `max_iter` steps.
///
/// Escape is declared once `|z|` exceeds the escape radius. Periodicity is
/// detected by comparing against a reference point refreshed at powers of two;
/// a candidate period is confirmed by solving the cycle equations and checking
/// that the cycle attracts.
pub fn classify_critical_orbits(map: &PolyMap, max_iter: usize) -> Result<CriticalOrbitReport> {
    let radius = map.escape_radius();
    let mut reports = Vec::new();
    let mut used = 0usize;
    for point in map.critical_points()? {
        let (fate, iters) = follow(map, point, max_iter.max(1), radius);
        used = used.max(iters);
        reports.push(CriticalPointReport { point, fate });
    }
    Ok(CriticalOrbitReport {
        critical: reports,
        iterations_used: used,
        escape_radius: radius,
    })
}

fn follow(map: &PolyMap, z0: Complex64, max_iter: usize, radius: f64) -> (CriticalFate, usize) {
    let mut z = z0;
    let mut reference = z0;
    let mut power = 1usize;
    let mut lam = 0usize;
    for i in 1..=max_iter {
        z = map.eval(z);
        if !(z.norm() <= radius) {
            return (CriticalFate::Escapes { iteration: i }, i);
        }
        lam += 1;
        let scale = 1.0 + z.norm();
        if lam <= MAX_DETECTED_PERIOD && (z - reference).norm() <= 1e-6 * scale {
            if let Some((cycle, period)) = confirm(map, z, lam) {
                let dist = cycle
                    .points()
                    .iter()
                    .map(|p| (p - z).norm())
                    .fold(f64::INFINITY, f64::min);
                if dist <= CAPTURE_TOL * scale || settle(map, z, &cycle, max_iter - i) {
                    return (CriticalFate::Attracted { cycle, period }, i);
                }
            }
        }
        if lam == power {
            reference = z;
            power *= 2;
            lam = 0;
        }
    }
    (CriticalFate::Undecided, max_iter)
}

/// Iterates until the orbit is within capture distance of the cycle.
fn settle(map: &PolyMap, mut z: Complex64, cycle: &Cycle, budget: usize) -> bool {
    for _ in 0..budget {
        let dist = cycle
            .points()
            .iter()
            .map(|p| (p - z).norm())
            .fold(f64::INFINITY, f64::min);
        if dist <= CAPTURE_TOL * (1.0 + z.norm()) {
            return true;
        }
        z = map.eval(z);
    }
    false
}

/// Solves for the attracting cycle through `z` with candidate period `p`,
/// reducing to the minimal period.
fn confirm(map: &PolyMap, z: Complex64, p: usize) -> Option<(Cycle, usize)> {
    let mut orbit = Vec::with_capacity(p);
    let mut w = z;
    for _ in 0..p {
        orbit.push(w);
        w = map.eval(w);
    }
    let cycle = solve_cycle(map, orbit)?;
    if cycle.stability() != Stability::Attracting {
        return None;
    }
    let pts = cycle.points();
    let k = pts.len();
    for m in (1..k).filter(|m| k % m == 0) {
        let closes = (0..k).all(|i| (pts[i] - pts[(i + m) % k]).norm() <= 1e-9 * (1.0 + pts[i].norm()));
        if closes {
            let reduced = solve_cycle(map, pts[..m].to_vec())?;
            return Some((reduced, m));
        }
    }
    Some((cycle, k))
}

fn solve_cycle(map: &PolyMap, mut points: Vec<Complex64>) -> Option<Cycle> {
    let k = points.len();
    for _ in 0..30 {
        let mut a = Vec::with_capacity(k);
        let mut r = Vec::with_capacity(k);
        for i in 0..k {
            let (fz, dfz) = map.eval_d(points[i]);
            a.push(dfz);
            r.push(fz - points[(i + 1) % k]);
        }
        let delta = crate::cycles::cyclic_solve(&a, &r)?;
        let mut change = 0.0f64;
        for (z, d) in points.iter_mut().zip(&delta) {
            *z += d;
            change = change.max(d.norm() / (1.0 + z.norm()));
        }
        if !change.is_finite() {
            return None;
        }
        if change <= 1e-15 {
            break;
        }
    }
    let cycle = Cycle::from_orbit(map, points).ok()?;
    (cycle.closure_residual(map) <= 1e-10).then_some(cycle)
}
