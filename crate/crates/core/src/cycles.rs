//! Periodic cycles: enumeration, multipliers, parameter derivatives and continuation.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::poly::{PolyMap, OVERFLOW_GUARD};
use crate::roots::{poly_roots, NewtonStep};

/// Largest period for which `f^n(z) = z` is solved.
pub const N_CAP: usize = 14;

/// Multipliers with `| |λ| - 1 | <= INDIFFERENT_BAND` are treated as indifferent.
pub const INDIFFERENT_BAND: f64 = 1e-8;

/// Relative tolerance used when matching `f(x_i)` against the root list.
const MATCH_TOL: f64 = 1e-8;

/// Relative distance below which two converged roots count as the same root.
/// Much tighter than `MATCH_TOL`: for Cantor Julia sets distinct period-14
/// points can be closer than 1e-8.
const DUPLICATE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Stability {
    Attracting,
    Repelling,
    Indifferent,
}

impl Stability {
    pub fn of(multiplier: Complex64) -> Self {
        let m = multiplier.norm();
        if (m - 1.0).abs() <= INDIFFERENT_BAND {
            Stability::Indifferent
        } else if m > 1.0 {
            Stability::Repelling
        } else {
            Stability::Attracting
        }
    }
}

/// A periodic orbit of exact period `k`, listed in orbit order.
#[derive(Clone, Debug, PartialEq)]
pub struct Cycle {
    points: Vec<Complex64>,
    multiplier: Complex64,
    stability: Stability,
}

impl Cycle {
    /// Builds a cycle from orbit-ordered points, taking the multiplier as the
    /// product of `f'` along the orbit. No polishing is done.
    pub fn from_orbit(map: &PolyMap, points: Vec<Complex64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("a cycle needs at least one point".into()));
        }
        let multiplier = points
            .iter()
            .fold(Complex64::new(1.0, 0.0), |acc, &z| acc * map.derivative(z));
        Ok(Self {
            stability: Stability::of(multiplier),
            points,
            multiplier,
        })
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn period(&self) -> usize {
        self.points.len()
    }

    pub fn multiplier(&self) -> Complex64 {
        self.multiplier
    }

    pub fn stability(&self) -> Stability {
        self.stability
    }

    pub fn is_repelling(&self) -> bool {
        self.stability == Stability::Repelling
    }

    /// `(1/k) log |λ|`, the Lyapunov exponent of the primitive orbit measure.
    pub fn lyapunov(&self) -> f64 {
        self.multiplier.norm().ln() / self.period() as f64
    }

    /// `max_i |f(points[i]) - points[i+1]|`.
    pub fn closure_residual(&self, map: &PolyMap) -> f64 {
        let k = self.period();
        (0..k)
            .map(|i| (map.eval(self.points[i]) - self.points[(i + 1) % k]).norm())
            .fold(0.0, f64::max)
    }

    /// Rotates the orbit so that the point with the smallest real part (then
    /// imaginary part) comes first.
    fn canonicalize(&mut self) {
        let start = (0..self.points.len())
            .min_by(|&a, &b| lex(self.points[a], self.points[b]))
            .unwrap_or(0);
        self.points.rotate_left(start);
    }

    /// The first point in canonical order, used as a deterministic sort key.
    pub fn canonical_point(&self) -> Complex64 {
        self.points
            .iter()
            .copied()
            .min_by(|a, b| lex(*a, *b))
            .unwrap_or_default()
    }
}

pub(crate) fn lex(a: Complex64, b: Complex64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Exact-period-`n` cycles of `map`. With `julia_only`, only repelling cycles
/// are kept: for a hyperbolic map these are exactly the periodic points on the
/// Julia set.
pub fn periodic_cycles(map: &PolyMap, n: usize, julia_only: bool) -> Result<Vec<Cycle>> {
    Ok(cycles_dividing(map, n)?
        .into_iter()
        .filter(|c| c.period() == n && (!julia_only || c.is_repelling()))
        .collect())
}

/// Every cycle whose period divides `n`, that is, all of `Fix(f^n)` grouped into orbits.
///
/// Sorted by period, then by canonical point.
pub fn cycles_dividing(map: &PolyMap, n: usize) -> Result<Vec<Cycle>> {
    if n == 0 || n > N_CAP {
        return Err(Error::InvalidInput(format!("period must lie in 1..={N_CAP}, got {n}")));
    }
    let roots = fixed_points_of_iterate(map, n)?;
    let orbits = group_into_orbits(map, &roots, n)?;
    let mut cycles = Vec::with_capacity(orbits.len());
    for orbit in orbits {
        let mut cycle = polish_cycle(map, orbit)?;
        if cycle.stability == Stability::Indifferent {
            return Err(Error::NonHyperbolic {
                multiplier: cycle.multiplier,
            });
        }
        cycle.canonicalize();
        cycles.push(cycle);
    }
    cycles.sort_by(|a, b| {
        a.period()
            .cmp(&b.period())
            .then_with(|| lex(a.canonical_point(), b.canonical_point()))
    });
    Ok(cycles)
}

/// Newton ratio for `f^n(z) - z` that stays finite for escaping orbits.
///
/// Once `|f^j(z)|` is large, `f^n(z) ≈ a_d^(..) u_j^(d^(n-j))`, so the ratio
/// `(f^n(z) - z) / ((f^n)'(z) - 1)` is approximately `u_j / (d^(n-j) u_j')`.
fn iterate_newton(map: &PolyMap, z: Complex64, n: usize) -> NewtonStep {
    let d = map.degree() as f64;
    let mut u = z;
    let mut du = Complex64::new(1.0, 0.0);
    for j in 0..n {
        if u.norm() > 1e8 {
            let ratio = u / (du * d.powi((n - j) as i32));
            return NewtonStep {
                ratio,
                backward_error: f64::INFINITY,
            };
        }
        let (fu, dfu) = map.eval_d(u);
        du *= dfu;
        u = fu;
    }
    let p = u - z;
    let dp = du - 1.0;
    NewtonStep {
        ratio: if dp.norm() == 0.0 { p } else { p / dp },
        backward_error: p.norm() / (1.0 + z.norm() + u.norm()),
    }
}

fn most_repelling_fixed_point(map: &PolyMap) -> Result<Complex64> {
    let mut coeffs = map.coeffs().to_vec();
    coeffs[1] -= 1.0;
    let fixed = poly_roots(&coeffs)?;
    Ok(fixed
        .into_iter()
        .max_by(|a, b| map.derivative(*a).norm().total_cmp(&map.derivative(*b).norm()))
        .expect("degree >= 2 gives fixed points"))
}

/// All `d^n` solutions of `f^n(z) = z`.
///
/// Starting guesses are the `n`-th preimages of the most repelling fixed
/// point; each lies close to a distinct periodic point on the Julia set.
/// Guesses that fail to converge or land on an already-found root are
/// resolved by Aberth sweeps that move only those guesses.
fn fixed_points_of_iterate(map: &PolyMap, n: usize) -> Result<Vec<Complex64>> {
    let total = map.degree().pow(n as u32);
    let d = map.degree();
    let beta = most_repelling_fixed_point(map)?;
    let mut levels = vec![vec![beta]];
    for j in 0..n {
        let mut next = Vec::with_capacity(levels[j].len() * d);
        for &w in &levels[j] {
            next.extend(map.preimages(w)?);
        }
        levels.push(next);
    }
    debug_assert_eq!(levels[n].len(), total);

    // Each guess comes with its chain of ancestors in the preimage tree, which is
    // an approximate orbit; multiple-shooting Newton on that chain converges far
    // more reliably than Newton on f^n(z) - z directly.
    let polished: Vec<(Complex64, bool)> = (0..total)
        .into_par_iter()
        .map(|i| {
            let mut chain: Vec<Complex64> = (0..n).map(|j| levels[n - j][i / d.pow(j as u32)]).collect();
            for _ in 0..40 {
                match cycle_newton_step(map, &mut chain) {
                    Ok(change) if change <= 1e-14 => return (chain[0], true),
                    Ok(change) if change.is_finite() => {}
                    _ => return (levels[n][i], false),
                }
            }
            (chain[0], false)
        })
        .collect();

    let newton = |z: Complex64| iterate_newton(map, z, n);
    let mut roots: Vec<Complex64> = polished.iter().map(|p| p.0).collect();
    let mut done: Vec<bool> = polished.iter().map(|p| p.1).collect();
    mark_duplicates(&roots, &mut done);

    if done.iter().any(|d| !d) {
        // Restart stragglers from their tree guesses, nudged apart so that none
        // coincides with a converged root.
        for (i, (z, ok)) in roots.iter_mut().zip(&done).enumerate() {
            if !ok {
                let g = levels[n][i];
                *z = g + Complex64::from_polar(1e-7 * (1.0 + g.norm()), 0.7 + i as f64);
            }
        }
        roots = aberth_partial(roots, done, &newton)
            .map_err(|worst| Error::RootsNotConverged {
                degree: total,
                sweeps: crate::roots::DEFAULT_MAX_SWEEPS,
                worst_residual: worst,
                polynomial: map.coeffs().to_vec(),
            })?;
    }
    // Final Newton pass on every root.
    let roots = roots
        .par_iter()
        .map(|&z| crate::roots::polish(z, &newton, 4))
        .collect();
    Ok(roots)
}

fn aberth_partial<F>(
    roots: Vec<Complex64>,
    done: Vec<bool>,
    newton: &F,
) -> std::result::Result<Vec<Complex64>, f64>
where
    F: Fn(Complex64) -> NewtonStep + Sync,
{
    crate::roots::aberth_masked(roots, done, newton, crate::roots::DEFAULT_MAX_SWEEPS)
        .map_err(|(_, worst)| worst)
}

/// Flags all but one member of every cluster of coincident roots as unconverged.
fn mark_duplicates(roots: &[Complex64], done: &mut [bool]) {
    let mut order: Vec<usize> = (0..roots.len()).filter(|&i| done[i]).collect();
    order.sort_by(|&a, &b| lex(roots[a], roots[b]));
    let index = SortedIndex::new(roots, order.clone());
    for &i in &order {
        if !done[i] {
            continue;
        }
        let tol = DUPLICATE_TOL * (1.0 + roots[i].norm());
        for j in index.within(roots[i], tol) {
            if j > i && done[j] {
                done[j] = false;
            }
        }
    }
}

/// Root indices sorted by real part, for nearest-neighbour queries.
struct SortedIndex<'a> {
    roots: &'a [Complex64],
    order: Vec<usize>,
}

impl<'a> SortedIndex<'a> {
    fn new(roots: &'a [Complex64], mut order: Vec<usize>) -> Self {
        order.sort_by(|&a, &b| roots[a].re.total_cmp(&roots[b].re));
        Self { roots, order }
    }

    fn lower_bound(&self, x: f64) -> usize {
        self.order.partition_point(|&i| self.roots[i].re < x)
    }

    fn nearest(&self, y: Complex64) -> Option<(usize, f64)> {
        let start = self.lower_bound(y.re);
        let mut best: Option<(usize, f64)> = None;
        let mut lo = start;
        let mut hi = start;
        loop {
            let bound = best.map_or(f64::INFINITY, |b| b.1);
            let mut moved = false;
            if hi < self.order.len() {
                let i = self.order[hi];
                if self.roots[i].re - y.re <= bound {
                    let d = (self.roots[i] - y).norm();
                    if best.is_none_or(|b| d < b.1) {
                        best = Some((i, d));
                    }
                    hi += 1;
                    moved = true;
                }
            }
            let bound = best.map_or(f64::INFINITY, |b| b.1);
            if lo > 0 {
                let i = self.order[lo - 1];
                if y.re - self.roots[i].re <= bound {
                    let d = (self.roots[i] - y).norm();
                    if best.is_none_or(|b| d < b.1) {
                        best = Some((i, d));
                    }
                    lo -= 1;
                    moved = true;
                }
            }
            if !moved {
                return best;
            }
        }
    }

    fn within(&self, y: Complex64, tol: f64) -> Vec<usize> {
        let start = self.lower_bound(y.re - tol);
        self.order[start..]
            .iter()
            .take_while(|&&i| self.roots[i].re <= y.re + tol)
            .copied()
            .filter(|&i| (self.roots[i] - y).norm() <= tol)
            .collect()
    }
}

/// Groups the roots of `f^n(z) = z` into orbits by matching each `f(x_i)` to
/// its nearest root. The matching is a permutation whose cycles are the orbits;
/// a cycle's length is its exact period.
fn group_into_orbits(map: &PolyMap, roots: &[Complex64], n: usize) -> Result<Vec<Vec<Complex64>>> {
    let index = SortedIndex::new(roots, (0..roots.len()).collect());
    let sigma: Vec<usize> = roots
        .par_iter()
        .map(|&x| {
            let y = map.eval(x);
            match index.nearest(y) {
                Some((j, d)) if d <= MATCH_TOL * (1.0 + y.norm()) => Ok(j),
                Some((_, d)) => Err(Error::Clustering {
                    period: n,
                    reason: format!("image of {x} is {d:e} away from every root"),
                }),
                None => Err(Error::Clustering {
                    period: n,
                    reason: "no roots".into(),
                }),
            }
        })
        .collect::<Result<_>>()?;

    let mut hit = vec![false; roots.len()];
    for &j in &sigma {
        if hit[j] {
            return Err(Error::Clustering {
                period: n,
                reason: "two roots map to the same root; roots are not separated".into(),
            });
        }
        hit[j] = true;
    }

    let mut seen = vec![false; roots.len()];
    let mut orbits = Vec::new();
    for start in 0..roots.len() {
        if seen[start] {
            continue;
        }
        let mut orbit = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            orbit.push(roots[i]);
            i = sigma[i];
        }
        if i != start || n % orbit.len() != 0 {
            return Err(Error::Clustering {
                period: n,
                reason: format!("orbit of length {} does not divide {n}", orbit.len()),
            });
        }
        orbits.push(orbit);
    }
    Ok(orbits)
}

/// Solves the cyclic system `δ_{i+1} = a_i δ_i + r_i` (indices mod k).
///
/// Returns `None` when `1 - Π a_i` is too small for the system to be solved.
pub(crate) fn cyclic_solve(a: &[Complex64], r: &[Complex64]) -> Option<Vec<Complex64>> {
    let k = a.len();
    let mut lambda = Complex64::new(1.0, 0.0);
    let mut s = Complex64::new(0.0, 0.0);
    for i in 0..k {
        s = a[i] * s + r[i];
        lambda *= a[i];
    }
    let denom = Complex64::new(1.0, 0.0) - lambda;
    if denom.norm() <= INDIFFERENT_BAND * (1.0 + lambda.norm()) * 1e-2 {
        return None;
    }
    let mut delta = Vec::with_capacity(k);
    let mut d = s / denom;
    for i in 0..k {
        delta.push(d);
        d = a[i] * d + r[i];
    }
    Some(delta)
}

/// One multiple-shooting Newton step on the cycle equations. Returns the
/// largest correction.
pub(crate) fn cycle_newton_step(map: &PolyMap, points: &mut [Complex64]) -> Result<f64> {
    let k = points.len();
    let mut a = Vec::with_capacity(k);
    let mut r = Vec::with_capacity(k);
    for i in 0..k {
        let (fz, dfz) = map.eval_d(points[i]);
        a.push(dfz);
        r.push(fz - points[(i + 1) % k]);
    }
    let delta = cyclic_solve(&a, &r).ok_or_else(|| Error::SingularCycleSystem {
        multiplier: a.iter().product(),
    })?;
    let mut worst = 0.0f64;
    let mut finite = true;
    for (z, d) in points.iter_mut().zip(&delta) {
        *z += d;
        finite &= z.is_finite();
        worst = worst.max(d.norm() / (1.0 + z.norm()));
    }
    if !finite {
        return Err(Error::Escaped {
            step: 0,
            modulus: OVERFLOW_GUARD,
        });
    }
    Ok(worst)
}

fn polish_cycle(map: &PolyMap, mut points: Vec<Complex64>) -> Result<Cycle> {
    let mut last = f64::INFINITY;
    for _ in 0..6 {
        let change = cycle_newton_step(map, &mut points)?;
        if change <= 1e-16 || change >= last {
            break;
        }
        last = change;
    }
    Cycle::from_orbit(map, points)
}

/// Derivatives `dz_i/dc` of the cycle points along the quadratic family.
fn point_derivatives(map: &PolyMap, points: &[Complex64]) -> Result<Vec<Complex64>> {
    let a: Vec<Complex64> = points.iter().map(|&z| map.derivative(z)).collect();
    let ones = vec![Complex64::new(1.0, 0.0); points.len()];
    cyclic_solve(&a, &ones).ok_or_else(|| Error::SingularCycleSystem {
        multiplier: a.iter().product(),
    })
}

/// `dλ/dc` for a cycle of `z^2 + c0`, by implicit differentiation of the cycle equations.
pub fn multiplier_derivative(c0: Complex64, cycle: &Cycle) -> Result<Complex64> {
    let map = PolyMap::quadratic(c0);
    let m = cycle.multiplier.norm();
    if (m - 1.0).abs() <= INDIFFERENT_BAND || (cycle.multiplier - 1.0).norm() <= INDIFFERENT_BAND {
        return Err(Error::SingularCycleSystem {
            multiplier: cycle.multiplier,
        });
    }
    let pts = cycle.points();
    let dz = point_derivatives(&map, pts)?;
    let a: Vec<Complex64> = pts.iter().map(|&z| map.derivative(z)).collect();
    let k = pts.len();
    // prefix[i] = a_0 ... a_{i-1}, suffix[i] = a_i ... a_{k-1}
    let mut prefix = vec![Complex64::new(1.0, 0.0); k + 1];
    let mut suffix = vec![Complex64::new(1.0, 0.0); k + 1];
    for i in 0..k {
        prefix[i + 1] = prefix[i] * a[i];
        suffix[k - 1 - i] = suffix[k - i] * a[k - 1 - i];
    }
    let mut total = Complex64::new(0.0, 0.0);
    for i in 0..k {
        let (_, _, d2) = map.eval_d2(pts[i]);
        total += d2 * dz[i] * prefix[i] * suffix[i + 1];
    }
    Ok(total)
}

/// Central finite-difference estimate of `dλ/dc` using continuation to `c0 ± h`.
pub fn multiplier_derivative_fd(c0: Complex64, cycle: &Cycle, h: f64) -> Result<Complex64> {
    let plus = continue_cycle(cycle, c0, c0 + h, 4)?;
    let minus = continue_cycle(cycle, c0, c0 - h, 4)?;
    Ok((plus.multiplier - minus.multiplier) / (2.0 * h))
}

/// Implicit `dλ/dc` with the finite-difference cross-check enforced at relative error 1e-6.
pub fn multiplier_derivative_checked(c0: Complex64, cycle: &Cycle) -> Result<Complex64> {
    let implicit = multiplier_derivative(c0, cycle)?;
    let h = 1e-4 * (1.0 + c0.norm()) / cycle.period() as f64;
    let fd = multiplier_derivative_fd(c0, cycle, h)?;
    // Richardson extrapolation removes the O(h^2) term of the central difference.
    let fd_half = multiplier_derivative_fd(c0, cycle, h / 2.0)?;
    let extrapolated = (fd_half * 4.0 - fd) / 3.0;
    let rel = (extrapolated - implicit).norm() / implicit.norm().max(1e-300);
    if rel > 1e-6 {
        return Err(Error::RouteDisagreement {
            disagreement: rel,
            limit: 1e-6,
        });
    }
    Ok(implicit)
}

/// Continues `cycle` of `z^2 + c_from` to `z^2 + c_to` along the straight segment.
///
/// `steps` is the nominal number of predictor-corrector steps; steps are
/// halved automatically when Newton fails, when a point moves by more than
/// half the smallest gap between cycle points, or when the multiplier turns by
/// more than a quarter turn.
pub fn continue_cycle(cycle: &Cycle, c_from: Complex64, c_to: Complex64, steps: usize) -> Result<Cycle> {
    continue_cycle_tracked(cycle, c_from, c_to, steps).map(|(c, _)| c)
}

/// Like [`continue_cycle`], also returning `log λ` at `c_to` on the branch
/// obtained by continuity from the principal logarithm at `c_from`.
pub fn continue_cycle_tracked(
    cycle: &Cycle,
    c_from: Complex64,
    c_to: Complex64,
    steps: usize,
) -> Result<(Cycle, Complex64)> {
    let log0 = cycle.multiplier.ln();
    if c_to == c_from {
        return Ok((cycle.clone(), log0));
    }
    let steps = steps.max(1);
    let span = c_to - c_from;
    let mut t = 0.0f64;
    let mut dt = 1.0 / steps as f64;
    let min_dt = 1e-10;
    let mut points = cycle.points.clone();
    let mut lambda = cycle.multiplier;
    let mut log_lambda = log0;

    while t < 1.0 {
        if 1.0 - t < dt {
            dt = 1.0 - t;
        }
        let c_here = c_from + span * t;
        let c_next = if t + dt >= 1.0 { c_to } else { c_from + span * (t + dt) };
        let map_here = PolyMap::quadratic(c_here);
        let map_next = PolyMap::quadratic(c_next);
        let attempt = (|| -> Option<(Vec<Complex64>, Complex64)> {
            let dz = point_derivatives(&map_here, &points).ok()?;
            let dc = c_next - c_here;
            let mut trial: Vec<Complex64> = points.iter().zip(&dz).map(|(z, d)| z + d * dc).collect();
            let mut converged = false;
            for _ in 0..12 {
                let change = cycle_newton_step(&map_next, &mut trial).ok()?;
                if change <= 1e-14 {
                    converged = true;
                    break;
                }
            }
            let scale = trial.iter().map(|z| 1.0 + z.norm()).fold(1.0, f64::max);
            let residual = closure(&map_next, &trial);
            if !converged || residual > 1e-12 * scale {
                return None;
            }
            let gap = min_gap(&points);
            let moved = points
                .iter()
                .zip(&trial)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            if gap.is_finite() && moved >= 0.5 * gap {
                return None;
            }
            let new_lambda = trial
                .iter()
                .fold(Complex64::new(1.0, 0.0), |acc, &z| acc * map_next.derivative(z));
            if lambda.norm() > 1e-12 && new_lambda.norm() > 1e-12 {
                let turn = (new_lambda / lambda).arg().abs();
                if turn > std::f64::consts::FRAC_PI_2 {
                    return None;
                }
            }
            Some((trial, new_lambda))
        })();

        match attempt {
            Some((trial, new_lambda)) => {
                if min_gap(&trial) < 1e-9 {
                    return Err(Error::ContinuationFailed(format!(
                        "cycle points merged near c = {c_next}"
                    )));
                }
                if Stability::of(new_lambda) == Stability::Indifferent {
                    return Err(Error::ContinuationFailed(format!(
                        "multiplier {new_lambda} reached the unit circle near c = {c_next}"
                    )));
                }
                if lambda.norm() > 1e-300 && new_lambda.norm() > 1e-300 {
                    log_lambda += (new_lambda / lambda).ln();
                } else {
                    log_lambda = new_lambda.ln();
                }
                points = trial;
                lambda = new_lambda;
                t = if c_next == c_to { 1.0 } else { t + dt };
                dt = (dt * 2.0).min(1.0 / steps as f64);
            }
            None => {
                dt *= 0.5;
                if dt < min_dt {
                    return Err(Error::ContinuationFailed(format!(
                        "Newton corrector failed near c = {c_here}"
                    )));
                }
            }
        }
    }
    let map = PolyMap::quadratic(c_to);
    let out = Cycle::from_orbit(&map, points)?;
    if (out.multiplier - lambda).norm() > 1e-9 * (1.0 + lambda.norm()) {
        return Err(Error::ContinuationFailed("multiplier drift".into()));
    }
    Ok((out, log_lambda))
}

fn closure(map: &PolyMap, points: &[Complex64]) -> f64 {
    let k = points.len();
    (0..k)
        .map(|i| (map.eval(points[i]) - points[(i + 1) % k]).norm())
        .fold(0.0, f64::max)
}

fn min_gap(points: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            gap = gap.min((points[i] - points[j]).norm());
        }
    }
    gap
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn fixed_points_of_z_squared() {
        let f = PolyMap::quadratic(c(0.0, 0.0));
        let cycles = periodic_cycles(&f, 1, false).unwrap();
        assert_eq!(cycles.len(), 2);
        assert!(cycles[0].points()[0].norm() < 1e-14);
        assert!(cycles[0].multiplier().norm() < 1e-14);
        assert!((cycles[1].points()[0] - 1.0).norm() < 1e-14);
        assert!((cycles[1].multiplier() - 2.0).norm() < 1e-13);
    }

    #[test]
    fn two_cycle_of_z_squared() {
        let f = PolyMap::quadratic(c(0.0, 0.0));
        let cycles = periodic_cycles(&f, 2, true).unwrap();
        assert_eq!(cycles.len(), 1);
        let third = std::f64::consts::TAU / 3.0;
        let pts = cycles[0].points();
        for w in [Complex64::from_polar(1.0, third), Complex64::from_polar(1.0, 2.0 * third)] {
            assert!(pts.iter().any(|p| (p - w).norm() < 1e-13));
        }
        assert!((cycles[0].multiplier() - 4.0).norm() < 1e-12);
    }

    #[test]
    fn basilica_fixed_points() {
        let f = PolyMap::quadratic(c(-1.0, 0.0));
        let cycles = periodic_cycles(&f, 1, true).unwrap();
        assert_eq!(cycles.len(), 2);
        let s5 = 5f64.sqrt();
        let mut lambdas: Vec<f64> = cycles.iter().map(|c| c.multiplier().re).collect();
        lambdas.sort_by(f64::total_cmp);
        assert!((lambdas[0] - (1.0 - s5)).abs() < 1e-13);
        assert!((lambdas[1] - (1.0 + s5)).abs() < 1e-13);
    }

    #[test]
    fn julia_cycle_counts_for_z_squared() {
        let f = PolyMap::quadratic(c(0.0, 0.0));
        let counts: Vec<usize> = (1..=6).map(|n| periodic_cycles(&f, n, true).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 6, 9]);
    }

    #[test]
    fn period_cap_is_enforced() {
        let f = PolyMap::quadratic(c(0.0, 0.0));
        assert!(periodic_cycles(&f, 0, true).is_err());
        assert!(periodic_cycles(&f, N_CAP + 1, true).is_err());
    }

    #[test]
    fn indifferent_cycle_is_rejected() {
        // c = -3/4: the fixed point has multiplier -1.
        let f = PolyMap::quadratic(c(-0.75, 0.0));
        match periodic_cycles(&f, 1, false) {
            Err(Error::NonHyperbolic { .. }) | Err(Error::Clustering { .. }) => {}
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn cyclic_solver_matches_direct_substitution() {
        let a = [c(2.0, 1.0), c(-0.5, 0.3), c(1.5, -2.0)];
        let r = [c(0.1, 0.0), c(0.0, -0.2), c(0.3, 0.3)];
        let d = cyclic_solve(&a, &r).unwrap();
        for i in 0..3 {
            let lhs = d[(i + 1) % 3];
            let rhs = a[i] * d[i] + r[i];
            assert!((lhs - rhs).norm() < 1e-14);
        }
    }

    #[test]
    fn fixed_point_multiplier_derivative() {
        let f = PolyMap::quadratic(c(0.0, 0.0));
        let cycles = periodic_cycles(&f, 1, true).unwrap();
        let d = multiplier_derivative(c(0.0, 0.0), &cycles[0]).unwrap();
        assert!((d - c(-2.0, 0.0)).norm() < 1e-12);
        let checked = multiplier_derivative_checked(c(0.0, 0.0), &cycles[0]).unwrap();
        assert_eq!(d, checked);
    }

    #[test]
    fn three_cycle_multiplier_derivatives() {
        let f = PolyMap::quadratic(c(0.0, 0.0));
        let cycles = periodic_cycles(&f, 3, true).unwrap();
        let s7 = 7f64.sqrt();
        let mut want = vec![c(4.0, -4.0 * s7), c(4.0, 4.0 * s7)];
        for cyc in &cycles {
            let d = multiplier_derivative(c(0.0, 0.0), cyc).unwrap();
            let pos = want.iter().position(|w| (w - d).norm() < 1e-10).expect("matches one branch");
            want.remove(pos);
        }
        assert!(want.is_empty());
    }

    #[test]
    fn continuation_of_fixed_point() {
        let f = PolyMap::quadratic(c(0.0, 0.0));
        let fixed = periodic_cycles(&f, 1, true).unwrap().remove(0);
        let moved = continue_cycle(&fixed, c(0.0, 0.0), c(0.1, 0.0), 10).unwrap();
        let s = 0.6f64.sqrt();
        assert!((moved.points()[0] - (1.0 + s) / 2.0).norm() < 1e-12);
        assert!((moved.multiplier() - (1.0 + s)).norm() < 1e-12);
        let same = continue_cycle(&fixed, c(0.0, 0.0), c(0.0, 0.0), 10).unwrap();
        assert_eq!(same, fixed);
    }

    #[test]
    fn continuation_detects_collision() {
        // The repelling fixed point of z^2 + c meets the attracting one at c = 1/4.
        let f = PolyMap::quadratic(c(0.0, 0.0));
        let fixed = periodic_cycles(&f, 1, true).unwrap().remove(0);
        let err = continue_cycle(&fixed, c(0.0, 0.0), c(0.3, 0.0), 10).unwrap_err();
        assert!(matches!(err, Error::ContinuationFailed(_)), "{err}");
    }
}
