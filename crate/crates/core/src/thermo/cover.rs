//! Markov covers of quadratic Julia sets.
//!
//! Two codings are used, both with the same transition graph: cell `m` at
//! depth `k` maps onto cells `2m mod 2^k` and `2m + 1 mod 2^k`.
//!
//! * Connected Julia sets are coded by external angles. The equipotential
//!   circle is pulled back until it converges to the boundary parametrisation
//!   `θ ↦ γ(θ)` of the Julia set; cell `m` is `γ([m/2^k, (m+1)/2^k])`.
//! * Cantor Julia sets with `|c| > 2` are coded by itineraries: both inverse
//!   branches map a disk `U ⊃ J` strictly into itself, and cell `m` is the image
//!   of `U` under the composition of branches spelled by the binary digits of `m`.
//!
//! The derivative sample of the edge `m → (2m + a) mod 2^k` is `|f'|` at a
//! point of the depth-`k+1` cell `2m + a`, the part of cell `m` that maps onto
//! cell `(2m + a) mod 2^k`. Itinerary cells use their centre. Angle cells use
//! the landing point of the periodic angle `(2m + a) / (2^(k+1) - 1)`, so that
//! the matrix traces reproduce the periodic orbit sums up to period `k + 1`.

use num_complex::Complex64;

use crate::critical::{classify_critical_orbits, CriticalFate};
use crate::cycles::cycle_newton_step;
use crate::error::{Error, Result};
use crate::poly::PolyMap;

pub const MAX_DEPTH: usize = 16;

/// Iteration budget used to decide whether the critical orbit escapes.
const CLASSIFY_ITER: usize = 20_000;

/// Grid resolution on which the boundary curve is first converged.
const BASE_GRID_LOG2: usize = 12;

const CURVE_TOL: f64 = 1e-13;
const CURVE_MAX_LEVELS: usize = 5000;
/// Pullback change below which landing points are finished by Newton.
const POLISH_START: f64 = 1e-7;
const POLISH_RADIUS: f64 = 1e-5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coding {
    ExternalAngle,
    Itinerary,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub center: Complex64,
    pub radius: f64,
}

#[derive(Clone, Debug)]
pub struct MarkovCover {
    cells: Vec<Cell>,
    /// `edge_points[2m + a]` is the sample point of the edge `m → (2m + a) mod 2^k`.
    edge_points: Vec<Complex64>,
    deriv: Vec<f64>,
    depth: usize,
    coding: Coding,
}

impl MarkovCover {
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn coding(&self) -> Coding {
        self.coding
    }

    /// Cells reachable in one step from `i`.
    pub fn successors(&self, i: usize) -> [usize; 2] {
        let n = self.cells.len();
        [(2 * i) % n, (2 * i + 1) % n]
    }

    /// `|f'|` samples on the two edges leaving `i`, in the order of [`MarkovCover::successors`].
    pub fn edge_derivatives(&self, i: usize) -> [f64; 2] {
        [self.deriv[2 * i], self.deriv[2 * i + 1]]
    }

    pub fn edge_points(&self) -> &[Complex64] {
        &self.edge_points
    }

    /// Dense 0/1 adjacency matrix.
    pub fn adjacency(&self) -> Vec<Vec<u8>> {
        let n = self.cells.len();
        let mut a = vec![vec![0u8; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            for j in self.successors(i) {
                row[j] = 1;
            }
        }
        a
    }

    /// True when `z` lies in the closed disk of some cell.
    pub fn covers(&self, z: Complex64) -> bool {
        self.cells.iter().any(|c| (c.center - z).norm() <= c.radius)
    }
}

/// Builds the depth-`depth` Markov cover of the Julia set of `z^2 + c`.
pub fn build_markov_cover(map: &PolyMap, depth: usize) -> Result<MarkovCover> {
    let c = map.require_quadratic()?;
    if depth == 0 || depth > MAX_DEPTH {
        return Err(Error::InvalidInput(format!("cover depth must lie in 1..={MAX_DEPTH}, got {depth}")));
    }
    let report = classify_critical_orbits(map, CLASSIFY_ITER)?;
    let cover = match &report.critical[0].fate {
        CriticalFate::Attracted { .. } => external_angle_cover(c, depth)?,
        CriticalFate::Escapes { .. } if c.norm() > 2.0 => itinerary_cover(c, depth),
        CriticalFate::Escapes { .. } => {
            return Err(Error::Regime(format!(
                "Cantor Julia set with |c| = {:.4} <= 2 has no itinerary cover here",
                c.norm()
            )))
        }
        CriticalFate::Undecided => {
            return Err(Error::Regime(format!(
                "critical orbit of z^2 + {c} is neither captured nor escaping; map not hyperbolic"
            )))
        }
    };
    if cover.cells.iter().any(|cell| (cell.center - c).norm() <= cell.radius) {
        return Err(Error::CoverCrossesCriticalValue { depth });
    }
    Ok(cover)
}

fn from_samples(
    cells: Vec<Cell>,
    edge_points: Vec<Complex64>,
    depth: usize,
    coding: Coding,
) -> MarkovCover {
    let deriv = edge_points.iter().map(|z| 2.0 * z.norm()).collect();
    MarkovCover {
        cells,
        edge_points,
        deriv,
        depth,
        coding,
    }
}

/// Boundary parametrisation `γ(i / M)` on a grid of `M = 2^grid_log2` angles.
pub(crate) fn boundary_curve(c: Complex64, grid_log2: usize) -> Result<Vec<Complex64>> {
    let base_log2 = BASE_GRID_LOG2.min(grid_log2);
    let m = 1usize << base_log2;
    let r0 = 4.0 * (c.norm().max(2.0) + 1.0);
    let mut gamma: Vec<Complex64> = (0..m)
        .map(|i| Complex64::from_polar(r0, std::f64::consts::TAU * i as f64 / m as f64))
        .collect();
    let mut converged = false;
    for _ in 0..CURVE_MAX_LEVELS {
        let next = pull_back_curve(&gamma, c)?;
        let change = gamma
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        gamma = next;
        if change < CURVE_TOL {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Regime(format!(
            "equipotential pullback for c = {c} did not converge; too close to the bifurcation locus"
        )));
    }
    for _ in base_log2..grid_log2 {
        gamma = refine_curve(&gamma, c);
    }
    Ok(gamma)
}

/// One pullback of a closed curve sampled at `i / M`:
/// `new[i] = ±sqrt(old[2i mod M] - c)`, with the sign fixed by continuity.
fn pull_back_curve(old: &[Complex64], c: Complex64) -> Result<Vec<Complex64>> {
    let m = old.len();
    let half = m / 2;
    let mut new = vec![Complex64::new(0.0, 0.0); m];
    let w0 = (old[0] - c).sqrt();
    new[0] = if (w0 - old[0]).norm() <= (-w0 - old[0]).norm() { w0 } else { -w0 };
    for i in 1..half {
        let w = (old[2 * i] - c).sqrt();
        new[i] = if (w * new[i - 1].conj()).re >= 0.0 { w } else { -w };
    }
    for i in 0..half {
        new[i + half] = -new[i];
    }
    // The branch tracked across the half circle must meet the other branch.
    let last = new[half - 1];
    if (last - new[half]).norm() > (last + new[half]).norm() {
        return Err(Error::Regime(
            "boundary curve lost continuity; grid too coarse for this parameter".into(),
        ));
    }
    Ok(new)
}

/// Landing points of the `2^p` angles `j / (2^p - 1)`, the periodic angles of
/// period dividing `p`. Angle `j / (2^p - 1)` lies in the dyadic interval
/// `[j / 2^p, (j + 1) / 2^p)`, so entry `j` samples the depth-`p` cell `j`, and
/// doubling permutes the samples the way the shift permutes the cells.
pub(crate) fn periodic_landing_points(c: Complex64, p: usize, base: &[Complex64]) -> Result<Vec<Complex64>> {
    let m = base.len();
    let count = (1usize << p) - 1;
    // Base grid neighbours bracketing each periodic angle.
    let bracket: Vec<usize> = (0..count).map(|j| (j as u128 * m as u128 / count as u128) as usize).collect();
    let mut pts: Vec<Complex64> = bracket.iter().map(|&i| base[i]).collect();
    let mut polished = false;
    for _ in 0..CURVE_MAX_LEVELS {
        let mut change = 0.0f64;
        let next: Vec<Complex64> = (0..count)
            .map(|j| {
                let w = (pts[(2 * j) % count] - c).sqrt();
                let i = bracket[j];
                let mid = base[i] + base[(i + 1) % m];
                let z = if (w * 2.0 - mid).norm() <= (w * 2.0 + mid).norm() { w } else { -w };
                change = change.max((z - pts[j]).norm());
                z
            })
            .collect();
        pts = next;
        if change < CURVE_TOL {
            break;
        }
        if !polished && change < POLISH_START {
            polished = true;
            if let Some(done) = polish_orbits(c, &pts) {
                pts = done;
                break;
            }
        }
    }
    if !pts.iter().all(|z| z.is_finite()) {
        return Err(Error::Regime(format!("periodic landing points for c = {c} diverged")));
    }
    // Angle 1 = 0 closes the list.
    pts.push(pts[0]);
    Ok(pts)
}

/// Newton on each doubling orbit of the periodic angles. Returns `None` if some
/// orbit moves further than the pullback error allows, which means the guess
/// sat in the basin of a different cycle.
fn polish_orbits(c: Complex64, pts: &[Complex64]) -> Option<Vec<Complex64>> {
    let map = PolyMap::quadratic(c);
    let count = pts.len();
    let mut out = pts.to_vec();
    let mut seen = vec![false; count];
    let mut orbit = Vec::new();
    let mut z = Vec::new();
    for start in 0..count {
        if seen[start] {
            continue;
        }
        orbit.clear();
        let mut j = start;
        while !seen[j] {
            seen[j] = true;
            orbit.push(j);
            j = (2 * j) % count;
        }
        z.clear();
        z.extend(orbit.iter().map(|&j| pts[j]));
        let mut last = f64::INFINITY;
        for _ in 0..8 {
            let step = cycle_newton_step(&map, &mut z).ok()?;
            if step <= 1e-16 || step >= last {
                break;
            }
            last = step;
        }
        for (&j, w) in orbit.iter().zip(&z) {
            if (w - pts[j]).norm() > POLISH_RADIUS {
                return None;
            }
            out[j] = *w;
        }
    }
    Some(out)
}

/// Doubles the grid resolution of an invariant curve: the new odd samples are
/// pullbacks of existing samples, placed by continuity with their neighbours.
fn refine_curve(gamma: &[Complex64], c: Complex64) -> Vec<Complex64> {
    let m = gamma.len();
    let mut out = Vec::with_capacity(2 * m);
    for i in 0..m {
        out.push(gamma[i]);
        // Angle (2i + 1) / 2M doubles to (2i + 1) / M, which is grid point 2i + 1 of the old grid.
        let w = (gamma[(2 * i + 1) % m] - c).sqrt();
        let left = gamma[i];
        let right = gamma[(i + 1) % m];
        let plus = (w - left).norm() + (w - right).norm();
        let minus = (w + left).norm() + (w + right).norm();
        out.push(if plus <= minus { w } else { -w });
    }
    out
}

fn external_angle_cover(c: Complex64, depth: usize) -> Result<MarkovCover> {
    let grid_log2 = (depth + 3).max(BASE_GRID_LOG2);
    let gamma = boundary_curve(c, grid_log2)?;
    let m = gamma.len();
    let n = 1usize << depth;
    let span = m / n;
    let cells = (0..n)
        .map(|cell| {
            let center = gamma[cell * span + span / 2];
            let mut radius = 0.0f64;
            let mut step = 0.0f64;
            for i in cell * span..=(cell + 1) * span {
                let z = gamma[i % m];
                radius = radius.max((z - center).norm());
                step = step.max((z - gamma[(i + 1) % m]).norm());
            }
            Cell {
                center,
                radius: radius + step,
            }
        })
        .collect();
    let edge_points = periodic_landing_points(c, depth + 1, &gamma)?;
    Ok(from_samples(cells, edge_points, depth, Coding::ExternalAngle))
}

/// The disk radius `r` with `g_a(D(0, r)) ⊂ D(0, r)` for both inverse branches.
pub(crate) fn itinerary_disk_radius(c: Complex64) -> f64 {
    let a = c.norm();
    let beta = (1.0 + (1.0 + 4.0 * a).sqrt()) / 2.0;
    0.5 * (beta + a)
}

fn itinerary_cover(c: Complex64, depth: usize) -> MarkovCover {
    const BOUNDARY: usize = 16;
    let r = itinerary_disk_radius(c);
    let root = (-c).sqrt();
    let branch = |b: usize, z: Complex64| {
        let w = root * (Complex64::new(1.0, 0.0) - z / c).sqrt();
        if b == 0 {
            w
        } else {
            -w
        }
    };
    let y0 = (Complex64::new(1.0, 0.0) + (Complex64::new(1.0, 0.0) - c * 4.0).sqrt()) * 0.5;
    let mut centers = vec![y0];
    let mut rims: Vec<[Complex64; BOUNDARY]> = vec![std::array::from_fn(|t| {
        Complex64::from_polar(r, std::f64::consts::TAU * t as f64 / BOUNDARY as f64)
    })];
    for _ in 0..depth {
        let len = centers.len();
        let mut next_c = Vec::with_capacity(2 * len);
        let mut next_r = Vec::with_capacity(2 * len);
        for b in 0..2 {
            for m in 0..len {
                next_c.push(branch(b, centers[m]));
                next_r.push(rims[m].map(|z| branch(b, z)));
            }
        }
        centers = next_c;
        rims = next_r;
    }
    let cells = centers
        .iter()
        .zip(&rims)
        .map(|(&center, rim)| Cell {
            center,
            radius: rim.iter().map(|z| (z - center).norm()).fold(0.0, f64::max),
        })
        .collect();
    let len = centers.len();
    let mut edge_points = Vec::with_capacity(2 * len);
    for b in 0..2 {
        for &z in &centers {
            edge_points.push(branch(b, z));
        }
    }
    from_samples(cells, edge_points, depth, Coding::Itinerary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycles::periodic_cycles;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn circle_cover_has_binary_structure() {
        let cover = build_markov_cover(&PolyMap::quadratic(c(0.0, 0.0)), 3).unwrap();
        assert_eq!(cover.len(), 8);
        assert_eq!(cover.coding(), Coding::ExternalAngle);
        for (i, row) in cover.adjacency().iter().enumerate() {
            assert_eq!(row.iter().map(|&x| x as usize).sum::<usize>(), 2, "row {i}");
        }
        for cell in cover.cells() {
            assert!((cell.center.norm() - 1.0).abs() < 1e-12);
        }
        for i in 0..8 {
            for d in cover.edge_derivatives(i) {
                assert!((d - 2.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cantor_cover_is_full_shift() {
        let cover = build_markov_cover(&PolyMap::quadratic(c(-6.0, 0.0)), 5).unwrap();
        assert_eq!(cover.len(), 32);
        assert_eq!(cover.coding(), Coding::Itinerary);
        let adj = cover.adjacency();
        for (i, row) in adj.iter().enumerate() {
            let targets: Vec<usize> = (0..32).filter(|&j| row[j] == 1).collect();
            assert_eq!(targets, vec![(2 * i) % 32, (2 * i + 1) % 32]);
        }
        // Cells are tiny and pairwise disjoint at this depth.
        for a in 0..32 {
            for b in a + 1..32 {
                let (x, y) = (cover.cells()[a], cover.cells()[b]);
                assert!((x.center - y.center).norm() > x.radius + y.radius);
            }
        }
    }

    #[test]
    fn depth_one_circle_cover_contains_critical_value() {
        let err = build_markov_cover(&PolyMap::quadratic(c(0.0, 0.0)), 1).unwrap_err();
        assert!(matches!(err, Error::CoverCrossesCriticalValue { depth: 1 }));
    }

    #[test]
    fn periodic_points_are_covered() {
        for cc in [c(-1.0, 0.0), c(0.1, 0.0), c(-6.0, 0.0), c(-1.0, 0.1)] {
            let f = PolyMap::quadratic(cc);
            let cover = build_markov_cover(&f, 8).unwrap();
            for n in 1..=6 {
                for cyc in periodic_cycles(&f, n, true).unwrap() {
                    for &z in cyc.points() {
                        assert!(cover.covers(z), "c={cc} n={n} z={z}");
                    }
                }
            }
        }
    }

    #[test]
    fn radii_shrink_with_depth() {
        // Angle-coded cells contract slowly near the pinch points of the basilica.
        for cc in [c(-1.0, 0.0), c(-6.0, 0.0)] {
            let f = PolyMap::quadratic(cc);
            let coarse = build_markov_cover(&f, 5).unwrap();
            let fine = build_markov_cover(&f, 11).unwrap();
            let max = |cv: &MarkovCover| cv.cells().iter().map(|x| x.radius).fold(0.0, f64::max);
            assert!(max(&fine) < 0.5 * max(&coarse));
        }
    }

    #[test]
    fn rejects_out_of_family_and_bad_depth() {
        let cubic = PolyMap::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(build_markov_cover(&cubic, 3).is_err());
        assert!(build_markov_cover(&PolyMap::quadratic(c(0.0, 0.0)), 0).is_err());
        assert!(build_markov_cover(&PolyMap::quadratic(c(0.0, 0.0)), 17).is_err());
        assert!(matches!(
            build_markov_cover(&PolyMap::quadratic(c(0.5, 0.0)), 4),
            Err(Error::Regime(_))
        ));
    }
}
