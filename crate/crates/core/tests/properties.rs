//! Randomised and sweep checks of the toolkit's invariants.

use juliathermo::cycles::{continue_cycle, multiplier_derivative, multiplier_derivative_fd, periodic_cycles};
use juliathermo::metric::{complex_multiplier_function, multiplier_function};
use juliathermo::poly::PolyMap;
use juliathermo::scan::{detect_local_maxima, CellClass, ScanCell, ScanGrid};
use juliathermo::stats::census;
use juliathermo::thermo::{
    bowen_root, build_markov_cover, equilibrium_orbit_measure, pressure_matrix, pressure_orbits, OrbitMeasure,
};
use juliathermo::Complex64;
use proptest::prelude::*;

/// A point of the main cardioid, `c = μ/2 - μ²/4` with `|μ| = r < 1`.
fn cardioid(r: f64, t: f64) -> Complex64 {
    let mu = Complex64::from_polar(r, t);
    mu / 2.0 - mu * mu / 4.0
}

fn quick() -> ProptestConfig {
    ProptestConfig {
        cases: 12,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(quick())]

    #[test]
    fn cycles_close_and_multipliers_are_products(r in 0.0f64..0.9, t in 0.0f64..6.283, n in 1usize..=8) {
        let map = PolyMap::quadratic(cardioid(r, t));
        for cyc in periodic_cycles(&map, n, false).unwrap() {
            prop_assert!(cyc.closure_residual(&map) <= 1e-10);
            let product: Complex64 = cyc.points().iter().map(|&z| map.derivative(z)).product();
            prop_assert!((cyc.multiplier() - product).norm() <= 1e-10 * cyc.multiplier().norm().max(1e-300));
        }
    }

    #[test]
    fn continuation_round_trip(r in 0.0f64..0.8, t in 0.0f64..6.283, n in 1usize..=6, dr in -0.05f64..0.05, dt in -0.05f64..0.05) {
        let c0 = cardioid(r, t);
        let c1 = c0 + Complex64::new(dr, dt);
        let map = PolyMap::quadratic(c0);
        for cyc in periodic_cycles(&map, n, true).unwrap() {
            let there = continue_cycle(&cyc, c0, c1, 8).unwrap();
            let back = continue_cycle(&there, c1, c0, 8).unwrap();
            for (a, b) in cyc.points().iter().zip(back.points()) {
                prop_assert!((a - b).norm() <= 1e-9);
            }
        }
    }

    #[test]
    fn implicit_multiplier_derivative_matches_differences(r in 0.0f64..0.8, t in 0.0f64..6.283, n in 1usize..=8, pick in 0usize..1000) {
        let c0 = cardioid(r, t);
        let cycles = periodic_cycles(&PolyMap::quadratic(c0), n, true).unwrap();
        let cyc = &cycles[pick % cycles.len()];
        let implicit = multiplier_derivative(c0, cyc).unwrap();
        let h = 1e-4 / n as f64;
        let fd = multiplier_derivative_fd(c0, cyc, h).unwrap();
        let fd2 = multiplier_derivative_fd(c0, cyc, h / 2.0).unwrap();
        let extrapolated = (fd2 * 4.0 - fd) / 3.0;
        prop_assert!((extrapolated - implicit).norm() <= 1e-6 * implicit.norm());
    }

    #[test]
    fn equilibrium_measures_are_normalised(r in 0.0f64..0.9, t in 0.0f64..6.283, s in 0.2f64..1.8, n in 2usize..=8) {
        let map = PolyMap::quadratic(cardioid(r, t));
        let m = equilibrium_orbit_measure(&map, s, n).unwrap();
        prop_assert!((m.total_weight() - 1.0).abs() <= 1e-12);
        prop_assert!(m.atoms().iter().all(|a| a.weight > 0.0));
    }

    #[test]
    fn pressure_is_decreasing(r in 0.0f64..0.6, t in 0.0f64..6.283) {
        let cover = build_markov_cover(&PolyMap::quadratic(cardioid(r, t)), 8).unwrap();
        let values: Vec<f64> = (0..9).map(|i| pressure_matrix(&cover, 0.25 * i as f64).unwrap()).collect();
        prop_assert!(values.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn multiplier_function_is_real_part(dx in -0.04f64..0.04, dy in -0.04f64..0.04) {
        let c0 = Complex64::new(-1.0, 0.05);
        let m = equilibrium_orbit_measure(&PolyMap::quadratic(c0), 1.27, 6).unwrap();
        let c = c0 + Complex64::new(dx, dy);
        let real = multiplier_function(&m, c).unwrap();
        prop_assert!((complex_multiplier_function(&m, c).unwrap().re - real).abs() <= 1e-12);
    }

    #[test]
    fn count_below_is_monotone(t1 in 1.0f64..300.0, t2 in 1.0f64..300.0) {
        let cen = census(&PolyMap::quadratic(Complex64::new(-0.2, 0.3)), 6).unwrap();
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        prop_assert!(cen.count_below(lo) <= cen.count_below(hi));
        prop_assert_eq!(cen.count_below(1e12), cen.entries().len());
    }

    #[test]
    fn detector_finds_exactly_the_spike(nx in 3usize..9, ny in 3usize..9, px in 0usize..100, py in 0usize..100, excess in 2.01f64..50.0, level in 0.5f64..1.9) {
        let tol = 1e-3;
        let (sx, sy) = (1 + px % (nx - 2), 1 + py % (ny - 2));
        let cells = (0..nx * ny)
            .map(|i| ScanCell {
                c: Complex64::new((i % nx) as f64, (i / nx) as f64),
                class: CellClass::Attracting(2),
                delta: Some(if (i % nx, i / nx) == (sx, sy) { level + excess * tol } else { level }),
                flags: vec![],
            })
            .collect();
        let mut grid = ScanGrid { rect: (0.0, 1.0, 0.0, 1.0), nx, ny, cells, tol, include_shift_locus: false };
        prop_assert_eq!(detect_local_maxima(&grid), vec![sy * nx + sx]);
        grid.cells[sy * nx + sx].delta = Some(level);
        prop_assert!(detect_local_maxima(&grid).is_empty());
    }
}

#[test]
fn census_matches_cycle_enumeration() {
    let map = PolyMap::quadratic(Complex64::new(-0.12, 0.75));
    let cen = census(&map, 7).unwrap();
    for n in 1..=7 {
        let listed = cen.entries().iter().filter(|e| e.period == n).count();
        assert_eq!(listed, periodic_cycles(&map, n, true).unwrap().len(), "period {n}");
    }
}

/// Pairs `(c, s)` where the two estimators are known to differ by more than 5e-3.
/// At the basilica's Bowen root the horizon-12 orbit sum is still 6.7e-3 above
/// the depth-16 matrix value: the pinch point α (multiplier 1 - √5) makes the
/// orbit pressure alternate with the parity of n.
const KNOWN_EXCEEDANCES: &[(f64, &str)] = &[(-1.0, "delta")];

#[test]
fn matrix_and_orbit_pressures_agree() {
    let mut exceed = Vec::new();
    for c in [0.0, -1.0, -6.0] {
        let map = PolyMap::quadratic(Complex64::new(c, 0.0));
        let cover = build_markov_cover(&map, 10).unwrap();
        let delta = bowen_root(&cover, 1e-10).unwrap();
        for (s, label) in [(0.0, "0"), (0.5, "0.5"), (delta, "delta"), (1.5, "1.5")] {
            let matrix = pressure_matrix(&cover, s).unwrap();
            let orbits = pressure_orbits(&map, s, 12).unwrap().value;
            let diff = (matrix - orbits).abs();
            println!("c = {c:5}, s = {label:5}: matrix {matrix:+.6}, orbits {orbits:+.6}, |diff| {diff:.2e}");
            if diff > 5e-3 {
                exceed.push((c, label));
            }
        }
    }
    assert_eq!(exceed, KNOWN_EXCEEDANCES);
}

#[test]
fn multiplier_function_converges_in_horizon() {
    // Horizons of one parity: for the basilica even and odd n approach the limit from opposite sides.
    let cases = [
        ((0.1, 0.0), (0.12, 0.02), 1.0044, vec![3, 5, 7, 9, 11, 13]),
        ((-1.0, 0.0), (-1.02, 0.0), 1.27, vec![6, 8, 10, 12]),
        ((-1.0, 0.0), (-1.02, 0.0), 1.27, vec![7, 9, 11, 13]),
    ];
    for ((b0, b1), (c0, c1), delta, horizons) in cases {
        let map = PolyMap::quadratic(Complex64::new(b0, b1));
        let c = Complex64::new(c0, c1);
        let values: Vec<f64> = horizons
            .iter()
            .map(|&n| {
                let m: OrbitMeasure = equilibrium_orbit_measure(&map, delta, n).unwrap();
                multiplier_function(&m, c).unwrap()
            })
            .collect();
        let steps: Vec<f64> = values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        assert!(steps.windows(2).all(|w| w[1] < w[0]), "base {b0}{b1:+}i: {values:?}");
    }
}
