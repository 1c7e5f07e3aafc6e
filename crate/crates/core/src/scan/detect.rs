use super::{CellClass, ScanGrid};

/// Interior cells whose δ beats all eight neighbours by more than twice the
/// per-cell tolerance. A cell is only examined when every neighbour shares its
/// classification and carries a δ; cells next to a class change sit on a
/// component boundary. Escape cells are skipped unless the grid opts in.
///
/// Returns row-major cell indices.
pub fn detect_local_maxima(grid: &ScanGrid) -> Vec<usize> {
    let guard = 2.0 * grid.tol;
    let (nx, ny) = (grid.nx, grid.ny);
    let mut found = Vec::new();
    if nx < 3 || ny < 3 {
        return found;
    }
    for iy in 1..ny - 1 {
        for ix in 1..nx - 1 {
            let centre = grid.cell(ix, iy);
            let Some(d) = centre.delta else { continue };
            if centre.class == CellClass::Escape && !grid.include_shift_locus {
                continue;
            }
            let mut highest = f64::NEG_INFINITY;
            let mut comparable = true;
            for jy in iy - 1..=iy + 1 {
                for jx in ix - 1..=ix + 1 {
                    if (jx, jy) == (ix, iy) {
                        continue;
                    }
                    let n = grid.cell(jx, jy);
                    match n.delta {
                        Some(v) if n.class == centre.class => highest = highest.max(v),
                        _ => comparable = false,
                    }
                }
            }
            if comparable && d - highest > guard {
                found.push(iy * nx + ix);
            }
        }
    }
    found
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scan::ScanCell;
    use num_complex::Complex64;

    fn synthetic(n: usize, class: CellClass, f: impl Fn(usize, usize) -> f64) -> ScanGrid {
        let cells = (0..n * n)
            .map(|i| ScanCell {
                c: Complex64::new((i % n) as f64, (i / n) as f64),
                class,
                delta: Some(f(i % n, i / n)),
                flags: vec![],
            })
            .collect();
        ScanGrid {
            rect: (0.0, 1.0, 0.0, 1.0),
            nx: n,
            ny: n,
            cells,
            tol: 1e-4,
            include_shift_locus: false,
        }
    }

    #[test]
    fn plateau_has_no_maxima() {
        let g = synthetic(7, CellClass::Attracting(2), |_, _| 1.25);
        assert!(detect_local_maxima(&g).is_empty());
    }

    #[test]
    fn spike_is_found() {
        let g = synthetic(7, CellClass::Attracting(2), |x, y| if (x, y) == (3, 4) { 1.25 + 10.0 * 1e-4 } else { 1.25 });
        assert_eq!(detect_local_maxima(&g), vec![4 * 7 + 3]);
    }

    #[test]
    fn spike_below_guard_is_ignored() {
        let g = synthetic(5, CellClass::Central, |x, y| if (x, y) == (2, 2) { 1.0 + 1.5e-4 } else { 1.0 });
        assert!(detect_local_maxima(&g).is_empty());
    }

    #[test]
    fn class_change_excludes_cell() {
        let mut g = synthetic(5, CellClass::Attracting(2), |x, y| if (x, y) == (2, 2) { 2.0 } else { 1.0 });
        g.cells[0].class = CellClass::Attracting(4);
        g.cells[6].class = CellClass::Attracting(4);
        assert!(detect_local_maxima(&g).is_empty());
        g.cells[6].class = CellClass::Attracting(2);
        assert_eq!(detect_local_maxima(&g), vec![12]);
    }

    #[test]
    fn shift_locus_is_opt_in() {
        let mut g = synthetic(3, CellClass::Escape, |x, y| if (x, y) == (1, 1) { 0.6 } else { 0.5 });
        assert!(detect_local_maxima(&g).is_empty());
        g.include_shift_locus = true;
        assert_eq!(detect_local_maxima(&g), vec![4]);
    }
}
