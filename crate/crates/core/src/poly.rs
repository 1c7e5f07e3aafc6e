//! Polynomial maps of the complex plane.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::roots::poly_roots;

/// Modulus beyond which an iterated orbit or derivative is reported as escaped.
pub const OVERFLOW_GUARD: f64 = 1e150;

/// A polynomial map `z -> a_0 + a_1 z + ... + a_d z^d` of degree `d >= 2`.
///
/// Maps built with [`PolyMap::quadratic`] remember their family parameter `c`
/// so that parameter-plane routines (continuation, multiplier derivatives)
/// know which one-parameter family they live in.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyMap {
    coeffs: Vec<Complex64>,
    family_param: Option<Complex64>,
}

impl PolyMap {
    /// Builds a map from coefficients in ascending powers. Trailing zero
    /// coefficients are dropped before the degree check.
    pub fn new(mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("coefficients must be finite".into()));
        }
        while coeffs.last().is_some_and(|c| c.norm() == 0.0) {
            coeffs.pop();
        }
        if coeffs.len() < 3 {
            return Err(Error::InvalidInput(
                "polynomial map must have degree at least 2 with a nonzero leading coefficient".into(),
            ));
        }
        Ok(Self {
            coeffs,
            family_param: None,
        })
    }

    /// The quadratic family member `z^2 + c`.
    pub fn quadratic(c: Complex64) -> Self {
        Self {
            coeffs: vec![c, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            family_param: Some(c),
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// The parameter `c` when this map is `z^2 + c`.
    pub fn family_param(&self) -> Option<Complex64> {
        self.family_param
    }

    /// Like [`PolyMap::family_param`] but an error for maps outside the quadratic family.
    pub fn require_quadratic(&self) -> Result<Complex64> {
        self.family_param.ok_or_else(|| {
            Error::InvalidInput("operation is only defined for the quadratic family z^2 + c".into())
        })
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    /// `(f(z), f'(z))`.
    pub fn eval_d(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &a in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    }

    /// `(f(z), f'(z), f''(z))`.
    pub fn eval_d2(&self, z: Complex64) -> (Complex64, Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let (mut p, mut dp, mut ddp) = (zero, zero, zero);
        for &a in self.coeffs.iter().rev() {
            ddp = ddp * z + dp;
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp, ddp * 2.0)
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        self.eval_d(z).1
    }

    /// Coefficients of `f'` in ascending powers.
    pub fn derivative_coeffs(&self) -> Vec<Complex64> {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, &a)| a * j as f64)
            .collect()
    }

    /// Critical points with multiplicity removed (distinct to 1e-10).
    pub fn critical_points(&self) -> Result<Vec<Complex64>> {
        if self.family_param.is_some() {
            return Ok(vec![Complex64::new(0.0, 0.0)]);
        }
        let dc = self.derivative_coeffs();
        let roots = if dc.len() == 2 {
            vec![-dc[0] / dc[1]]
        } else {
            poly_roots(&dc)?
        };
        let mut distinct: Vec<Complex64> = Vec::new();
        for r in roots {
            if !distinct.iter().any(|q| (q - r).norm() <= 1e-10 * (1.0 + r.norm())) {
                distinct.push(r);
            }
        }
        Ok(distinct)
    }

    pub fn critical_values(&self) -> Result<Vec<Complex64>> {
        Ok(self.critical_points()?.into_iter().map(|z| self.eval(z)).collect())
    }

    /// Radius outside which every orbit escapes to infinity.
    ///
    /// For `z^2 + c` this is `max(2, |c|) + 1`; otherwise a standard bound
    /// from the coefficient moduli.
    pub fn escape_radius(&self) -> f64 {
        if let Some(c) = self.family_param {
            return c.norm().max(2.0) + 1.0;
        }
        let lead = self.coeffs[self.degree()].norm();
        let tail: f64 = self.coeffs[..self.degree()].iter().map(|a| a.norm()).sum();
        let r = (1.0 + tail) / lead;
        r.max(2.0 / lead.powf(1.0 / (self.degree() as f64 - 1.0))).max(2.0) + 1.0
    }

    /// True when the map is affinely conjugate to `z^d`: it has a single
    /// critical point of full multiplicity, and that point is fixed.
    pub fn is_monomial_conjugate(&self) -> bool {
        if let Some(c) = self.family_param {
            return c.norm() <= 1e-14;
        }
        let d = self.degree();
        let a = self.coeffs[d];
        let w = -self.coeffs[d - 1] / (a * d as f64);
        // Expand a (z - w)^d + b and compare every coefficient except the constant.
        let mut binom = 1.0f64;
        let scale: f64 = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for j in (1..=d).rev() {
            if j < d {
                binom = binom * (j + 1) as f64 / (d - j) as f64;
            }
            let expected = a * binom * (-w).powu((d - j) as u32);
            if (expected - self.coeffs[j]).norm() > 1e-12 * scale.max(1.0) {
                return false;
            }
        }
        (self.eval(w) - w).norm() <= 1e-12 * (1.0 + w.norm())
    }

    /// Returns `(f^n(z0), (f^n)'(z0))`, accumulating the derivative by the chain rule.
    ///
    /// An intermediate modulus above [`OVERFLOW_GUARD`] yields [`Error::Escaped`].
    pub fn iterate_with_derivative(&self, z0: Complex64, n: usize) -> Result<(Complex64, Complex64)> {
        let mut z = z0;
        let mut dz = Complex64::new(1.0, 0.0);
        for step in 0..n {
            let (fz, dfz) = self.eval_d(z);
            dz *= dfz;
            z = fz;
            let modulus = z.norm().max(dz.norm());
            if !(modulus <= OVERFLOW_GUARD) {
                return Err(Error::Escaped {
                    step: step + 1,
                    modulus,
                });
            }
        }
        Ok((z, dz))
    }

    /// All solutions of `f(z) = w`, with multiplicity.
    pub fn preimages(&self, w: Complex64) -> Result<Vec<Complex64>> {
        if self.degree() == 2 {
            let (a0, a1, a2) = (self.coeffs[0] - w, self.coeffs[1], self.coeffs[2]);
            return Ok(quadratic_roots(a2, a1, a0).to_vec());
        }
        let mut shifted = self.coeffs.clone();
        shifted[0] -= w;
        poly_roots(&shifted)
    }
}

/// Roots of `a z^2 + b z + c` by the cancellation-free form of the quadratic formula.
pub(crate) fn quadratic_roots(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 2] {
    let disc = (b * b - a * c * 4.0).sqrt();
    let q = if (b.conj() * disc).re >= 0.0 {
        -(b + disc) * 0.5
    } else {
        -(b - disc) * 0.5
    };
    if q.norm() == 0.0 {
        let r = -b / (a * 2.0);
        return [r, r];
    }
    [q / a, c / q]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn iterate_examples() {
        let sq = PolyMap::quadratic(c(0.0, 0.0));
        let (z, dz) = sq.iterate_with_derivative(c(1.0, 0.0), 3).unwrap();
        assert_eq!((z, dz), (c(1.0, 0.0), c(8.0, 0.0)));

        let basilica = PolyMap::quadratic(c(-1.0, 0.0));
        let (z, dz) = basilica.iterate_with_derivative(c(0.0, 0.0), 2).unwrap();
        assert_eq!((z, dz), (c(0.0, 0.0), c(0.0, 0.0)));

        let cheb = PolyMap::quadratic(c(-2.0, 0.0));
        let (z, dz) = cheb.iterate_with_derivative(c(2.0, 0.0), 1).unwrap();
        assert_eq!((z, dz), (c(2.0, 0.0), c(4.0, 0.0)));

        assert_eq!(
            sq.iterate_with_derivative(c(0.3, 0.2), 0).unwrap(),
            (c(0.3, 0.2), c(1.0, 0.0))
        );
    }

    #[test]
    fn escape_is_signalled() {
        let f = PolyMap::quadratic(c(-6.0, 0.0));
        match f.iterate_with_derivative(c(0.0, 0.0), 50) {
            Err(Error::Escaped { step, .. }) => assert!(step > 3 && step < 12),
            other => panic!("expected escape, got {other:?}"),
        }
    }

    #[test]
    fn degree_and_leading_coefficient_checks() {
        assert!(PolyMap::new(vec![c(1.0, 0.0), c(2.0, 0.0)]).is_err());
        assert!(PolyMap::new(vec![c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]).is_err());
        let f = PolyMap::new(vec![c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(f.degree(), 3);
        assert!(PolyMap::new(vec![c(f64::NAN, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn quadratic_family_coefficients() {
        let f = PolyMap::quadratic(c(0.25, -0.5));
        assert_eq!(f.coeffs(), &[c(0.25, -0.5), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(f.escape_radius(), 3.0);
        assert_eq!(PolyMap::quadratic(c(-6.0, 0.0)).escape_radius(), 7.0);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let f = PolyMap::new(vec![c(0.3, 0.1), c(-1.0, 0.5), c(0.0, 0.0), c(2.0, -1.0)]).unwrap();
        let z = c(0.4, -0.7);
        let h = 1e-6;
        let (_, d1, d2) = f.eval_d2(z);
        let fd1 = (f.eval(z + h) - f.eval(z - h)) / (2.0 * h);
        let fd2 = (f.derivative(z + h) - f.derivative(z - h)) / (2.0 * h);
        assert!((d1 - fd1).norm() < 1e-8);
        assert!((d2 - fd2).norm() < 1e-7);
    }

    #[test]
    fn monomial_detection() {
        assert!(PolyMap::quadratic(c(0.0, 0.0)).is_monomial_conjugate());
        assert!(!PolyMap::quadratic(c(-1.0, 0.0)).is_monomial_conjugate());
        // 2 (z - 1)^3 + 1 has its critical point 1 fixed.
        let g = PolyMap::new(vec![c(-1.0, 0.0), c(6.0, 0.0), c(-6.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert!(g.is_monomial_conjugate());
        // Same shape, but the critical point is not fixed.
        let h = PolyMap::new(vec![c(0.0, 0.0), c(6.0, 0.0), c(-6.0, 0.0), c(2.0, 0.0)]).unwrap();
        assert!(!h.is_monomial_conjugate());
    }

    #[test]
    fn preimages_solve_the_equation() {
        let f = PolyMap::new(vec![c(0.1, 0.2), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let w = c(0.5, -0.25);
        let pre = f.preimages(w).unwrap();
        assert_eq!(pre.len(), 3);
        for z in pre {
            assert!((f.eval(z) - w).norm() < 1e-12);
        }
        let q = PolyMap::quadratic(c(-0.75, 0.1));
        for z in q.preimages(w).unwrap() {
            assert!((q.eval(z) - w).norm() < 1e-13);
        }
    }
}
