//! Dense univariate complex polynomials.
//!
//! Coefficients are stored in ascending degree. Only what the curve and lab
//! code needs is here: Horner evaluation with the derivative, exact
//! differentiation by coefficient shift, Aberth root finding, and an
//! argument-principle zero count on a circle.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::pairwise_sum;

pub type C64 = Complex64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("polynomial vanishes (|p| = {min_modulus:e}) on the circle |z| = {radius}")]
    ZeroOnCircle { radius: f64, min_modulus: f64 },
    #[error("argument integral {value} on |z| = {radius} is not within 0.25 of an integer")]
    WindingNotInteger { radius: f64, value: f64 },
    #[error("root iteration did not converge for a degree {degree} polynomial")]
    RootsDiverged { degree: usize },
}

#[derive(Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct Poly {
    coeffs: Vec<C64>,
}

impl From<Vec<[f64; 2]>> for Poly {
    fn from(raw: Vec<[f64; 2]>) -> Self {
        Poly::new(raw.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

impl From<Poly> for Vec<[f64; 2]> {
    fn from(p: Poly) -> Self {
        p.coeffs.iter().map(|c| [c.re, c.im]).collect()
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coeffs.iter()).finish()
    }
}

impl Poly {
    /// Builds a polynomial, trimming trailing zero coefficients.
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.last().is_some_and(|c| *c == C64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: C64) -> Self {
        Poly::new(vec![c])
    }

    /// `c * z^k`
    pub fn monomial(c: C64, k: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); k + 1];
        coeffs[k] = c;
        Poly::new(coeffs)
    }

    /// The linear polynomial `z - root`.
    pub fn linear_factor(root: C64) -> Self {
        Poly::new(vec![-root, C64::new(1.0, 0.0)])
    }

    pub fn from_roots(leading: C64, roots: &[C64]) -> Self {
        roots
            .iter()
            .fold(Poly::constant(leading), |acc, &r| acc.mul(&Poly::linear_factor(r)))
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as degree 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Returns `(p(z), p'(z))` in one Horner pass.
    pub fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let zero = C64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let zero = C64::new(0.0, 0.0);
        Poly::new(
            (0..len)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(zero)
                        + other.coeffs.get(k).copied().unwrap_or(zero)
                })
                .collect(),
        )
    }

    pub fn scale(&self, s: C64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn pow(&self, k: u32) -> Poly {
        (0..k).fold(Poly::constant(C64::new(1.0, 0.0)), |acc, _| acc.mul(self))
    }

    /// `z ↦ p(s z)`.
    pub fn rescale_argument(&self, s: C64) -> Poly {
        let mut factor = C64::new(1.0, 0.0);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for &c in &self.coeffs {
            out.push(c * factor);
            factor *= s;
        }
        Poly::new(out)
    }

    /// Largest coefficient modulus; the scale used for "numerically zero" tests.
    pub fn coefficient_scale(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// All complex roots with multiplicity (Aberth–Ehrlich iteration).
    pub fn roots(&self) -> Result<Vec<C64>, PolyError> {
        let degree = self.degree();
        if self.is_zero() || degree == 0 {
            return Ok(Vec::new());
        }
        // Roots at the origin are peeled off exactly.
        let lowest = self.coeffs.iter().position(|c| c.norm() > 0.0).unwrap_or(0);
        let mut roots = vec![C64::new(0.0, 0.0); lowest];
        let reduced = Poly::new(self.coeffs[lowest..].to_vec());
        let d = reduced.degree();
        if d == 0 {
            return Ok(roots);
        }
        let lead = reduced.coeffs[d];
        let monic: Vec<C64> = reduced.coeffs.iter().map(|&c| c / lead).collect();
        let monic = Poly { coeffs: monic };
        if d == 1 {
            roots.push(-monic.coeffs[0]);
            return Ok(roots);
        }

        // Cauchy bound for the initial circle, offset angle breaks symmetry.
        let bound = 1.0
            + monic.coeffs[..d]
                .iter()
                .map(|c| c.norm())
                .fold(0.0, f64::max);
        let start_radius = bound.min(
            monic.coeffs[0].norm().powf(1.0 / d as f64).max(1e-3),
        );
        let mut z: Vec<C64> = (0..d)
            .map(|k| C64::from_polar(start_radius, TAU * k as f64 / d as f64 + 0.4))
            .collect();

        let mut converged = false;
        for _ in 0..500 {
            let mut max_step = 0.0f64;
            for i in 0..d {
                let (p, dp) = monic.eval_with_derivative(z[i]);
                if p.norm() == 0.0 {
                    continue;
                }
                let ratio = p / dp;
                let mut repulsion = C64::new(0.0, 0.0);
                for j in 0..d {
                    if j != i {
                        let diff = z[i] - z[j];
                        if diff.norm() > 0.0 {
                            repulsion += diff.inv();
                        }
                    }
                }
                let step = ratio / (C64::new(1.0, 0.0) - ratio * repulsion);
                if step.is_finite() {
                    z[i] -= step;
                    max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
                }
            }
            if max_step < 1e-15 {
                converged = true;
                break;
            }
        }
        if !converged && z.iter().any(|r| !r.is_finite()) {
            return Err(PolyError::RootsDiverged { degree: d });
        }
        roots.extend(z);
        Ok(roots)
    }

    /// Number of zeros inside `|z| < radius`, by integrating `p'/p` around the circle.
    ///
    /// The trapezoid rule is doubled until two successive estimates agree; the
    /// result must then lie within 0.25 of an integer.
    pub fn zero_count_in_disc(&self, radius: f64) -> Result<usize, PolyError> {
        let deriv = self.derivative();
        let scale = self.coefficient_scale() * (1.0 + radius).powi(self.degree() as i32);
        let mut n = 256usize;
        let mut previous: Option<f64> = None;
        loop {
            let mut terms = Vec::with_capacity(n);
            let mut min_modulus = f64::INFINITY;
            for k in 0..n {
                let z = C64::from_polar(radius, TAU * k as f64 / n as f64);
                let p = self.eval(z);
                min_modulus = min_modulus.min(p.norm());
                terms.push((z * deriv.eval(z) / p).re);
            }
            if self.is_zero() || min_modulus <= 1e-13 * scale {
                return Err(PolyError::ZeroOnCircle { radius, min_modulus });
            }
            let value = pairwise_sum(&terms) / n as f64;
            if let Some(prev) = previous {
                if (value - prev).abs() < 1e-8 || n >= 1 << 18 {
                    let nearest = value.round();
                    if (value - nearest).abs() >= 0.25 || nearest < 0.0 {
                        return Err(PolyError::WindingNotInteger { radius, value });
                    }
                    return Ok(nearest as usize);
                }
            }
            previous = Some(value);
            n *= 2;
        }
    }

    /// True iff `p` has no zero on the closed disc `|z| <= radius`.
    pub fn is_zero_free_on_disc(&self, radius: f64) -> Result<bool, PolyError> {
        Ok(self.zero_count_in_disc(radius)? == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn horner_and_derivative() {
        // 1 + 2z + 3z^2
        let p = Poly::from_real(&[1.0, 2.0, 3.0]);
        let z = c(0.5, -0.25);
        let (v, dv) = p.eval_with_derivative(z);
        assert!((v - (1.0 + 2.0 * z + 3.0 * z * z)).norm() < 1e-15);
        assert!((dv - (2.0 + 6.0 * z)).norm() < 1e-15);
        assert_eq!(p.derivative(), Poly::from_real(&[2.0, 6.0]));
    }

    #[test]
    fn trailing_zeros_trimmed() {
        let p = Poly::from_real(&[1.0, 0.0, 0.0]);
        assert_eq!(p.degree(), 0);
        assert!(Poly::from_real(&[0.0]).is_zero());
    }

    #[test]
    fn roots_recover_known_factors() {
        let expected = [c(0.3, 0.1), c(-0.7, 0.2), c(2.0, -1.0), c(0.0, 0.0)];
        let p = Poly::from_roots(c(1.5, 0.5), &expected);
        let mut found = p.roots().unwrap();
        assert_eq!(found.len(), 4);
        for r in expected {
            let (idx, dist) = found
                .iter()
                .enumerate()
                .map(|(i, f)| (i, (f - r).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(dist < 1e-10, "root {r} missed by {dist}");
            found.remove(idx);
        }
    }

    #[test]
    fn winding_counts_zeros_inside() {
        let p = Poly::from_roots(c(1.0, 0.0), &[c(0.1, 0.0), c(0.5, 0.5), c(3.0, 0.0)]);
        assert_eq!(p.zero_count_in_disc(1.0).unwrap(), 2);
        assert_eq!(p.zero_count_in_disc(0.2).unwrap(), 1);
        assert_eq!(p.zero_count_in_disc(0.05).unwrap(), 0);
        assert!(!p.is_zero_free_on_disc(1.0).unwrap());
    }

    #[test]
    fn zero_on_circle_is_an_error() {
        let p = Poly::linear_factor(c(1.0, 0.0));
        assert!(matches!(
            p.zero_count_in_disc(1.0),
            Err(PolyError::ZeroOnCircle { .. })
        ));
    }

    #[test]
    fn rescaled_argument() {
        let p = Poly::from_real(&[1.0, 1.0, 1.0]);
        let q = p.rescale_argument(c(0.5, 0.0));
        assert_eq!(q, Poly::from_real(&[1.0, 0.5, 0.25]));
    }
}
