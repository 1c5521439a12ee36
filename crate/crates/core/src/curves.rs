//! Holomorphic curves from the disc into `P^n` with polynomial coordinates.
//!
//! The Fubini–Study derivative `f#` is available through three algebraically
//! different routes that must agree:
//!
//! * pair sum: `Σ_{j<k} |f_j f_k' − f_k f_j'|² / ‖f‖⁴`
//! * wedge norm via Lagrange's identity: `(‖f‖²‖f'‖² − |⟨f', f⟩|²) / ‖f‖⁴`
//! * logarithmic derivatives: `Σ_{j,k} |f_j|²|f_k|² conj(f_j'/f_j)(f_j'/f_j − f_k'/f_k) / ‖f‖⁴`
//!
//! and a fourth, `∂²/∂z∂z̄ log ‖f‖²`, is checked by finite differences.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Hyperplane;
use crate::poly::{Poly, PolyError, C64};
use crate::quadrature::{self, disc_integral, richardson, Estimate, QuadratureError};

/// Absolute tolerance of area quadratures.
pub const AREA_TOL: f64 = 1e-8;
/// Relative agreement required between the pair-sum and wedge-norm routes.
pub const FORMULA_AGREEMENT: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("a curve needs at least two coordinate functions")]
    TooFewCoordinates,
    #[error("evaluation radius {0} is outside (0, 1]")]
    BadRadius(f64),
    #[error("coordinates have a common zero at {0}")]
    CommonZero(C64),
    #[error("point {z} lies outside the evaluation disc of radius {radius}")]
    OutsideDisc { z: C64, radius: f64 },
    #[error("curve has {found} coordinates but the hyperplanes live in P^{dimension}")]
    DimensionMismatch { dimension: usize, found: usize },
    #[error("expected {expected} hyperplanes, got {found}")]
    SubsetSize { expected: usize, found: usize },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("formula routes disagree at {z}: pair sum {pair_sum:e}, wedge norm {wedge:e}")]
    FormulaMismatch { z: C64, pair_sum: f64, wedge: f64 },
    #[error("invalid curve parameter: {0}")]
    Parameter(String),
}

/// `f = [f_0 : … : f_n]` on `|z| ≤ eval_radius`.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    coordinates: Vec<Poly>,
    derivatives: Vec<Poly>,
    eval_radius: f64,
}

/// The four formula values of `(f#)²` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityForms {
    pub pair_sum: f64,
    pub wedge: f64,
    /// `None` where some coordinate vanishes.
    pub log_derivative: Option<f64>,
}

impl Curve {
    /// Validates radius and the absence of common zeros on the closed disc.
    pub fn new(coordinates: Vec<Poly>, eval_radius: f64) -> Result<Self, CurveError> {
        if coordinates.len() < 2 {
            return Err(CurveError::TooFewCoordinates);
        }
        if !(eval_radius > 0.0 && eval_radius <= 1.0) {
            return Err(CurveError::BadRadius(eval_radius));
        }
        let curve = Curve {
            derivatives: coordinates.iter().map(Poly::derivative).collect(),
            coordinates,
            eval_radius,
        };
        curve.check_no_common_zero()?;
        Ok(curve)
    }

    fn check_no_common_zero(&self) -> Result<(), CurveError> {
        let nonzero: Vec<&Poly> = self.coordinates.iter().filter(|p| !p.is_zero()).collect();
        let Some(pivot) = nonzero.iter().min_by_key(|p| p.degree()) else {
            return Err(CurveError::CommonZero(C64::new(0.0, 0.0)));
        };
        for root in pivot.roots()? {
            if root.norm() > self.eval_radius + 1e-9 {
                continue;
            }
            let norm_sq = self.norm_sq(root);
            let scale: f64 = self
                .coordinates
                .iter()
                .map(|p| p.coefficient_scale().powi(2))
                .sum();
            if norm_sq <= 1e-20 * scale {
                return Err(CurveError::CommonZero(root));
            }
        }
        Ok(())
    }

    pub fn coordinates(&self) -> &[Poly] {
        &self.coordinates
    }

    /// `n`, the dimension of the target projective space.
    pub fn dimension(&self) -> usize {
        self.coordinates.len() - 1
    }

    pub fn eval_radius(&self) -> f64 {
        self.eval_radius
    }

    pub fn with_eval_radius(&self, radius: f64) -> Result<Curve, CurveError> {
        Curve::new(self.coordinates.clone(), radius)
    }

    /// `z ↦ f(s z)` viewed on the unit disc; requires `0 < s ≤ eval_radius`.
    pub fn rescaled(&self, s: f64) -> Result<Curve, CurveError> {
        if !(s > 0.0 && s <= self.eval_radius) {
            return Err(CurveError::BadRadius(s));
        }
        let factor = C64::new(s, 0.0);
        Curve::new(
            self.coordinates.iter().map(|p| p.rescale_argument(factor)).collect(),
            1.0,
        )
    }

    pub fn eval(&self, z: C64) -> Vec<C64> {
        self.coordinates.iter().map(|p| p.eval(z)).collect()
    }

    fn eval_pair(&self, z: C64) -> (Vec<C64>, Vec<C64>) {
        (
            self.coordinates.iter().map(|p| p.eval(z)).collect(),
            self.derivatives.iter().map(|p| p.eval(z)).collect(),
        )
    }

    /// `‖f(z)‖²`.
    pub fn norm_sq(&self, z: C64) -> f64 {
        self.coordinates.iter().map(|p| p.eval(z).norm_sqr()).sum()
    }

    fn check_point(&self, z: C64) -> Result<(), CurveError> {
        if z.norm() > self.eval_radius * (1.0 + 1e-12) {
            return Err(CurveError::OutsideDisc { z, radius: self.eval_radius });
        }
        Ok(())
    }

    /// `(f#)²` by the pair sum, without domain checks.
    pub fn fs_density(&self, z: C64) -> f64 {
        let (f, df) = self.eval_pair(z);
        let norm_sq: f64 = f.iter().map(|x| x.norm_sqr()).sum();
        let mut numerator = 0.0;
        for j in 0..f.len() {
            for k in (j + 1)..f.len() {
                numerator += (f[j] * df[k] - f[k] * df[j]).norm_sqr();
            }
        }
        numerator / (norm_sq * norm_sq)
    }

    /// All formula routes for `(f#)²` at `z`.
    pub fn density_forms(&self, z: C64) -> DensityForms {
        let (f, df) = self.eval_pair(z);
        let norm_sq: f64 = f.iter().map(|x| x.norm_sqr()).sum();
        let norm4 = norm_sq * norm_sq;

        let mut pair = 0.0;
        for j in 0..f.len() {
            for k in (j + 1)..f.len() {
                pair += (f[j] * df[k] - f[k] * df[j]).norm_sqr();
            }
        }

        let deriv_sq: f64 = df.iter().map(|x| x.norm_sqr()).sum();
        let inner: C64 = df.iter().zip(&f).map(|(d, x)| d * x.conj()).sum();
        let wedge = (norm_sq * deriv_sq - inner.norm_sqr()).max(0.0);

        let log_derivative = if f.iter().all(|x| x.norm() > 0.0) {
            let ratios: Vec<C64> = f.iter().zip(&df).map(|(x, d)| d / x).collect();
            let mut acc = C64::new(0.0, 0.0);
            for j in 0..f.len() {
                for k in 0..f.len() {
                    acc += f[j].norm_sqr()
                        * f[k].norm_sqr()
                        * ratios[j].conj()
                        * (ratios[j] - ratios[k]);
                }
            }
            Some(acc.re / norm4)
        } else {
            None
        };
        DensityForms { pair_sum: pair / norm4, wedge: wedge / norm4, log_derivative }
    }

    /// `(f#)²` as `¼Δ log ‖f‖²` by the five-point stencil with step `h`.
    pub fn fs_density_finite_difference(&self, z: C64, h: f64) -> f64 {
        let u = |w: C64| self.norm_sq(w).ln();
        let laplacian = (u(z + C64::new(h, 0.0))
            + u(z - C64::new(h, 0.0))
            + u(z + C64::new(0.0, h))
            + u(z - C64::new(0.0, h))
            - 4.0 * u(z))
            / (h * h);
        0.25 * laplacian
    }

    /// Fubini–Study derivative `f#(z)`, cross-checked against the wedge-norm route.
    pub fn fs_derivative(&self, z: C64) -> Result<f64, CurveError> {
        self.check_point(z)?;
        let scale: f64 = self.coordinates.iter().map(|p| p.coefficient_scale().powi(2)).sum();
        if self.norm_sq(z) <= 1e-28 * scale {
            return Err(CurveError::CommonZero(z));
        }
        let forms = self.density_forms(z);
        let tol = FORMULA_AGREEMENT * forms.pair_sum.max(1e-300) + 1e-15 * forms.pair_sum.max(forms.wedge).max(1.0) * 0.0;
        if (forms.pair_sum - forms.wedge).abs() > tol.max(4.0 * f64::EPSILON * (1.0 + forms.wedge)) {
            return Err(CurveError::FormulaMismatch { z, pair_sum: forms.pair_sum, wedge: forms.wedge });
        }
        Ok(forms.pair_sum.sqrt())
    }

    /// `σ(radius) = ∫_{|z|<radius} (f#)² dA/π`.
    pub fn fs_area(&self, radius: f64) -> Result<Estimate, CurveError> {
        self.fs_area_with_tol(radius, AREA_TOL)
    }

    pub fn fs_area_with_tol(&self, radius: f64, tol: f64) -> Result<Estimate, CurveError> {
        if !(radius >= 0.0) || radius > self.eval_radius * (1.0 + 1e-12) {
            return Err(CurveError::OutsideDisc { z: C64::new(radius, 0.0), radius: self.eval_radius });
        }
        if radius == 0.0 {
            return Ok(Estimate { value: 0.0, error: 0.0 });
        }
        let density = |z: C64| self.fs_density(z);
        Ok(disc_integral(&density, radius, tol)?)
    }

    /// `σ(1)` by Richardson extrapolation of `σ(1 − 2^{−k})` for `k = 3..=8`.
    pub fn fs_area_extrapolated(&self) -> Result<Estimate, CurveError> {
        if self.eval_radius < 1.0 {
            return Err(CurveError::BadRadius(self.eval_radius));
        }
        let values = (3..=8)
            .map(|k| self.fs_area_with_tol(1.0 - 2f64.powi(-k), 1e-11).map(|e| e.value))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(richardson(&values))
    }

    /// `∫_{a<|z|<b} (f#)² dA/π`.
    pub fn fs_annulus_area(&self, a: f64, b: f64) -> Result<Estimate, CurveError> {
        let density = |z: C64| self.fs_density(z);
        Ok(quadrature::annulus_integral(&density, |_| 1.0, a, b, AREA_TOL)?)
    }

    /// `g_j = H_j(f_0, …, f_n)` for `n+1` hyperplanes.
    pub fn compose_hyperplanes(&self, hyperplanes: &[Hyperplane]) -> Result<Curve, CurveError> {
        let n = self.dimension();
        if hyperplanes.len() != n + 1 {
            return Err(CurveError::SubsetSize { expected: n + 1, found: hyperplanes.len() });
        }
        let coords = hyperplanes
            .iter()
            .map(|h| self.hyperplane_section(h))
            .collect::<Result<Vec<_>, _>>()?;
        Curve::new(coords, self.eval_radius)
    }

    /// The polynomial `H ∘ f = Σ a_k f_k`.
    pub fn hyperplane_section(&self, h: &Hyperplane) -> Result<Poly, CurveError> {
        if h.dimension() != self.dimension() {
            return Err(CurveError::DimensionMismatch {
                dimension: h.dimension(),
                found: self.coordinates.len(),
            });
        }
        Ok(h
            .coeffs()
            .iter()
            .zip(&self.coordinates)
            .fold(Poly::zero(), |acc, (&a, p)| acc.add(&p.scale(a))))
    }

    /// `δ(z) = |H ∘ f(z)| / ‖f(z)‖`, in `[0, 1]` for unit `H`.
    pub fn delta(&self, h: &Hyperplane, z: C64) -> Result<f64, CurveError> {
        self.check_point(z)?;
        let section = self.hyperplane_section(h)?;
        let norm = self.norm_sq(z).sqrt();
        if norm == 0.0 {
            return Err(CurveError::CommonZero(z));
        }
        Ok((section.eval(z).norm() / norm).min(1.0))
    }

    /// Whether `H ∘ f` has no zero on `|z| ≤ eval_radius`.
    pub fn omits(&self, h: &Hyperplane) -> Result<bool, CurveError> {
        let section = self.hyperplane_section(h)?;
        if section.is_zero() {
            return Ok(false);
        }
        Ok(section.is_zero_free_on_disc(self.eval_radius)?)
    }

    /// Maximum of `f#` over a polar grid of the closed disc of `radius`.
    pub fn max_fs_derivative(&self, radius: f64) -> f64 {
        let rings = 32;
        let spokes = 256;
        let mut best = self.fs_density(C64::new(0.0, 0.0));
        for i in 1..=rings {
            let r = radius * i as f64 / rings as f64;
            for k in 0..spokes {
                let z = C64::from_polar(r, TAU * k as f64 / spokes as f64);
                best = best.max(self.fs_density(z));
            }
        }
        best.sqrt()
    }
}

/// Built-in curve families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `[1 : a z]`
    LinearEmbedding {
        #[serde(default = "one")]
        a: [f64; 2],
    },
    /// `[(z+1)^m : (z−1)^m]`, i.e. `((z−1)/(z+1))^m`.
    MoebiusPower { m: u32 },
    /// `[1 : c · Σ_{k≤d} (r z)^k / k!]`, a truncation of `c e^{rz}`.
    ScaledExponential {
        rate: f64,
        degree: usize,
        #[serde(default = "one")]
        scale: [f64; 2],
    },
    /// `[1 : c]`
    Constant { value: [f64; 2] },
}

fn one() -> [f64; 2] {
    [1.0, 0.0]
}

fn c64(v: [f64; 2]) -> C64 {
    C64::new(v[0], v[1])
}

impl Family {
    pub fn coordinates(&self) -> Result<Vec<Poly>, CurveError> {
        let one = C64::new(1.0, 0.0);
        Ok(match self {
            Family::LinearEmbedding { a } => {
                vec![Poly::constant(one), Poly::monomial(c64(*a), 1)]
            }
            Family::MoebiusPower { m } => {
                if *m == 0 {
                    return Err(CurveError::Parameter("m must be positive".into()));
                }
                vec![
                    Poly::linear_factor(-one).pow(*m),
                    Poly::linear_factor(one).pow(*m),
                ]
            }
            Family::ScaledExponential { rate, degree, scale } => {
                let mut coeffs = Vec::with_capacity(degree + 1);
                let mut term = 1.0;
                for k in 0..=*degree {
                    if k > 0 {
                        term *= rate / k as f64;
                    }
                    coeffs.push(c64(*scale) * term);
                }
                vec![Poly::constant(one), Poly::new(coeffs)]
            }
            Family::Constant { value } => vec![Poly::constant(one), Poly::constant(c64(*value))],
        })
    }

    pub fn curve(&self, eval_radius: f64) -> Result<Curve, CurveError> {
        Curve::new(self.coordinates()?, eval_radius)
    }
}

/// JSON description of a curve: explicit coordinates or a family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurveSpec {
    Coordinates {
        coordinates: Vec<Poly>,
        #[serde(default = "unit_radius")]
        eval_radius: f64,
    },
    Family {
        #[serde(flatten)]
        family: Family,
        #[serde(default = "unit_radius")]
        eval_radius: f64,
    },
}

fn unit_radius() -> f64 {
    1.0
}

impl CurveSpec {
    pub fn build(&self) -> Result<Curve, CurveError> {
        match self {
            CurveSpec::Coordinates { coordinates, eval_radius } => {
                Curve::new(coordinates.clone(), *eval_radius)
            }
            CurveSpec::Family { family, eval_radius } => family.curve(*eval_radius),
        }
    }

    pub fn family(family: Family) -> Self {
        CurveSpec::Family { family, eval_radius: 1.0 }
    }
}

/// One row of a radial profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub radius: f64,
    pub max_fs_derivative: f64,
    pub area: f64,
}

/// `(radius, max f#, σ(radius))` for each radius; σ is forced monotone
/// only through the quadrature itself, never clamped.
pub fn profile(curve: &Curve, radii: &[f64]) -> Result<Vec<ProfileRow>, CurveError> {
    radii
        .iter()
        .map(|&r| {
            Ok(ProfileRow {
                radius: r,
                max_fs_derivative: curve.max_fs_derivative(r),
                area: curve.fs_area(r)?.value,
            })
        })
        .collect()
}
