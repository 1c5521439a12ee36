//! Growth of harmonic functions and real polynomials from small sets.

use std::f64::consts::{E, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{circle_sup, precondition, uniform_in_disc, CheckResult, LabError};
use crate::poly::{Poly, C64};

/// Relative slack on sampled "strictly less than" preconditions; suprema over
/// open discs are not attained, so equality at a sample point is admitted.
const SUP_SLACK: f64 = 1e-12;

/// `sup |Re P|` on `|z| = radius`, which is the supremum over the closed disc.
pub fn harmonic_sup(p: &Poly, radius: f64) -> (f64, C64) {
    circle_sup(&|z: C64| p.eval(z).re.abs(), radius)
}

/// Largest `τ` with `sup_{|z|<r} |Re P| ≤ r^τ`.
pub fn fitted_tau(p: &Poly, r: f64) -> f64 {
    harmonic_sup(p, r).0.ln() / r.ln()
}

/// Three circles: `|u| < 1` on the disc and `|u| < r^τ` on `|z| < r` give
/// `|u| < 2(2R)^τ` on `|z| < R`, for `u = Re P` and `0 < r < R < 1/2`.
pub fn three_circles_margin(p: &Poly, r: f64, big_r: f64, tau: f64) -> Result<CheckResult, LabError> {
    if !(r > 0.0 && r < big_r && big_r < 0.5) {
        return precondition(format!("need 0 < r < R < 1/2, got r = {r}, R = {big_r}"));
    }
    if !(tau > 0.0 && tau.is_finite()) {
        return precondition(format!("τ = {tau} is not positive"));
    }
    let (outer, at) = harmonic_sup(p, 1.0);
    if !(outer < 1.0) {
        return precondition(format!("|u| reaches {outer} on the unit circle at {at}"));
    }
    let (small, at) = harmonic_sup(p, r);
    if !(small <= r.powf(tau) * (1.0 + SUP_SLACK)) {
        return precondition(format!("|u| reaches {small} > r^τ = {} at {at}", r.powf(tau)));
    }
    let (attained, witness) = harmonic_sup(p, big_r);
    let bound = 2.0 * (2.0 * big_r).powf(tau);
    Ok(CheckResult::linear("three_circles", bound, attained)
        .with_witness(witness)
        .with_instance(format!("degree {} harmonic polynomial, r = {r}, R = {big_r}, τ = {tau}", p.degree()))
        .with_samples(3 * super::CIRCLE_SUP_POINTS as u64))
}

/// A real polynomial `Σ c x^i y^j` on the plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealPoly2 {
    /// `(i, j, c)` triples.
    pub terms: Vec<(u32, u32, f64)>,
}

impl RealPoly2 {
    pub fn eval(&self, z: C64) -> f64 {
        self.terms
            .iter()
            .map(|&(i, j, c)| c * z.re.powi(i as i32) * z.im.powi(j as i32))
            .sum()
    }

    /// Total degree; zero for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.iter().filter(|t| t.2 != 0.0).map(|t| t.0 + t.1).max().unwrap_or(0)
    }
}

/// `P` on the disc `D`, small on the sub-disc `U ⊂ D`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemezInstance {
    pub poly: RealPoly2,
    pub center: [f64; 2],
    pub radius: f64,
    pub subset_center: [f64; 2],
    pub subset_radius: f64,
    /// The smallness threshold on `U`; the sampled maximum when absent.
    #[serde(default)]
    pub eps: Option<f64>,
}

fn c64(v: [f64; 2]) -> C64 {
    C64::new(v[0], v[1])
}

/// Maximum of `|P|` on the closed disc: polar grid, then a shrinking pattern
/// search from the best grid point.
pub fn disc_sup(p: &RealPoly2, center: C64, radius: f64) -> (f64, C64) {
    let g = |z: C64| p.eval(z).abs();
    let (mut best, mut at) = (g(center), center);
    let rings = 128;
    let spokes = 512;
    for i in 1..=rings {
        let rho = radius * i as f64 / rings as f64;
        for k in 0..spokes {
            let z = center + C64::from_polar(rho, TAU * k as f64 / spokes as f64);
            let v = g(z);
            if v > best {
                best = v;
                at = z;
            }
        }
    }
    let clamp = |z: C64| {
        let d = z - center;
        if d.norm() > radius { center + d * (radius / d.norm()) } else { z }
    };
    let mut h = radius / rings as f64;
    while h > radius * 1e-13 {
        let mut moved = false;
        for dir in [C64::new(1.0, 0.0), C64::new(-1.0, 0.0), C64::new(0.0, 1.0), C64::new(0.0, -1.0)] {
            let z = clamp(at + dir * h);
            let v = g(z);
            if v > best {
                best = v;
                at = z;
                moved = true;
            }
        }
        if !moved {
            h *= 0.5;
        }
    }
    (best, at)
}

/// Remez: `|P| < ε` on `U` with `area(U) = α · area(D)` gives
/// `|P| < ε (e/2α)^deg` on `D`.
///
/// `α` is exact for a sub-disc; the uniform sample of `D` checks the
/// smallness hypothesis on its points in `U` and must reproduce `α` within
/// five standard errors.
pub fn remez_margin<R: Rng>(inst: &RemezInstance, samples: usize, rng: &mut R) -> Result<CheckResult, LabError> {
    let center = c64(inst.center);
    let sub = c64(inst.subset_center);
    if !(inst.radius > 0.0 && inst.subset_radius > 0.0) {
        return precondition("disc radii must be positive");
    }
    if (sub - center).norm() + inst.subset_radius > inst.radius * (1.0 + 1e-15) {
        return precondition("U is not contained in D");
    }
    let alpha = (inst.subset_radius / inst.radius).powi(2);
    let mut inside = 0usize;
    let mut small_sup = 0.0f64;
    let mut sample_sup = (0.0f64, center);
    for _ in 0..samples {
        let z = uniform_in_disc(rng, center, inst.radius);
        let v = inst.poly.eval(z).abs();
        if v > sample_sup.0 {
            sample_sup = (v, z);
        }
        if (z - sub).norm() < inst.subset_radius {
            inside += 1;
            small_sup = small_sup.max(v);
        }
    }
    let sampled = inside as f64 / samples.max(1) as f64;
    let standard_error = (alpha * (1.0 - alpha) / samples.max(1) as f64).sqrt();
    if inside < 100 || (sampled - alpha).abs() > 5.0 * standard_error {
        return Err(LabError::UnstableFraction { sampled, exact: alpha, samples });
    }
    let eps = match inst.eps {
        Some(eps) => {
            if !(small_sup <= eps) {
                return precondition(format!("|P| reaches {small_sup} ≥ ε = {eps} on U"));
            }
            eps
        }
        None => small_sup,
    };
    let (mut attained, mut witness) = disc_sup(&inst.poly, center, inst.radius);
    if sample_sup.0 > attained {
        (attained, witness) = sample_sup;
    }
    let degree = inst.poly.degree();
    let bound = eps * (E / (2.0 * alpha)).powi(degree as i32);
    Ok(CheckResult::linear("remez", bound, attained)
        .with_witness(witness)
        .with_instance(format!("degree {degree}, α = {alpha}, ε = {eps}"))
        .with_samples(samples as u64))
}
