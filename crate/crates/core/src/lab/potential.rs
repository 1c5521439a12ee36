//! Checks on subharmonic functions: Jensen's formula, its corollary that a
//! unit Riesz mass keeps `v` away from every harmonic `u`, the logarithmic
//! derivative bound and Cartan's exceptional discs.

use std::collections::VecDeque;
use std::f64::consts::{E, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{circle_sup, precondition, CheckResult, LabError, CIRCLE_MEAN_POINTS};
use crate::curves::Curve;
use crate::poly::{Poly, C64};
use crate::quadrature::{annulus_integral, circle_mean};

/// Residuals above this fail the Jensen checks.
pub const JENSEN_TOL: f64 = 1e-7;

fn check_radii(r: f64, big_r: f64) -> Result<(), LabError> {
    if !(r > 0.0 && r < big_r) {
        return precondition(format!("need 0 < r < R, got r = {r}, R = {big_r}"));
    }
    Ok(())
}

/// Both sides of Jensen's formula for `v = log|p|²`.
pub fn jensen_sides_poly(p: &Poly, r: f64, big_r: f64) -> Result<(f64, f64), LabError> {
    check_radii(r, big_r)?;
    if p.is_zero() {
        return precondition("zero polynomial");
    }
    // errors when p vanishes on either circle
    let inside = p.zero_count_in_disc(big_r)?;
    p.zero_count_in_disc(r)?;
    let roots: Vec<C64> = p.roots()?.into_iter().filter(|z| z.norm() < big_r).collect();
    if roots.len() != inside {
        return precondition(format!(
            "root isolation found {} zeros in |z| < {big_r}, the argument principle {inside}",
            roots.len()
        ));
    }
    let lhs = roots.iter().map(|z| (big_r / z.norm().max(r)).ln()).sum::<f64>();
    let v = |z: C64| p.eval(z).norm_sqr().ln();
    let rhs = 0.5 * (circle_mean(&v, big_r, CIRCLE_MEAN_POINTS) - circle_mean(&v, r, CIRCLE_MEAN_POINTS));
    Ok((lhs, rhs))
}

/// Both sides of Jensen's formula for `v = log ‖f‖²`, whose Riesz mass on
/// `|z| ≤ t` is `σ(t)`.
pub fn jensen_sides_curve(f: &Curve, r: f64, big_r: f64) -> Result<(f64, f64), LabError> {
    check_radii(r, big_r)?;
    if big_r > f.eval_radius() {
        return precondition(format!("R = {big_r} exceeds the evaluation radius {}", f.eval_radius()));
    }
    let inner = f.fs_area_with_tol(r, 1e-12)?.value;
    let density = |z: C64| f.fs_density(z);
    // ∫_r^R σ(t) dt/t = σ(r) log(R/r) + ∫_{r<|z|<R} (f#)² log(R/|z|) dA/π
    let ring = annulus_integral(&density, |t| (big_r / t).ln(), r, big_r, 1e-11)?.value;
    let lhs = inner * (big_r / r).ln() + ring;
    let v = |z: C64| f.norm_sq(z).ln();
    let rhs = 0.5 * (circle_mean(&v, big_r, CIRCLE_MEAN_POINTS) - circle_mean(&v, r, CIRCLE_MEAN_POINTS));
    Ok((lhs, rhs))
}

fn jensen_result(name: &str, lhs: f64, rhs: f64) -> CheckResult {
    CheckResult::linear(name, JENSEN_TOL, (lhs - rhs).abs())
}

pub fn jensen_residual_poly(p: &Poly, r: f64, big_r: f64) -> Result<CheckResult, LabError> {
    let (lhs, rhs) = jensen_sides_poly(p, r, big_r)?;
    Ok(jensen_result("jensen_polynomial", lhs, rhs)
        .with_instance(format!("degree {} polynomial, r = {r}, R = {big_r}", p.degree()))
        .with_samples(2 * CIRCLE_MEAN_POINTS as u64))
}

pub fn jensen_residual_curve(f: &Curve, r: f64, big_r: f64) -> Result<CheckResult, LabError> {
    let (lhs, rhs) = jensen_sides_curve(f, r, big_r)?;
    Ok(jensen_result("jensen_curve", lhs, rhs)
        .with_instance(format!("curve into P^{}, r = {r}, R = {big_r}", f.dimension()))
        .with_samples(2 * CIRCLE_MEAN_POINTS as u64))
}

/// The harmonic function compared against `v = log|p|²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HarmonicProxy {
    Zero,
    /// `u = Re P`.
    RealPart { poly: Poly },
    /// Poisson extension of the truncated Fourier series of `v` on `|z| = R`.
    BoundaryFit { terms: usize },
}

impl HarmonicProxy {
    /// `u` as `Re Q` for a polynomial `Q`.
    fn as_poly<V: Fn(C64) -> f64>(&self, v: &V, big_r: f64) -> Poly {
        match self {
            HarmonicProxy::Zero => Poly::zero(),
            HarmonicProxy::RealPart { poly } => poly.clone(),
            HarmonicProxy::BoundaryFit { terms } => {
                let n = CIRCLE_MEAN_POINTS;
                let samples: Vec<(f64, f64)> = (0..n)
                    .map(|k| {
                        let theta = TAU * k as f64 / n as f64;
                        (theta, v(C64::from_polar(big_r, theta)))
                    })
                    .collect();
                let coeffs = (0..=*terms)
                    .map(|k| {
                        let c: C64 = samples
                            .iter()
                            .map(|&(theta, value)| value * C64::from_polar(1.0, -(k as f64) * theta))
                            .sum::<C64>()
                            / n as f64;
                        let weight = if k == 0 { 1.0 } else { 2.0 };
                        c * weight / big_r.powi(k as i32)
                    })
                    .collect();
                Poly::new(coeffs)
            }
        }
    }
}

/// With one zero of `p` in `|z| ≤ r`, no harmonic `u` satisfies
/// `|v − u| < log(R/r)` on `|z| ≤ R`. The margin is the sampled
/// `sup |v − u|` minus `log(R/r)`; the sample includes both circles, which
/// is all the inequality needs.
pub fn jensen_contradiction_check(
    p: &Poly,
    u: &HarmonicProxy,
    r: f64,
    big_r: f64,
) -> Result<CheckResult, LabError> {
    check_radii(r, big_r)?;
    if p.is_zero() {
        return precondition("zero polynomial");
    }
    let count = p.zero_count_in_disc(r)?;
    if count != 1 {
        return precondition(format!("p has {count} zeros in |z| ≤ {r}, expected exactly one"));
    }
    p.zero_count_in_disc(big_r)?;
    let v = |z: C64| p.eval(z).norm_sqr().ln();
    let q = u.as_poly(&v, big_r);
    let gap = |z: C64| (v(z) - q.eval(z).re).abs();

    let rings = 64;
    let spokes = CIRCLE_MEAN_POINTS;
    let mut radii: Vec<f64> = (1..=rings).map(|k| big_r * k as f64 / rings as f64).collect();
    radii.push(r);
    let mut best = (gap(C64::new(0.0, 0.0)), C64::new(0.0, 0.0));
    for &rho in &radii {
        for k in 0..spokes {
            let z = C64::from_polar(rho, TAU * k as f64 / spokes as f64);
            let g = gap(z);
            if g > best.0 || g.is_nan() {
                best = (g, z);
            }
        }
    }
    let samples = 1 + radii.len() * spokes;
    let bound = (big_r / r).ln();
    // the roles are reversed: the corollary bounds ε from below
    Ok(CheckResult::linear("jensen_contradiction", best.0, bound)
        .with_witness(best.1)
        .with_instance(format!("r = {r}, R = {big_r}, proxy {u:?}"))
        .with_samples(samples as u64))
}

/// `|g'(0)/g(0)| ≤ −log|g(0)|²` for zero-free `g` with `|g| < 1` on the disc.
pub fn log_derivative_margin(g: &Poly) -> Result<CheckResult, LabError> {
    if g.is_zero() {
        return precondition("g is identically zero");
    }
    if g.zero_count_in_disc(1.0)? != 0 {
        return precondition("g has a zero in the unit disc");
    }
    let (sup, at) = circle_sup(&|z: C64| g.eval(z).norm(), 1.0);
    // |g| < 1 on the open disc: a nonconstant g may touch 1 on the circle
    if sup > 1.0 + 1e-12 || (g.degree() == 0 && sup >= 1.0) {
        return precondition(format!("|g| reaches {sup} on the unit circle at {at}"));
    }
    let (value, derivative) = g.eval_with_derivative(C64::new(0.0, 0.0));
    let bound = -value.norm_sqr().ln();
    let attained = (derivative / value).norm();
    Ok(CheckResult::linear("log_derivative", bound, attained)
        .with_witness(C64::new(0.0, 0.0))
        .with_instance(format!("degree {} polynomial", g.degree()))
        .with_samples(super::CIRCLE_SUP_POINTS as u64))
}

/// A point mass of the discrete measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub point: [f64; 2],
    pub mass: f64,
}

/// A finite positive measure made of atoms inside the unit disc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Atom>", into = "Vec<Atom>")]
pub struct DiskMeasure {
    atoms: Vec<Atom>,
}

impl TryFrom<Vec<Atom>> for DiskMeasure {
    type Error = LabError;

    fn try_from(atoms: Vec<Atom>) -> Result<Self, LabError> {
        DiskMeasure::new(atoms)
    }
}

impl From<DiskMeasure> for Vec<Atom> {
    fn from(m: DiskMeasure) -> Self {
        m.atoms
    }
}

impl DiskMeasure {
    pub fn new(atoms: Vec<Atom>) -> Result<Self, LabError> {
        if atoms.is_empty() {
            return precondition("measure has no atoms");
        }
        for a in &atoms {
            if !(a.mass > 0.0 && a.mass.is_finite()) {
                return precondition(format!("atom mass {} is not positive and finite", a.mass));
            }
            if !(a.point[0].hypot(a.point[1]) < 1.0) {
                return precondition(format!("atom {:?} is not inside the unit disc", a.point));
            }
        }
        Ok(DiskMeasure { atoms })
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn total_mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.mass).sum()
    }

    /// Blaschke potential `Φ(z) = Σ m log|(z − ζ)/(1 − ζ̄z)|`, which is ≤ 0 on the disc.
    pub fn potential(&self, z: C64) -> f64 {
        self.atoms.iter().map(|a| a.mass * pseudo_distance(z, atom_point(a)).ln()).sum()
    }

    fn potential_without(&self, z: C64, skip: usize) -> f64 {
        self.atoms
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != skip)
            .map(|(_, a)| a.mass * pseudo_distance(z, atom_point(a)).ln())
            .sum()
    }
}

fn atom_point(a: &Atom) -> C64 {
    C64::new(a.point[0], a.point[1])
}

fn pseudo_distance(z: C64, zeta: C64) -> f64 {
    ((z - zeta) / (C64::new(1.0, 0.0) - zeta.conj() * z)).norm()
}

/// `C(r, η) = 4/(1 − r)² · log(1/η)`.
pub fn cartan_constant(r: f64, eta: f64) -> f64 {
    4.0 / ((1.0 - r) * (1.0 - r)) * (1.0 / eta).ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Disc {
    center: C64,
    radius: f64,
}

impl Disc {
    fn overlaps(&self, other: &Disc) -> bool {
        (self.center - other.center).norm() < self.radius + other.radius
    }

    /// Smallest disc containing both; its radius never exceeds the sum of the two.
    fn enclose(&self, other: &Disc) -> Disc {
        let d = (other.center - self.center).norm();
        if d + other.radius <= self.radius {
            return *self;
        }
        if d + self.radius <= other.radius {
            return *other;
        }
        let radius = 0.5 * (d + self.radius + other.radius);
        let direction = (other.center - self.center) / d;
        Disc { center: self.center + direction * (radius - self.radius), radius }
    }
}

fn merge_overlapping(mut discs: Vec<Disc>) -> Vec<Disc> {
    'outer: loop {
        for i in 0..discs.len() {
            for j in (i + 1)..discs.len() {
                if discs[i].overlaps(&discs[j]) {
                    let merged = discs[i].enclose(&discs[j]);
                    discs.remove(j);
                    discs[i] = merged;
                    continue 'outer;
                }
            }
        }
        return discs;
    }
}

/// Cartan's lemma on a grid over `|z| ≤ r`.
///
/// Grid points with `Φ(z) ≤ C(r, η)Φ(z0)` are grouped into 8-connected
/// components, each covered by one disc. Every atom also gets the
/// pseudo-hyperbolic disc on which its own term, together with the rest of
/// the potential near it, falls below the threshold, since that neighbourhood
/// can be far smaller than a grid cell. Overlapping discs are merged and the
/// margin is `4eη` minus the total radius.
pub fn cartan_exceptional_test(
    mu: &DiskMeasure,
    r: f64,
    eta: f64,
    z0: C64,
    grid: usize,
) -> Result<CheckResult, LabError> {
    if !(r > 0.0 && r < 1.0) {
        return precondition(format!("r = {r} is outside (0, 1)"));
    }
    if !(eta > 0.0 && eta < 1.0 / (4.0 * E)) {
        return precondition(format!("η = {eta} is outside (0, 1/4e)"));
    }
    if !(z0.norm() <= r) {
        return precondition(format!("|z0| = {} exceeds r = {r}", z0.norm()));
    }
    if grid < 2 {
        return precondition("grid needs at least two points per side");
    }
    let budget = 4.0 * E * eta;
    let step = 2.0 * r / (grid - 1) as f64;
    if step >= budget {
        return Err(LabError::GridTooCoarse { step, budget });
    }
    let instance = format!("{} atoms, r = {r}, η = {eta}, grid {grid}²", mu.atoms().len());
    let samples = (grid * grid) as u64;
    let phi0 = mu.potential(z0);
    if phi0 == f64::NEG_INFINITY {
        // only the atoms themselves violate Φ > −∞
        return Ok(CheckResult::linear("cartan_exceptional", budget, 0.0)
            .with_witness(z0)
            .with_instance(instance)
            .with_samples(samples));
    }
    let threshold = cartan_constant(r, eta) * phi0;
    let coord = |i: usize| -r + step * i as f64;

    let violators: Vec<bool> = (0..grid * grid)
        .into_par_iter()
        .map(|idx| {
            let z = C64::new(coord(idx % grid), coord(idx / grid));
            z.norm() <= r && !(mu.potential(z) > threshold)
        })
        .collect();

    let mut discs = Vec::new();
    let mut seen = vec![false; grid * grid];
    let half_cell = step * std::f64::consts::FRAC_1_SQRT_2;
    for start in 0..grid * grid {
        if !violators[start] || seen[start] {
            continue;
        }
        let mut component = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(idx) = queue.pop_front() {
            component.push(C64::new(coord(idx % grid), coord(idx / grid)));
            let (x, y) = ((idx % grid) as i64, (idx / grid) as i64);
            for dy in -1..=1 {
                for dx in -1..=1 {
                    let (nx, ny) = (x + dx, y + dy);
                    if nx < 0 || ny < 0 || nx >= grid as i64 || ny >= grid as i64 {
                        continue;
                    }
                    let n = ny as usize * grid + nx as usize;
                    if violators[n] && !seen[n] {
                        seen[n] = true;
                        queue.push_back(n);
                    }
                }
            }
        }
        let center = component.iter().sum::<C64>() / component.len() as f64;
        let radius = component.iter().map(|z| (z - center).norm()).fold(0.0, f64::max) + half_cell;
        discs.push(Disc { center, radius });
    }

    let offsets = [-1.0, 0.0, 1.0];
    for (k, atom) in mu.atoms().iter().enumerate() {
        let zeta = atom_point(atom);
        let rest_min = offsets
            .iter()
            .flat_map(|&dx| offsets.iter().map(move |&dy| zeta + C64::new(dx, dy) * step))
            .map(|z| mu.potential_without(z, k))
            .fold(f64::INFINITY, f64::min);
        let t = ((threshold - rest_min) / atom.mass).exp().min(1.0);
        let s = zeta.norm_sqr();
        let denominator = 1.0 - t * t * s;
        let disc = Disc {
            center: zeta * (1.0 - t * t) / denominator,
            radius: t * (1.0 - s) / denominator,
        };
        if disc.center.norm() - disc.radius <= r {
            discs.push(disc);
        }
    }

    let merged = merge_overlapping(discs);
    let total: f64 = merged.iter().map(|d| d.radius).sum();
    let witness = merged
        .iter()
        .max_by(|a, b| a.radius.total_cmp(&b.radius))
        .map(|d| d.center)
        .unwrap_or(z0);
    Ok(CheckResult::linear("cartan_exceptional", budget, total)
        .with_witness(witness)
        .with_instance(instance)
        .with_samples(samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn jensen_for_z_reproduces_log_two() {
        let p = Poly::from_real(&[0.0, 1.0]);
        let (lhs, rhs) = jensen_sides_poly(&p, 0.25, 0.5).unwrap();
        assert!((lhs - LN_2).abs() < 1e-15);
        assert!((rhs - LN_2).abs() < 1e-13);
        assert!(jensen_residual_poly(&p, 0.25, 0.5).unwrap().passed());
    }

    #[test]
    fn jensen_shifted_zero_and_linear_curve() {
        let p = Poly::from_real(&[-0.1, 1.0]);
        assert!(jensen_residual_poly(&p, 0.3, 0.9).unwrap().attained < 1e-7);
        let f = crate::curves::Family::LinearEmbedding { a: [1.0, 0.0] }.curve(1.0).unwrap();
        let (lhs, rhs) = jensen_sides_curve(&f, 0.25, 0.75).unwrap();
        let exact = 0.5 * ((1.0 + 0.5625f64) / (1.0 + 0.0625)).ln();
        assert!((lhs - exact).abs() < 1e-10, "{lhs} vs {exact}");
        assert!((rhs - exact).abs() < 1e-12);
    }

    #[test]
    fn jensen_rejects_zero_on_circle() {
        let p = Poly::from_real(&[-0.5, 1.0]);
        assert!(matches!(jensen_residual_poly(&p, 0.5, 0.9), Err(LabError::Poly(_))));
        assert!(matches!(jensen_residual_poly(&p, 0.9, 0.5), Err(LabError::Precondition(_))));
    }

    #[test]
    fn log_derivative_examples() {
        let g = Poly::from_real(&[-0.75, 0.25]);
        let m = log_derivative_margin(&g).unwrap();
        assert!((m.attained - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.margin - (-(9f64 / 16.0).ln() - 1.0 / 3.0)).abs() < 1e-15);
        assert!((m.margin - 0.242).abs() < 1e-3);
        let constant = Poly::constant(c(0.3, 0.4));
        let m = log_derivative_margin(&constant).unwrap();
        assert!((m.margin + 0.25f64.ln()).abs() < 1e-15);
        // (z − 0.5)/2 has a zero inside
        assert!(log_derivative_margin(&Poly::from_real(&[-0.25, 0.5])).is_err());
        // 0.9 + 0.5 z exceeds 1 on the circle
        assert!(log_derivative_margin(&Poly::from_real(&[0.9, 0.5])).is_err());
    }

    #[test]
    fn contradiction_examples() {
        let p = Poly::from_real(&[0.0, 1.0]);
        for proxy in [HarmonicProxy::Zero, HarmonicProxy::BoundaryFit { terms: 32 }] {
            let m = jensen_contradiction_check(&p, &proxy, 0.25, 0.5).unwrap();
            assert!(m.margin >= 0.0, "{proxy:?}: {m:?}");
        }
        let q = Poly::from_real(&[-0.1, 1.0]).mul(&Poly::from_real(&[-0.8, 0.0, 1.0]));
        let fit = jensen_contradiction_check(&q, &HarmonicProxy::BoundaryFit { terms: 48 }, 0.3, 0.6).unwrap();
        assert!(fit.margin >= 0.0);
        let free = Poly::from_real(&[2.0, 1.0]);
        assert!(matches!(
            jensen_contradiction_check(&free, &HarmonicProxy::Zero, 0.25, 0.5),
            Err(LabError::Precondition(_))
        ));
    }

    #[test]
    fn boundary_fit_reproduces_harmonic_data() {
        // v = log|z − 2|² is harmonic on |z| ≤ 1, so the fit recovers it
        let p = Poly::from_real(&[-2.0, 1.0]);
        let v = |z: C64| p.eval(z).norm_sqr().ln();
        let q = HarmonicProxy::BoundaryFit { terms: 60 }.as_poly(&v, 1.0);
        for z in [c(0.0, 0.0), c(0.5, -0.3), c(-0.2, 0.7)] {
            assert!((q.eval(z).re - v(z)).abs() < 1e-12);
        }
    }

    #[test]
    fn cartan_examples() {
        let budget = 4.0 * E * 0.01;
        let origin = DiskMeasure::new(vec![Atom { point: [0.0, 0.0], mass: 1.0 }]).unwrap();
        let at_atom = cartan_exceptional_test(&origin, 0.5, 0.01, c(0.0, 0.0), 256).unwrap();
        assert_eq!(at_atom.margin, budget);
        let off = cartan_exceptional_test(&origin, 0.5, 0.01, c(0.3, 0.1), 512).unwrap();
        assert!(off.margin > 0.0 && off.margin <= budget);

        let faint = DiskMeasure::new(vec![Atom { point: [0.2, 0.1], mass: 1e-12 }]).unwrap();
        let m = cartan_exceptional_test(&faint, 0.5, 0.01, c(-0.3, 0.2), 256).unwrap();
        assert_eq!(m.margin, budget);

        assert!(matches!(
            cartan_exceptional_test(&origin, 0.5, 0.01, c(0.3, 0.0), 4),
            Err(LabError::GridTooCoarse { .. })
        ));
        assert!(cartan_exceptional_test(&origin, 0.5, 0.2, c(0.3, 0.0), 64).is_err());
        assert!(cartan_exceptional_test(&origin, 0.5, 0.01, c(0.6, 0.0), 64).is_err());
    }

    #[test]
    fn measure_validation() {
        assert!(DiskMeasure::new(vec![]).is_err());
        assert!(DiskMeasure::new(vec![Atom { point: [1.0, 0.0], mass: 1.0 }]).is_err());
        assert!(DiskMeasure::new(vec![Atom { point: [0.0, 0.0], mass: 0.0 }]).is_err());
        let m: DiskMeasure = serde_json::from_str(r#"[{"point":[0.1,0.2],"mass":2.0}]"#).unwrap();
        assert_eq!(m.total_mass(), 2.0);
        assert!(m.potential(c(0.5, 0.5)) < 0.0);
    }

    #[test]
    fn merging_never_increases_total_radius() {
        let discs = vec![
            Disc { center: c(0.0, 0.0), radius: 0.1 },
            Disc { center: c(0.15, 0.0), radius: 0.1 },
            Disc { center: c(0.5, 0.0), radius: 0.01 },
        ];
        let merged = merge_overlapping(discs);
        assert_eq!(merged.len(), 2);
        assert!((merged[0].radius - 0.175).abs() < 1e-15);
    }
}
