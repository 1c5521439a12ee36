//! Checks on Fubini–Study derivatives of curves: the formula identities, the
//! change of coordinates, the area-to-derivative bounds and the Landau and
//! Schottky magnitudes.

use std::f64::consts::LN_2;

use rand::Rng;

use super::{precondition, uniform_complex, uniform_in_disc, worst, CheckResult, LabError};
use crate::config::{Configuration, Hyperplane, GENERAL_POSITION_EPS};
use crate::curves::{Curve, Family};
use crate::lognum::LogNumber;
use crate::poly::C64;
use crate::spectrum::{hermitian_eigenvalues, HermitianMatrix, SpectralQuantities, SpectrumError};

/// Agreement required between the closed-form expressions for `(f#)²`.
pub const FORMULA_TOL: f64 = 1e-10;
/// Agreement required of the finite-difference Laplacian.
pub const LAPLACIAN_TOL: f64 = 1e-4;
/// Step of the five-point Laplacian.
pub const LAPLACIAN_STEP: f64 = 1e-4;
/// Absolute floor on the Laplacian comparison: the stencil loses about
/// `8ε|log ‖f‖²| / h²` to rounding.
pub const LAPLACIAN_FLOOR: f64 = 1e-6;
/// Relative tolerance on the sharpness family's area.
pub const SHARPNESS_TOL: f64 = 0.01;

const ORIGIN: C64 = C64 { re: 0.0, im: 0.0 };

/// Spectral quantities of `n+1` unit hyperplanes.
pub fn subset_spectrum(hyperplanes: &[Hyperplane]) -> Result<SpectralQuantities, LabError> {
    let rows: Vec<&[C64]> = hyperplanes.iter().map(|h| h.coeffs()).collect();
    let eigenvalues = hermitian_eigenvalues(&HermitianMatrix::gram(&rows))?;
    if eigenvalues[0] <= GENERAL_POSITION_EPS * GENERAL_POSITION_EPS {
        return Err(SpectrumError::Degenerate {
            subset: (0..hyperplanes.len()).collect(),
            lambda: eigenvalues[0],
        }
        .into());
    }
    Ok(SpectralQuantities::from_eigenvalues(eigenvalues))
}

fn check_subset(f: &Curve, hyperplanes: &[Hyperplane]) -> Result<(), LabError> {
    let n = f.dimension();
    if hyperplanes.len() != n + 1 || hyperplanes.iter().any(|h| h.dimension() != n) {
        return precondition(format!("need {} hyperplanes in P^{n}", n + 1));
    }
    Ok(())
}

/// `f` restricted to its evaluation disc, reparametrized over the unit disc.
fn on_unit_disc(f: &Curve) -> Result<Curve, LabError> {
    Ok(f.rescaled(f.eval_radius())?)
}

fn check_omits(f: &Curve, hyperplanes: &[Hyperplane]) -> Result<(), LabError> {
    for (j, h) in hyperplanes.iter().enumerate() {
        if !f.omits(h)? {
            return precondition(format!("the curve meets hyperplane {j} on |z| ≤ {}", f.eval_radius()));
        }
    }
    Ok(())
}

/// Area-to-derivative bound for a curve omitting `n+1` hyperplanes:
/// `f#(0) ≤ (3√2/λ#)[(2 log 2)σ + log(n+1) + log(Λ/λ)]`.
///
/// A curve with evaluation radius `ρ < 1` is read as `z ↦ f(ρz)` on the unit disc.
pub fn dufresnoy_margin(f: &Curve, hyperplanes: &[Hyperplane]) -> Result<CheckResult, LabError> {
    check_subset(f, hyperplanes)?;
    check_omits(f, hyperplanes)?;
    let q = subset_spectrum(hyperplanes)?;
    let g = on_unit_disc(f)?;
    let sigma = g.fs_area(1.0)?.value;
    let n = f.dimension() as f64;
    let bound = 3.0 * 2f64.sqrt() / q.lambda_sharp
        * (2.0 * LN_2 * sigma + (n + 1.0).ln() + (q.big_lambda / q.lambda).ln());
    let attained = g.fs_derivative(ORIGIN)?;
    Ok(CheckResult::linear("dufresnoy", bound, attained)
        .with_witness(ORIGIN)
        .with_instance(format!("P^{} curve, eval radius {}, σ = {sigma:.6}", f.dimension(), f.eval_radius())))
}

/// `[f#(0)]² ≤ σ/(1 − σ)` for curves into `P¹` of small area, on the disc of `radius`.
pub fn dufresnoy_small_area_margin(f: &Curve, radius: f64) -> Result<CheckResult, LabError> {
    if f.dimension() != 1 {
        return precondition("the small-area bound is for curves into P^1");
    }
    if !(radius > 0.0 && radius <= f.eval_radius()) {
        return precondition(format!("radius {radius} is outside (0, {}]", f.eval_radius()));
    }
    let sigma = f.fs_area_with_tol(radius, 1e-13)?.value;
    if !(sigma < 1.0) {
        return precondition(format!("σ = {sigma} is not below 1"));
    }
    let derivative = radius * f.fs_derivative(ORIGIN)?;
    Ok(CheckResult::linear("dufresnoy_small_area", sigma / (1.0 - sigma), derivative * derivative)
        .with_witness(ORIGIN)
        .with_instance(format!("radius {radius}, σ = {sigma:e}")))
}

/// `f#(z) ≤ K/(1 − |z|²)` in log space, for `f` omitting every hyperplane of `c`.
pub fn landau_margin(f: &Curve, c: &Configuration, k: &LogNumber, z: C64) -> Result<CheckResult, LabError> {
    if c.dimension() != f.dimension() {
        return precondition("curve and configuration dimensions differ");
    }
    if !(z.norm() < 1.0) {
        return precondition(format!("|z| = {} is not below 1", z.norm()));
    }
    check_omits(f, c.hyperplanes())?;
    let g = on_unit_disc(f)?;
    let p = k.precision();
    let shrink = LogNumber::from_f64(1.0 - z.norm_sqr(), p).expect("|z| < 1");
    let bound = k.div(&shrink);
    let derivative = g.fs_derivative(z)?;
    let result = match LogNumber::from_f64(derivative, p) {
        Some(d) => {
            let margin = bound.ln_ratio(&d);
            CheckResult { margin, ..CheckResult::log("landau", bound.ln_f64(), d.ln_f64()) }
        }
        None => CheckResult::log("landau", bound.ln_f64(), f64::NEG_INFINITY),
    };
    Ok(result.with_witness(z))
}

/// `∫_{|z|<1/32} (f#)² dA/π` against the area bound, in log space.
pub fn landau_area_check(f: &Curve, c: &Configuration, area_bound: &LogNumber) -> Result<CheckResult, LabError> {
    if c.dimension() != f.dimension() {
        return precondition("curve and configuration dimensions differ");
    }
    check_omits(f, c.hyperplanes())?;
    let g = on_unit_disc(f)?;
    let sigma = g.fs_area(1.0 / 32.0)?.value;
    let result = match LogNumber::from_f64(sigma, area_bound.precision()) {
        Some(s) => {
            let margin = area_bound.ln_ratio(&s);
            CheckResult { margin, ..CheckResult::log("landau_area", area_bound.ln_f64(), s.ln_f64()) }
        }
        None => CheckResult::log("landau_area", area_bound.ln_f64(), f64::NEG_INFINITY),
    };
    Ok(result.with_instance(format!("σ(1/32) = {sigma:e}")))
}

/// `log(1/δ(z)) < (16 log(1/δ(0)) + 8K²)/(1 − |z|)` in log space.
pub fn schottky_margin(f: &Curve, h: &Hyperplane, k: &LogNumber, z: C64) -> Result<CheckResult, LabError> {
    if !(z.norm() < 1.0) {
        return precondition(format!("|z| = {} is not below 1", z.norm()));
    }
    let g = on_unit_disc(f)?;
    let delta0 = g.delta(h, ORIGIN)?;
    if !(delta0 > 0.0) {
        return precondition("δ(0) = 0: the curve meets the hyperplane at the origin");
    }
    let bound = crate::bounds::schottky_bound(delta0, k, z.norm())?;
    let delta = g.delta(h, z)?;
    let attained = -delta.ln();
    let result = if delta == 0.0 {
        CheckResult::log("schottky", bound.ln_f64(), f64::INFINITY)
    } else {
        match LogNumber::from_f64(attained, k.precision()) {
            Some(a) => {
                let margin = bound.ln_ratio(&a);
                CheckResult { margin, ..CheckResult::log("schottky", bound.ln_f64(), a.ln_f64()) }
            }
            None => CheckResult::log("schottky", bound.ln_f64(), f64::NEG_INFINITY),
        }
    };
    Ok(result.with_witness(z))
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 { 0.0 } else { (a - b).abs() / scale }
}

/// `Σ_{j,k} conj(f_j') conj(f_k) [f_j' f_k − f_j f_k'] / ‖f‖⁴`, the form of
/// `(f#)²` before dividing through by the coordinates.
fn expanded_form(f: &Curve, z: C64) -> f64 {
    let values = f.eval(z);
    let derivs: Vec<C64> = f.coordinates().iter().map(|p| p.eval_with_derivative(z).1).collect();
    let norm_sq: f64 = values.iter().map(|v| v.norm_sqr()).sum();
    let mut acc = C64::new(0.0, 0.0);
    for j in 0..values.len() {
        for k in 0..values.len() {
            acc += derivs[j].conj() * values[k].conj() * (derivs[j] * values[k] - values[j] * derivs[k]);
        }
    }
    acc.re / (norm_sq * norm_sq)
}

/// The closed forms of `(f#)²` agree to [`FORMULA_TOL`] and the Laplacian of
/// `log ‖f‖²/4` matches to [`LAPLACIAN_TOL`] at every point.
pub fn fs_formula_checks(f: &Curve, points: &[C64]) -> Vec<CheckResult> {
    let mut formula = Vec::with_capacity(points.len());
    let mut laplacian = Vec::with_capacity(points.len());
    for &z in points {
        let forms = f.density_forms(z);
        let mut gap = relative_gap(forms.pair_sum, forms.wedge).max(relative_gap(forms.pair_sum, expanded_form(f, z)));
        if let Some(ld) = forms.log_derivative {
            gap = gap.max(relative_gap(forms.pair_sum, ld));
        }
        formula.push(CheckResult::linear("fs_formulas", FORMULA_TOL, gap).with_witness(z));
        let fd = f.fs_density_finite_difference(z, LAPLACIAN_STEP);
        let allowed = LAPLACIAN_TOL * forms.pair_sum + LAPLACIAN_FLOOR;
        // normalized so that the margin reads as a relative error budget
        laplacian.push(
            CheckResult::linear("fs_laplacian", LAPLACIAN_TOL, LAPLACIAN_TOL * (fd - forms.pair_sum).abs() / allowed)
                .with_witness(z),
        );
    }
    let n = points.len() as u64;
    [formula, laplacian]
        .into_iter()
        .filter_map(|set| worst(set).map(|r| r.with_samples(n)))
        .collect()
}

/// `λ# ≤ g#/f# ≤ Λ#` for `g_j = H_j ∘ f`, at every point.
pub fn change_of_coordinates_check(f: &Curve, hyperplanes: &[Hyperplane], points: &[C64]) -> Result<CheckResult, LabError> {
    check_subset(f, hyperplanes)?;
    let q = subset_spectrum(hyperplanes)?;
    let g = f.compose_hyperplanes(hyperplanes)?;
    let mut results = Vec::with_capacity(points.len());
    for &z in points {
        let ratio = (g.fs_density(z) / f.fs_density(z)).sqrt();
        let low = CheckResult::linear("change_of_coordinates", ratio, q.lambda_sharp);
        let high = CheckResult::linear("change_of_coordinates", q.big_lambda_sharp, ratio);
        results.push(if low.margin < high.margin { low } else { high }.with_witness(z));
    }
    let worst = worst(results).unwrap_or_else(|| CheckResult::linear("change_of_coordinates", 0.0, 0.0));
    Ok(worst
        .with_instance(format!("λ# = {}, Λ# = {}", q.lambda_sharp, q.big_lambda_sharp))
        .with_samples(points.len() as u64))
}

/// `λ ≤ Σ|H_j(w)|²/‖w‖² ≤ Λ` at random unit vectors `w`.
pub fn norm_equation_check<R: Rng>(hyperplanes: &[Hyperplane], samples: usize, rng: &mut R) -> Result<CheckResult, LabError> {
    let n = hyperplanes.len().saturating_sub(1);
    if hyperplanes.is_empty() || hyperplanes.iter().any(|h| h.dimension() != n) {
        return precondition("need n+1 hyperplanes in P^n");
    }
    let q = subset_spectrum(hyperplanes)?;
    let mut results = Vec::with_capacity(samples);
    for _ in 0..samples {
        let mut w: Vec<C64> = (0..=n).map(|_| uniform_complex(rng)).collect();
        let norm = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        w.iter_mut().for_each(|x| *x /= norm);
        let ratio: f64 = hyperplanes.iter().map(|h| h.apply(&w).norm_sqr()).sum();
        let low = CheckResult::linear("norm_equation", ratio, q.lambda);
        let high = CheckResult::linear("norm_equation", q.big_lambda, ratio);
        results.push(if low.margin < high.margin { low } else { high });
    }
    Ok(worst(results)
        .unwrap_or_else(|| CheckResult::linear("norm_equation", 0.0, 0.0))
        .with_instance(format!("λ = {}, Λ = {}", q.lambda, q.big_lambda))
        .with_samples(samples as u64))
}

/// For `f_m = ((z−1)/(z+1))^m`: `f_m#(0) = m`, the extrapolated area is `m/2`,
/// and hence `f_m#(0) = 2σ_m`.
pub fn sharpness_checks(m: u32) -> Result<Vec<CheckResult>, LabError> {
    let f = Family::MoebiusPower { m }.curve(1.0)?;
    let derivative = f.fs_derivative(ORIGIN)?;
    let sigma = f.fs_area_extrapolated()?.value;
    let half = m as f64 / 2.0;
    let instance = format!("m = {m}, f#(0) = {derivative}, σ = {sigma}");
    Ok(vec![
        CheckResult::linear("sharpness_derivative", 1e-10, (derivative - m as f64).abs()),
        CheckResult::linear("sharpness_area", SHARPNESS_TOL, (sigma - half).abs() / half),
        CheckResult::linear("sharpness_cross", SHARPNESS_TOL, (derivative - 2.0 * sigma).abs() / derivative),
    ]
    .into_iter()
    .map(|r| r.with_witness(ORIGIN).with_instance(instance.clone()))
    .collect())
}

/// Uniform points in the disc of `radius`, the origin first.
pub fn sample_points<R: Rng>(rng: &mut R, radius: f64, count: usize) -> Vec<C64> {
    let mut points = vec![ORIGIN];
    points.extend((1..count).map(|_| uniform_in_disc(rng, ORIGIN, radius)));
    points
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::{binomial_b, landau_k};
    use crate::config::{normalize, Configuration};
    use crate::poly::Poly;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn coordinate_pair() -> Vec<Hyperplane> {
        vec![Hyperplane::coordinate(1, 0), Hyperplane::coordinate(1, 1)]
    }

    #[test]
    fn dufresnoy_examples() {
        let f = Curve::new(vec![Poly::from_real(&[1.0]), Poly::from_real(&[1.0, 0.5])], 1.0).unwrap();
        let m = dufresnoy_margin(&f, &coordinate_pair()).unwrap();
        // f#(0) = |f'(0)| / (1 + |f(0)|²) = (1/2) / 2
        assert!((m.attained - 0.25).abs() < 1e-15, "{}", m.attained);
        assert!(m.margin > 0.0);
        let constant = Family::Constant { value: [0.3, 0.0] }.curve(1.0).unwrap();
        let m = dufresnoy_margin(&constant, &coordinate_pair()).unwrap();
        assert_eq!(m.attained, 0.0);
        assert!((m.bound - 3.0 * 2f64.sqrt() * LN_2).abs() < 1e-14);
        for m in 1..=5 {
            let f = Family::MoebiusPower { m }.curve(0.9).unwrap();
            assert!(dufresnoy_margin(&f, &coordinate_pair()).unwrap().margin > 0.0);
        }
        let full = Family::MoebiusPower { m: 2 }.curve(1.0).unwrap();
        assert!(matches!(dufresnoy_margin(&full, &coordinate_pair()), Err(LabError::Curve(_))));
        let hits = Family::LinearEmbedding { a: [1.0, 0.0] }.curve(1.0).unwrap();
        assert!(matches!(dufresnoy_margin(&hits, &coordinate_pair()), Err(LabError::Precondition(_))));
    }

    #[test]
    fn small_area_is_sharp_for_linear_maps() {
        let f = Family::LinearEmbedding { a: [0.1, 0.0] }.curve(1.0).unwrap();
        let m = dufresnoy_small_area_margin(&f, 1.0).unwrap();
        assert!(m.margin >= -1e-15 && m.margin <= 1e-4, "{m:?}");
        let constant = Family::Constant { value: [0.0, 0.0] }.curve(1.0).unwrap();
        assert_eq!(dufresnoy_small_area_margin(&constant, 1.0).unwrap().margin, 0.0);
        let big = Family::MoebiusPower { m: 3 }.curve(1.0).unwrap();
        assert!(dufresnoy_small_area_margin(&big, 1.0).is_err());
    }

    #[test]
    fn landau_and_schottky_examples() {
        let c = Configuration::from_points(&[Some(C64::new(0.0, 0.0)), Some(C64::new(100.0, 0.0)), None]).unwrap();
        let k = landau_k(2.0, 1.0, &binomial_b(1), 200).unwrap();
        let f = Family::ScaledExponential { rate: 1.0, degree: 12, scale: [1.0, 0.0] }.curve(1.0).unwrap();
        let m = landau_margin(&f, &c, &k, C64::new(0.3, 0.4)).unwrap();
        assert!(m.margin > 2700.0);
        let constant = Family::Constant { value: [2.0, 0.0] }.curve(1.0).unwrap();
        assert_eq!(landau_margin(&constant, &c, &k, C64::new(0.1, 0.0)).unwrap().margin, f64::INFINITY);
        let line = Family::LinearEmbedding { a: [1.0, 0.0] }.curve(1.0).unwrap();
        assert!(landau_margin(&line, &c, &k, C64::new(0.1, 0.0)).is_err());

        let h = Hyperplane::coordinate(1, 0);
        let s = schottky_margin(&line, &h, &k, C64::new(0.5, 0.0)).unwrap();
        assert!((s.attained - (0.5 * (1.25f64).ln()).ln()).abs() < 1e-12);
        assert!(s.margin > 5000.0);
        let at_zero = schottky_margin(&line, &Hyperplane::coordinate(1, 1), &k, C64::new(0.5, 0.0));
        assert!(matches!(at_zero, Err(LabError::Precondition(_))));
        // δ(0) = 1 at the origin itself: attained log(1/δ) = 0
        assert_eq!(schottky_margin(&line, &h, &k, C64::new(0.0, 0.0)).unwrap().margin, f64::INFINITY);
    }

    #[test]
    fn formula_and_coordinate_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = Curve::new(
            vec![
                Poly::new(vec![C64::new(1.0, 0.2), C64::new(-0.3, 0.1), C64::new(0.2, 0.0)]),
                Poly::new(vec![C64::new(0.1, -0.4), C64::new(0.8, 0.0), C64::new(0.0, 0.3), C64::new(0.2, 0.1)]),
            ],
            1.0,
        )
        .unwrap();
        let points = sample_points(&mut rng, 0.95, 200);
        for r in fs_formula_checks(&f, &points) {
            assert!(r.passed(), "{r:?}");
        }
        let hs = vec![
            normalize(&[C64::new(0.0, 0.0), C64::new(1.0, 0.0)]).unwrap(),
            normalize(&[C64::new(-1.0, 0.0), C64::new(1.0, 0.0)]).unwrap(),
        ];
        let r = change_of_coordinates_check(&f, &hs, &points).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = norm_equation_check(&hs, 2000, &mut rng).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn sharpness_family() {
        for m in [1, 2] {
            for r in sharpness_checks(m).unwrap() {
                assert!(r.passed(), "{r:?}");
            }
        }
    }
}
