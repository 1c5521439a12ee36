//! Seeded random instances and the built-in instance sets.

use rand::Rng;

use super::growth::{fitted_tau, harmonic_sup, RealPoly2, RemezInstance};
use super::potential::{Atom, DiskMeasure};
use super::{uniform_complex, uniform_in_disc};
use crate::config::{normalize, Configuration, Hyperplane};
use crate::curves::{Curve, Family};
use crate::poly::{Poly, C64};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn random_poly<R: Rng>(rng: &mut R, degree: usize) -> Poly {
    Poly::new((0..=degree).map(|_| uniform_complex(rng)).collect())
}

/// A polynomial whose zeros keep a distance of at least 0.05 from both circles.
pub fn random_jensen_poly<R: Rng>(rng: &mut R, r: f64, big_r: f64) -> Poly {
    let degree = rng.gen_range(1..=5);
    let mut roots = Vec::with_capacity(degree);
    while roots.len() < degree {
        let z = uniform_in_disc(rng, c(0.0, 0.0), 1.2);
        if (z.norm() - r).abs() > 0.05 && (z.norm() - big_r).abs() > 0.05 {
            roots.push(z);
        }
    }
    Poly::from_roots(uniform_complex(rng) + c(2.0, 0.0), &roots)
}

/// `n+1` random polynomials of degree `degree` without common zeros on the closed disc.
pub fn random_curve<R: Rng>(rng: &mut R, n: usize, degree: usize) -> Curve {
    loop {
        let coords = (0..=n).map(|_| random_poly(rng, degree)).collect();
        if let Ok(f) = Curve::new(coords, 1.0) {
            return f;
        }
    }
}

/// `n+1` random unit hyperplanes with `λ₀ ≥ 10⁻³`.
pub fn random_subset<R: Rng>(rng: &mut R, n: usize) -> Vec<Hyperplane> {
    loop {
        let hs: Vec<Hyperplane> = (0..=n)
            .filter_map(|_| normalize(&(0..=n).map(|_| uniform_complex(rng)).collect::<Vec<_>>()).ok())
            .collect();
        if hs.len() == n + 1 {
            if let Ok(q) = super::curvature::subset_spectrum(&hs) {
                if q.lambda >= 1e-3 {
                    return hs;
                }
            }
        }
    }
}

/// `c ∏(1 − z/a_k)` with `|a_k| > 1.1`, scaled so that `sup |g| = 0.95` on the circle.
pub fn random_zero_free<R: Rng>(rng: &mut R) -> Poly {
    let degree = rng.gen_range(0..=4);
    let roots: Vec<C64> = (0..degree)
        .map(|_| C64::from_polar(rng.gen_range(1.1..3.0), rng.gen_range(0.0..std::f64::consts::TAU)))
        .collect();
    let mut g = Poly::constant(c(1.0, 0.0));
    for a in &roots {
        g = g.mul(&Poly::new(vec![c(1.0, 0.0), -1.0 / a]));
    }
    let sup = super::circle_sup(&|z: C64| g.eval(z).norm(), 1.0).0;
    let target = 0.95 * rng.gen_range(0.05..1.0);
    g.scale(C64::from_polar(target / sup, rng.gen_range(0.0..std::f64::consts::TAU)))
}

/// `[1 : ε p]` with a random cubic `p`, of area well below one.
pub fn random_small_area<R: Rng>(rng: &mut R) -> Curve {
    let p = random_poly(rng, 3).scale(c(0.1, 0.0));
    Curve::new(vec![Poly::constant(c(1.0, 0.0)), p], 1.0).expect("first coordinate is constant")
}

/// `u = Re P` with `P(0) = 0`, scaled to `sup |u| = 0.9` on the circle, and its fitted `τ` at `r`.
pub fn random_harmonic<R: Rng>(rng: &mut R, r: f64) -> (Poly, f64) {
    loop {
        let degree = rng.gen_range(1..=4);
        let mut coeffs = vec![c(0.0, 0.0)];
        coeffs.extend((1..=degree).map(|_| uniform_complex(rng)));
        let p = Poly::new(coeffs);
        let sup = harmonic_sup(&p, 1.0).0;
        if sup < 1e-3 {
            continue;
        }
        let p = p.scale(c(0.9 / sup, 0.0));
        let tau = fitted_tau(&p, r);
        if tau > 0.0 && tau.is_finite() {
            return (p, tau);
        }
    }
}

pub fn random_remez<R: Rng>(rng: &mut R) -> RemezInstance {
    let degree = rng.gen_range(1..=2u32);
    let mut terms = Vec::new();
    for i in 0..=degree {
        for j in 0..=(degree - i) {
            terms.push((i, j, rng.gen_range(-1.0..1.0)));
        }
    }
    let center = uniform_complex(rng);
    let radius = rng.gen_range(0.5..2.0);
    let subset_radius = radius * rng.gen_range(0.3..0.7);
    let offset = uniform_in_disc(rng, c(0.0, 0.0), radius - subset_radius);
    RemezInstance {
        poly: RealPoly2 { terms },
        center: [center.re, center.im],
        radius,
        subset_center: [center.re + offset.re, center.im + offset.im],
        subset_radius,
        eps: None,
    }
}

/// Random atoms with masses in `(0, 1]` and a random `z0` with `|z0| ≤ r`.
pub fn random_measure<R: Rng>(rng: &mut R, atoms: usize, r: f64) -> (DiskMeasure, C64) {
    let atoms = (0..atoms)
        .map(|_| {
            let z = uniform_in_disc(rng, c(0.0, 0.0), 0.95);
            Atom { point: [z.re, z.im], mass: rng.gen_range(0.01..1.0) }
        })
        .collect();
    let mu = DiskMeasure::new(atoms).expect("atoms inside the disc");
    (mu, uniform_in_disc(rng, c(0.0, 0.0), r))
}

fn curve(coords: Vec<Poly>, radius: f64) -> Curve {
    Curve::new(coords, radius).expect("built-in curve")
}

fn coordinate_hyperplanes(n: usize) -> Vec<Hyperplane> {
    (0..=n).map(|k| Hyperplane::coordinate(n, k)).collect()
}

fn plane(raw: &[f64]) -> Hyperplane {
    normalize(&raw.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>()).expect("nonzero")
}

fn small_planar_curve() -> Curve {
    curve(
        vec![
            Poly::from_real(&[1.0]),
            Poly::from_real(&[0.1, 0.05]),
            Poly::from_real(&[0.2, 0.0, -0.03]),
        ],
        1.0,
    )
}

/// Twenty curves with `n+1` omitted hyperplanes in general position.
pub fn dufresnoy_family() -> Vec<(String, Curve, Vec<Hyperplane>)> {
    let mut out = Vec::new();
    let pair = coordinate_hyperplanes(1);
    out.push(("[1 : 1 + z/2]".to_string(), curve(vec![Poly::from_real(&[1.0]), Poly::from_real(&[1.0, 0.5])], 1.0), pair.clone()));
    for m in 1..=5 {
        for radius in [0.5, 0.9] {
            out.push((format!("f_{m} on |z| < {radius}"), Family::MoebiusPower { m }.curve(radius).expect("family"), pair.clone()));
        }
    }
    out.push(("f_2 on |z| < 0.99".to_string(), Family::MoebiusPower { m: 2 }.curve(0.99).expect("family"), pair.clone()));
    for rate in [0.5, 1.0, 2.0] {
        let f = Family::ScaledExponential { rate, degree: 12, scale: [1.0, 0.0] }.curve(1.0).expect("family");
        out.push((format!("truncated exp({rate} z)"), f, pair.clone()));
    }
    out.push(("constant [1 : 0.3]".to_string(), Family::Constant { value: [0.3, 0.0] }.curve(1.0).expect("family"), pair.clone()));
    let line = curve(vec![Poly::from_real(&[1.0]), Poly::from_real(&[3.0, 1.0])], 1.0);
    out.push(("[1 : 3 + z], coordinates".to_string(), line.clone(), pair));
    out.push((
        "[1 : 3 + z], points 0 and 1".to_string(),
        line,
        vec![Hyperplane::from_point(c(0.0, 0.0)), Hyperplane::from_point(c(1.0, 0.0))],
    ));
    out.push(("planar quadratic, coordinates".to_string(), small_planar_curve(), coordinate_hyperplanes(2)));
    out.push((
        "planar quadratic, mixed".to_string(),
        small_planar_curve(),
        vec![Hyperplane::coordinate(2, 0), plane(&[1.0, 1.0, 1.0]), plane(&[1.0, 2.0, 3.0])],
    ));
    out
}

/// Curves omitting all `2n+1` hyperplanes of a configuration.
pub fn admissible_curves() -> Vec<(String, Curve, Configuration)> {
    let zero_one_inf = Configuration::from_points(&[Some(c(0.0, 0.0)), Some(c(1.0, 0.0)), None]).expect("valid");
    let zero_hundred_inf = Configuration::from_points(&[Some(c(0.0, 0.0)), Some(c(100.0, 0.0)), None]).expect("valid");
    let planar = Configuration::new(
        2,
        vec![
            Hyperplane::coordinate(2, 0),
            Hyperplane::coordinate(2, 1),
            Hyperplane::coordinate(2, 2),
            plane(&[1.0, 1.0, 1.0]),
            plane(&[1.0, 2.0, 3.0]),
        ],
    )
    .expect("general position");
    let exp = |rate: f64, scale: f64| {
        Family::ScaledExponential { rate, degree: 12, scale: [scale, 0.0] }.curve(1.0).expect("family")
    };
    vec![
        ("0.3 exp(z) avoiding 0, 1, ∞".to_string(), exp(1.0, 0.3), zero_one_inf.clone()),
        ("[1 : 0.5 + 0.2 z] avoiding 0, 1, ∞".to_string(), curve(vec![Poly::from_real(&[1.0]), Poly::from_real(&[0.5, 0.2])], 1.0), zero_one_inf.clone()),
        ("constant avoiding 0, 1, ∞".to_string(), Family::Constant { value: [0.5, 0.5] }.curve(1.0).expect("family"), zero_one_inf),
        ("exp(z) avoiding 0, 100, ∞".to_string(), exp(1.0, 1.0), zero_hundred_inf.clone()),
        ("5 exp(2z) avoiding 0, 100, ∞".to_string(), exp(2.0, 5.0), zero_hundred_inf.clone()),
        ("f_3 on |z| < 0.5 avoiding 0, 100, ∞".to_string(), Family::MoebiusPower { m: 3 }.curve(0.5).expect("family"), zero_hundred_inf),
        ("planar quadratic".to_string(), small_planar_curve(), planar),
    ]
}
