//! Suite manifests and the deterministic runner.
//!
//! Each entry's random draws come from its own ChaCha stream, keyed by the
//! suite seed and the entry's position, so results do not depend on the order
//! in which entries are evaluated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::curvature::{sample_points, subset_spectrum};
use super::growth::RemezInstance;
use super::instances;
use super::potential::{DiskMeasure, HarmonicProxy};
use super::*;
use crate::bounds::hyperbolicity_report;
use crate::config::{ConfigurationDocument, Hyperplane};
use crate::curves::{CurveSpec, Family};
use crate::poly::{Poly, C64};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_CARTAN_GRID: usize = 1024;

fn default_grid() -> usize {
    DEFAULT_CARTAN_GRID
}

fn default_samples() -> usize {
    100_000
}

/// One manifest entry. Entries ending in `random` draw their instances from
/// the entry's stream; the others are explicit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case", deny_unknown_fields)]
pub enum Check {
    JensenPolynomial {
        coefficients: Poly,
        r: f64,
        #[serde(rename = "R")]
        big_r: f64,
    },
    JensenCurve {
        curve: CurveSpec,
        r: f64,
        #[serde(rename = "R")]
        big_r: f64,
    },
    /// Alternating polynomial and cubic-curve instances.
    JensenRandom { instances: usize },
    JensenContradiction {
        coefficients: Poly,
        proxy: HarmonicProxy,
        r: f64,
        #[serde(rename = "R")]
        big_r: f64,
    },
    LogDerivative { coefficients: Poly },
    LogDerivativeRandom { instances: usize },
    Dufresnoy { curve: CurveSpec, hyperplanes: Vec<Hyperplane> },
    /// The twenty built-in curves with omitted hyperplanes.
    DufresnoyFamilies,
    DufresnoySmallArea { curve: CurveSpec, radius: f64 },
    DufresnoySmallAreaRandom { instances: usize },
    Cartan {
        atoms: DiskMeasure,
        r: f64,
        eta: f64,
        z0: [f64; 2],
        #[serde(default = "default_grid")]
        grid: usize,
    },
    CartanRandom {
        instances: usize,
        atoms: usize,
        #[serde(default = "default_grid")]
        grid: usize,
    },
    ThreeCircles {
        u: Poly,
        r: f64,
        #[serde(rename = "R")]
        big_r: f64,
        tau: f64,
    },
    ThreeCirclesRandom { instances: usize },
    Remez {
        instance: RemezInstance,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    RemezRandom {
        instances: usize,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    Rickman {
        a: [f64; 2],
        m: u32,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    RickmanRandom {
        instances: usize,
        #[serde(default = "default_samples")]
        samples: usize,
    },
    /// Landau margins at random points plus the area check.
    Landau { configuration: ConfigurationDocument, curve: CurveSpec, points: usize },
    /// [`Check::Landau`] over the built-in admissible curves.
    LandauBuiltin { points: usize },
    /// Schottky margins over the built-in admissible curves and each of their hyperplanes.
    SchottkyBuiltin { points: usize },
    FsFormulas { curves: usize, points: usize },
    ChangeOfCoordinates { pairs: usize, points: usize },
    NormEquation { subsets: usize, samples: usize },
    Sharpness { m: u32 },
    QuarterGamma,
}

impl Check {
    pub fn name(&self) -> String {
        serde_json::to_value(self)
            .ok()
            .and_then(|v| v.get("check").and_then(|c| c.as_str().map(str::to_string)))
            .unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub seed: Option<u64>,
    pub checks: Vec<Check>,
}

impl Manifest {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
#[error("check {index} ({name}): {source}")]
pub struct SuiteError {
    pub index: usize,
    pub name: String,
    #[source]
    pub source: LabError,
}

/// Documented in the module: a dedicated stream per entry.
pub fn entry_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Runs every entry; results are in manifest order. The first failing
/// precondition, in manifest order, is returned as the error.
pub fn run_manifest(manifest: &Manifest, seed: u64, precision_bits: usize) -> Result<Vec<CheckResult>, SuiteError> {
    let seed = manifest.seed.unwrap_or(seed);
    let outcomes: Vec<Result<Vec<CheckResult>, SuiteError>> = manifest
        .checks
        .par_iter()
        .enumerate()
        .map(|(index, check)| {
            let mut rng = entry_rng(seed, index);
            run_check(check, &mut rng, precision_bits)
                .map_err(|source| SuiteError { index, name: check.name(), source })
        })
        .collect();
    let mut results = Vec::new();
    for outcome in outcomes {
        results.extend(outcome?);
    }
    Ok(results)
}

fn c64(v: [f64; 2]) -> C64 {
    C64::new(v[0], v[1])
}

fn labelled(mut r: CheckResult, label: impl Into<String>) -> CheckResult {
    let label = label.into();
    r.instance = if r.instance.is_empty() { label } else { format!("{label}; {}", r.instance) };
    r
}

pub fn run_check(check: &Check, rng: &mut ChaCha8Rng, precision_bits: usize) -> Result<Vec<CheckResult>, LabError> {
    Ok(match check {
        Check::JensenPolynomial { coefficients, r, big_r } => vec![jensen_residual_poly(coefficients, *r, *big_r)?],
        Check::JensenCurve { curve, r, big_r } => vec![jensen_residual_curve(&curve.build()?, *r, *big_r)?],
        Check::JensenRandom { instances } => {
            let mut out = Vec::with_capacity(*instances);
            for i in 0..*instances {
                let r = rng.gen_range(0.1..0.4);
                let big_r = rng.gen_range(r + 0.2..0.95);
                let result = if i % 2 == 0 {
                    jensen_residual_poly(&instances::random_jensen_poly(rng, r, big_r), r, big_r)?
                } else {
                    let n = rng.gen_range(1..=3);
                    jensen_residual_curve(&instances::random_curve(rng, n, 3), r, big_r)?
                };
                out.push(labelled(result, format!("random instance {i}")));
            }
            out
        }
        Check::JensenContradiction { coefficients, proxy, r, big_r } => {
            vec![jensen_contradiction_check(coefficients, proxy, *r, *big_r)?]
        }
        Check::LogDerivative { coefficients } => vec![log_derivative_margin(coefficients)?],
        Check::LogDerivativeRandom { instances } => (0..*instances)
            .map(|i| log_derivative_margin(&instances::random_zero_free(rng)).map(|r| labelled(r, format!("random instance {i}"))))
            .collect::<Result<_, _>>()?,
        Check::Dufresnoy { curve, hyperplanes } => vec![dufresnoy_margin(&curve.build()?, hyperplanes)?],
        Check::DufresnoyFamilies => instances::dufresnoy_family()
            .into_iter()
            .map(|(name, f, hs)| dufresnoy_margin(&f, &hs).map(|r| labelled(r, name)))
            .collect::<Result<_, _>>()?,
        Check::DufresnoySmallArea { curve, radius } => vec![dufresnoy_small_area_margin(&curve.build()?, *radius)?],
        Check::DufresnoySmallAreaRandom { instances } => (0..*instances)
            .map(|i| {
                dufresnoy_small_area_margin(&instances::random_small_area(rng), 1.0)
                    .map(|r| labelled(r, format!("random instance {i}")))
            })
            .collect::<Result<_, _>>()?,
        Check::Cartan { atoms, r, eta, z0, grid } => vec![cartan_exceptional_test(atoms, *r, *eta, c64(*z0), *grid)?],
        Check::CartanRandom { instances, atoms, grid } => {
            let mut out = Vec::with_capacity(*instances);
            for i in 0..*instances {
                let r = rng.gen_range(0.2..0.8);
                let eta = rng.gen_range(0.005..0.09);
                let (mu, z0) = instances::random_measure(rng, *atoms, r);
                out.push(labelled(cartan_exceptional_test(&mu, r, eta, z0, *grid)?, format!("random instance {i}")));
            }
            out
        }
        Check::ThreeCircles { u, r, big_r, tau } => vec![three_circles_margin(u, *r, *big_r, *tau)?],
        Check::ThreeCirclesRandom { instances } => {
            let mut out = Vec::with_capacity(*instances);
            for i in 0..*instances {
                let r = rng.gen_range(0.02..0.3);
                let big_r = rng.gen_range(r + 0.01..0.49);
                let (u, tau) = instances::random_harmonic(rng, r);
                out.push(labelled(three_circles_margin(&u, r, big_r, tau)?, format!("random instance {i}")));
            }
            out
        }
        Check::Remez { instance, samples } => vec![remez_margin(instance, *samples, rng)?],
        Check::RemezRandom { instances, samples } => {
            let mut out = Vec::with_capacity(*instances);
            for i in 0..*instances {
                let inst = instances::random_remez(rng);
                out.push(labelled(remez_margin(&inst, *samples, rng)?, format!("random instance {i}")));
            }
            out
        }
        Check::Rickman { a, m, samples } => vec![rickman_cover_test(c64(*a), *m, *samples, rng)?],
        Check::RickmanRandom { instances, samples } => {
            let mut out = Vec::with_capacity(*instances);
            for i in 0..*instances {
                let a = uniform_in_disc(rng, C64::new(0.0, 0.0), 0.99);
                let m = rng.gen_range(1..=5);
                out.push(labelled(rickman_cover_test(a, m, *samples, rng)?, format!("random instance {i}")));
            }
            out
        }
        Check::Landau { configuration, curve, points } => {
            let c = configuration.clone().into_configuration()?;
            landau_set(&curve.build()?, &c, *points, rng, precision_bits, "configured curve")?
        }
        Check::LandauBuiltin { points } => {
            let mut out = Vec::new();
            for (name, f, c) in instances::admissible_curves() {
                out.extend(landau_set(&f, &c, *points, rng, precision_bits, &name)?);
            }
            out
        }
        Check::SchottkyBuiltin { points } => {
            let mut out = Vec::new();
            for (name, f, c) in instances::admissible_curves() {
                let report = hyperbolicity_report(&c, precision_bits)?;
                let zs = sample_points(rng, 0.99, *points);
                for (j, h) in c.hyperplanes().iter().enumerate() {
                    let results = zs
                        .iter()
                        .map(|&z| schottky_margin(&f, h, &report.k, z))
                        .collect::<Result<Vec<_>, _>>()?;
                    let w = worst(results).expect("at least one point");
                    out.push(labelled(w.with_samples(*points as u64), format!("{name}, hyperplane {j}")));
                }
            }
            out
        }
        Check::FsFormulas { curves, points } => {
            let mut out = Vec::new();
            for i in 0..*curves {
                let n = rng.gen_range(1..=3);
                let f = instances::random_curve(rng, n, 3);
                let zs = sample_points(rng, 0.99, *points);
                out.extend(fs_formula_checks(&f, &zs).into_iter().map(|r| labelled(r, format!("random cubic curve {i} into P^{n}"))));
            }
            out
        }
        Check::ChangeOfCoordinates { pairs, points } => {
            let mut out = Vec::with_capacity(*pairs);
            for i in 0..*pairs {
                let n = rng.gen_range(1..=3);
                let f = instances::random_curve(rng, n, 3);
                let hs = instances::random_subset(rng, n);
                let zs = sample_points(rng, 0.99, *points);
                out.push(labelled(change_of_coordinates_check(&f, &hs, &zs)?, format!("random pair {i} in P^{n}")));
            }
            out
        }
        Check::NormEquation { subsets, samples } => {
            let mut out = Vec::with_capacity(*subsets);
            for i in 0..*subsets {
                let n = rng.gen_range(1..=4);
                let hs = instances::random_subset(rng, n);
                subset_spectrum(&hs)?;
                out.push(labelled(norm_equation_check(&hs, *samples, rng)?, format!("random subset {i} in P^{n}")));
            }
            out
        }
        Check::Sharpness { m } => sharpness_checks(*m)?,
        Check::QuarterGamma => {
            let value = quarter_gamma_constant();
            vec![CheckResult::linear("quarter_gamma", 0.05, (value - 4.4).abs())
                .with_instance(format!("Γ(1/4)⁴/(4π²) = {value}"))]
        }
    })
}

fn landau_set(
    f: &crate::curves::Curve,
    c: &crate::config::Configuration,
    points: usize,
    rng: &mut ChaCha8Rng,
    precision_bits: usize,
    name: &str,
) -> Result<Vec<CheckResult>, LabError> {
    let report = hyperbolicity_report(c, precision_bits)?;
    let zs = sample_points(rng, 0.99, points);
    let results = zs
        .iter()
        .map(|&z| landau_margin(f, c, &report.k, z))
        .collect::<Result<Vec<_>, _>>()?;
    let w = worst(results).expect("at least one point").with_samples(points as u64);
    let area = landau_area_check(f, c, &report.area_bound)?;
    Ok(vec![labelled(w, name), labelled(area, name)])
}

/// The built-in suite.
pub fn default_manifest() -> Manifest {
    let line = CurveSpec::family(Family::LinearEmbedding { a: [1.0, 0.0] });
    let small_line = CurveSpec::family(Family::LinearEmbedding { a: [0.1, 0.0] });
    let z = Poly::from_real(&[0.0, 1.0]);
    let mut checks = vec![
        Check::JensenPolynomial { coefficients: z.clone(), r: 0.25, big_r: 0.5 },
        Check::JensenPolynomial { coefficients: Poly::from_real(&[-0.1, 1.0]), r: 0.3, big_r: 0.9 },
        Check::JensenCurve { curve: line, r: 0.25, big_r: 0.75 },
        Check::JensenRandom { instances: 20 },
        Check::JensenContradiction { coefficients: z.clone(), proxy: HarmonicProxy::Zero, r: 0.25, big_r: 0.5 },
        Check::JensenContradiction {
            coefficients: z,
            proxy: HarmonicProxy::BoundaryFit { terms: 32 },
            r: 0.25,
            big_r: 0.5,
        },
        Check::LogDerivative { coefficients: Poly::from_real(&[-0.75, 0.25]) },
        Check::LogDerivativeRandom { instances: 20 },
        Check::DufresnoyFamilies,
        Check::DufresnoySmallArea { curve: small_line, radius: 1.0 },
        Check::DufresnoySmallAreaRandom { instances: 10 },
        Check::Cartan {
            atoms: DiskMeasure::new(vec![super::potential::Atom { point: [0.0, 0.0], mass: 1.0 }]).expect("valid"),
            r: 0.5,
            eta: 0.01,
            z0: [0.3, 0.1],
            grid: DEFAULT_CARTAN_GRID,
        },
        Check::CartanRandom { instances: 5, atoms: 10, grid: DEFAULT_CARTAN_GRID },
    ];
    for k in 1..=4 {
        checks.push(Check::ThreeCircles {
            u: Poly::monomial(C64::new(0.99, 0.0), k),
            r: 0.1,
            big_r: 0.4,
            tau: k as f64,
        });
    }
    checks.extend([
        Check::ThreeCirclesRandom { instances: 100 },
        Check::Remez {
            instance: RemezInstance {
                poly: super::growth::RealPoly2 { terms: vec![(1, 0, 1.0)] },
                center: [0.0, 0.0],
                radius: 1.0,
                subset_center: [0.0, 0.0],
                subset_radius: 0.5,
                eps: Some(0.5),
            },
            samples: 100_000,
        },
        Check::RemezRandom { instances: 100, samples: 20_000 },
        Check::Rickman { a: [0.0, 0.0], m: 1, samples: 100_000 },
        Check::Rickman { a: [0.9, 0.0], m: 3, samples: 100_000 },
        Check::RickmanRandom { instances: 50, samples: 100_000 },
        Check::LandauBuiltin { points: 20 },
        Check::SchottkyBuiltin { points: 100 },
        Check::FsFormulas { curves: 10, points: 100 },
        Check::ChangeOfCoordinates { pairs: 20, points: 1000 },
        Check::NormEquation { subsets: 5, samples: 10_000 },
        Check::Sharpness { m: 1 },
        Check::Sharpness { m: 2 },
        Check::Sharpness { m: 5 },
        Check::QuarterGamma,
    ]);
    Manifest { seed: None, checks }
}

/// Fixed-width table of results.
pub fn render_table(results: &[CheckResult]) -> String {
    let mut out = format!("{:<24} {:>6} {:>24} {:>10}  {}\n", "check", "status", "margin", "samples", "instance");
    for r in results {
        out.push_str(&format!(
            "{:<24} {:>6} {:>24} {:>10}  {}\n",
            r.name,
            if r.passed() { "pass" } else { "FAIL" },
            format_sig17(r.margin),
            r.samples,
            r.instance
        ));
    }
    out
}
