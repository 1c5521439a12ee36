//! Numerical checks of the inequalities and identities behind the constants.
//!
//! Every check returns a [`CheckResult`] whose `margin` is `bound − attained`
//! as computed; a check passes when the margin is at least `−PASS_TOLERANCE`.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::bounds::BoundsError;
use crate::config::ConfigError;
use crate::curves::CurveError;
use crate::poly::{PolyError, C64};
use crate::quadrature::QuadratureError;
use crate::spectrum::SpectrumError;

pub mod covering;
pub mod curvature;
pub mod growth;
pub mod instances;
pub mod potential;
pub mod suite;

pub use covering::rickman_cover_test;
pub use curvature::{
    change_of_coordinates_check, dufresnoy_margin, dufresnoy_small_area_margin,
    fs_formula_checks, landau_area_check, landau_margin, norm_equation_check, schottky_margin,
    sharpness_checks,
};
pub use growth::{remez_margin, three_circles_margin, RealPoly2, RemezInstance};
pub use potential::{
    cartan_exceptional_test, jensen_contradiction_check, jensen_residual_curve,
    jensen_residual_poly, log_derivative_margin, DiskMeasure, HarmonicProxy,
};
pub use suite::{default_manifest, run_manifest, Check, Manifest, SuiteError};

/// Margins at or above `−PASS_TOLERANCE` pass.
pub const PASS_TOLERANCE: f64 = 1e-9;
/// Points on a circle for trapezoid means.
pub const CIRCLE_MEAN_POINTS: usize = 2048;
/// Points on a circle for suprema, before refinement.
pub const CIRCLE_SUP_POINTS: usize = 4096;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("grid step {step:e} cannot resolve an exceptional budget of {budget:e}")]
    GridTooCoarse { step: f64, budget: f64 },
    #[error("area fraction estimate unstable: sampled {sampled} against {exact} from {samples} points")]
    UnstableFraction { sampled: f64, exact: f64, samples: usize },
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T, LabError> {
    Err(LabError::Precondition(msg.into()))
}

/// Whether `bound` and `attained` are plain values or natural logarithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Scale {
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    #[serde(serialize_with = "sig17")]
    pub margin: f64,
    #[serde(serialize_with = "sig17")]
    pub bound: f64,
    #[serde(serialize_with = "sig17")]
    pub attained: f64,
    pub scale: Scale,
    /// The point achieving the margin, when there is one.
    pub witness: Option<[f64; 2]>,
    /// Free-form description of the instance.
    pub instance: String,
    pub samples: u64,
}

fn sig17<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_sig17(*x))
}

/// 17 significant digits; `inf`, `-inf` and `nan` spelled out.
pub fn format_sig17(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:.16e}")
    }
}

impl CheckResult {
    pub fn linear(name: &str, bound: f64, attained: f64) -> Self {
        CheckResult {
            name: name.to_string(),
            margin: bound - attained,
            bound,
            attained,
            scale: Scale::Linear,
            witness: None,
            instance: String::new(),
            samples: 1,
        }
    }

    /// `bound` and `attained` are natural logarithms.
    pub fn log(name: &str, ln_bound: f64, ln_attained: f64) -> Self {
        let margin = if ln_attained == f64::NEG_INFINITY {
            f64::INFINITY
        } else {
            ln_bound - ln_attained
        };
        CheckResult { scale: Scale::Log, margin, ..Self::linear(name, ln_bound, ln_attained) }
    }

    pub fn with_witness(mut self, z: C64) -> Self {
        self.witness = Some([z.re, z.im]);
        self
    }

    pub fn with_instance(mut self, instance: impl Into<String>) -> Self {
        self.instance = instance.into();
        self
    }

    pub fn with_samples(mut self, samples: u64) -> Self {
        self.samples = samples;
        self
    }

    pub fn passed(&self) -> bool {
        self.margin >= -PASS_TOLERANCE
    }
}

/// Keeps the result with the smallest margin, NaN first.
pub(crate) fn worst(results: impl IntoIterator<Item = CheckResult>) -> Option<CheckResult> {
    results.into_iter().reduce(|a, b| {
        if b.margin.is_nan() || (!a.margin.is_nan() && b.margin < a.margin) {
            b
        } else {
            a
        }
    })
}

/// Maximum of `g` on `|z| = radius`: a sampled maximum refined by golden-section
/// search on the bracketing arc.
pub fn circle_sup<G: Fn(C64) -> f64>(g: &G, radius: f64) -> (f64, C64) {
    let n = CIRCLE_SUP_POINTS;
    let at = |theta: f64| g(C64::from_polar(radius, theta));
    let mut best = (f64::NEG_INFINITY, 0.0);
    for k in 0..n {
        let theta = TAU * k as f64 / n as f64;
        let v = at(theta);
        if v > best.0 || v.is_nan() {
            best = (v, theta);
        }
    }
    if radius == 0.0 || best.0.is_nan() {
        return (best.0, C64::from_polar(radius, best.1));
    }
    let step = TAU / n as f64;
    let (theta, value) = golden_max(&at, best.1 - step, best.1 + step);
    if value > best.0 {
        best = (value, theta);
    }
    (best.0, C64::from_polar(radius, best.1))
}

/// Golden-section search for a maximum of `h` on `[a, b]`.
pub(crate) fn golden_max<H: Fn(f64) -> f64>(h: &H, mut a: f64, mut b: f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut hc, mut hd) = (h(c), h(d));
    for _ in 0..80 {
        if hc > hd {
            b = d;
            d = c;
            hd = hc;
            c = b - ratio * (b - a);
            hc = h(c);
        } else {
            a = c;
            c = d;
            hc = hd;
            d = a + ratio * (b - a);
            hd = h(d);
        }
    }
    if hc > hd { (c, hc) } else { (d, hd) }
}

/// Uniform point in the disc `D(center, radius)`.
pub fn uniform_in_disc<R: Rng>(rng: &mut R, center: C64, radius: f64) -> C64 {
    let r = radius * rng.gen::<f64>().sqrt();
    center + C64::from_polar(r, TAU * rng.gen::<f64>())
}

/// Complex number with both parts uniform in `[-1, 1)`.
pub fn uniform_complex<R: Rng>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Lanczos approximation of `Γ(x)` for real `x`, with reflection below 1/2.
pub fn gamma(x: f64) -> f64 {
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * acc
}

/// `Γ(1/4)⁴ / (4π²) ≈ 4.3769`. Documentation only; the bounds never use it.
pub fn quarter_gamma_constant() -> f64 {
    gamma(0.25).powi(4) / (4.0 * PI * PI)
}
