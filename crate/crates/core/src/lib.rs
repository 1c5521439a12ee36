//! Effective hyperbolicity constants for complements of hyperplanes in general
//! position in `P^n`, and numerical experiments on holomorphic curves.

// `!(x < y)` is used on purpose so that NaN fails every precondition.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod config;
pub mod curves;
pub mod lab;
pub mod lognum;
pub mod poly;
pub mod quadrature;
pub mod spectrum;

pub use bounds::{
    hyperbolicity_report, landau_k, schottky_bound, BoundsError, HyperbolicityReport,
};
pub use config::{load_configuration, ConfigError, Configuration, Hyperplane};
pub use curves::{Curve, CurveError, CurveSpec, Family};
pub use lognum::LogNumber;
pub use poly::{Poly, C64};
pub use spectrum::{spectral_quantities, HermitianMatrix, SpectralQuantities, SpectrumError};
pub use lab::{default_manifest, run_manifest, Check, CheckResult, Manifest};
