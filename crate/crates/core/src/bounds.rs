//! Configuration constants `G`, `G#`, `B` and the explicit bounds built from them.
//!
//! For `2n+1` hyperplanes in general position in `P^n`:
//!
//! * `G  = max over (n+1)-subsets of max{ln Λ, ln(n+1) − ln λ}`
//! * `G# = min over (n+1)-subsets of 1/λ#`
//! * `B  = C(2n+1, n+1)`
//! * area bound `= 36 · E(B) · G` and `K = 12672 · E(B) · G · G#`, with
//!   `E(B) = (2.6·10⁷ ln B + 10⁸)^{6(4 ln B + 20)}`.
//!
//! Every logarithm in these formulas is natural. `K` and the area bound are
//! returned as [`LogNumber`]s since they overflow `f64` for every `n`.

use std::collections::HashMap;

use astro_float::{BigFloat, RoundingMode};
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{subsets, Configuration};
use crate::lognum::{big_from_decimal, big_ln, LogNumber, GUARD_BITS};
use crate::spectrum::{spectral_quantities, SpectralQuantities, SpectrumError};

const RM: RoundingMode = RoundingMode::ToEven;

pub const DEFAULT_PRECISION_BITS: usize = 200;
pub const MIN_PRECISION_BITS: usize = 64;
/// Leading factor of `K`.
pub const LANDAU_PREFACTOR: u64 = 12_672;
/// Leading factor of the area bound on `|z| < 1/32`.
pub const AREA_PREFACTOR: u64 = 36;
/// `LANDAU_PREFACTOR / AREA_PREFACTOR`.
pub const LANDAU_OVER_AREA: u64 = 352;
/// Largest number of `(2n+1)`-sub-configurations searched exhaustively.
pub const MAX_SELECTION_CANDIDATES: u64 = 100_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("{found} hyperplanes given; the bounds need at least 2n+1 = {required}")]
    TooFewHyperplanes { found: usize, required: usize },
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} = {value} is out of range {range}")]
    OutOfRange { name: &'static str, value: f64, range: &'static str },
    #[error("precision {bits} bits is below the minimum of {MIN_PRECISION_BITS}")]
    Precision { bits: usize },
    #[error("B = {0} is below 3")]
    SmallB(BigUint),
}

/// `C(2n+1, n+1)`, exact.
pub fn binomial_b(n: usize) -> BigUint {
    let k = n + 1;
    let m = 2 * n + 1;
    let mut acc = BigUint::from(1u32);
    // acc stays integral: acc = C(m - k + i, i) after step i
    for i in 1..=k {
        acc = acc * BigUint::from(m - k + i) / BigUint::from(i);
    }
    acc
}

/// Per-subset contributions to `G` and `G#`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetTerm {
    pub subset: Vec<usize>,
    pub quantities: SpectralQuantities,
    /// `max{ln Λ, ln(n+1) − ln λ}`
    pub g_term: f64,
    /// `1/λ#`
    pub inverse_lambda_sharp: f64,
}

impl SubsetTerm {
    fn new(subset: Vec<usize>, quantities: SpectralQuantities, n: usize) -> Self {
        let g_term = quantities
            .big_lambda
            .ln()
            .max(((n + 1) as f64).ln() - quantities.lambda.ln());
        let inverse_lambda_sharp = 1.0 / quantities.lambda_sharp;
        SubsetTerm { subset, quantities, g_term, inverse_lambda_sharp }
    }
}

/// An extreme value together with the subset attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Extreme {
    pub value: f64,
    pub subset: Vec<usize>,
}

fn check_size(c: &Configuration) -> Result<usize, BoundsError> {
    let required = 2 * c.dimension() + 1;
    if c.len() < required {
        return Err(BoundsError::TooFewHyperplanes { found: c.len(), required });
    }
    Ok(required)
}

fn table_for(c: &Configuration, indices: &[usize]) -> Result<Vec<SubsetTerm>, BoundsError> {
    let n = c.dimension();
    let local = subsets(indices.len(), n + 1);
    local
        .par_iter()
        .map(|s| {
            let subset: Vec<usize> = s.iter().map(|&i| indices[i]).collect();
            let q = spectral_quantities(c, &subset)?;
            Ok(SubsetTerm::new(subset, q, n))
        })
        .collect()
}

/// Spectral table over every `(n+1)`-subset of the first `2n+1` hyperplanes.
pub fn subset_table(c: &Configuration) -> Result<Vec<SubsetTerm>, BoundsError> {
    let required = check_size(c)?;
    let indices: Vec<usize> = (0..required).collect();
    table_for(c, &indices)
}

// First maximum (resp. minimum) in table order wins ties.
fn g_from_table(table: &[SubsetTerm]) -> Extreme {
    let best = table
        .iter()
        .fold(None::<&SubsetTerm>, |acc, t| match acc {
            Some(a) if a.g_term >= t.g_term => Some(a),
            _ => Some(t),
        })
        .expect("nonempty table");
    Extreme { value: best.g_term, subset: best.subset.clone() }
}

fn g_sharp_from_table(table: &[SubsetTerm]) -> Extreme {
    let best = table
        .iter()
        .fold(None::<&SubsetTerm>, |acc, t| match acc {
            Some(a) if a.inverse_lambda_sharp <= t.inverse_lambda_sharp => Some(a),
            _ => Some(t),
        })
        .expect("nonempty table");
    Extreme { value: best.inverse_lambda_sharp, subset: best.subset.clone() }
}

/// `G` over the first `2n+1` hyperplanes, with the maximizing subset.
pub fn constant_g(c: &Configuration) -> Result<Extreme, BoundsError> {
    Ok(g_from_table(&subset_table(c)?))
}

/// `G#` over the first `2n+1` hyperplanes, with the minimizing subset.
pub fn constant_g_sharp(c: &Configuration) -> Result<Extreme, BoundsError> {
    Ok(g_sharp_from_table(&subset_table(c)?))
}

fn check_precision(bits: usize) -> Result<(), BoundsError> {
    if bits < MIN_PRECISION_BITS {
        return Err(BoundsError::Precision { bits });
    }
    Ok(())
}

/// `ln E(B) = 6(4 ln B + 20) · ln(2.6·10⁷ ln B + 10⁸)` at `p` bits.
fn ln_growth_factor(b: &BigUint, p: usize) -> Result<BigFloat, BoundsError> {
    if *b < BigUint::from(3u32) {
        return Err(BoundsError::SmallB(b.clone()));
    }
    let w = p + GUARD_BITS;
    let ln_b = big_ln(&big_from_decimal(&b.to_string(), w), w);
    let exponent = ln_b
        .mul(&BigFloat::from_u64(4, w), w, RM)
        .add(&BigFloat::from_u64(20, w), w, RM)
        .mul(&BigFloat::from_u64(6, w), w, RM);
    let base = ln_b
        .mul(&BigFloat::from_u64(26_000_000, w), w, RM)
        .add(&BigFloat::from_u64(100_000_000, w), w, RM);
    Ok(exponent.mul(&big_ln(&base, w), w, RM))
}

fn ln_of(x: f64, name: &'static str, p: usize) -> Result<BigFloat, BoundsError> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(BoundsError::NonPositive { name, value: x });
    }
    Ok(big_ln(&BigFloat::from_f64(x, p), p))
}

/// `K = 12672 · E(B) · G · G#`.
pub fn landau_k(g: f64, g_sharp: f64, b: &BigUint, precision: usize) -> Result<LogNumber, BoundsError> {
    check_precision(precision)?;
    if !(g_sharp >= 1.0) {
        return Err(BoundsError::OutOfRange { name: "G#", value: g_sharp, range: "[1, ∞)" });
    }
    let w = precision + GUARD_BITS;
    let ln = big_ln(&BigFloat::from_u64(LANDAU_PREFACTOR, w), w)
        .add(&ln_growth_factor(b, precision)?, w, RM)
        .add(&ln_of(g, "G", w)?, w, RM)
        .add(&ln_of(g_sharp, "G#", w)?, w, RM);
    Ok(LogNumber::from_ln(ln, precision))
}

/// Upper bound for `∫_{|z|<1/32} (f#)² dA/π`: `36 · E(B) · G`.
pub fn area_bound(g: f64, b: &BigUint, precision: usize) -> Result<LogNumber, BoundsError> {
    check_precision(precision)?;
    let w = precision + GUARD_BITS;
    let ln = big_ln(&BigFloat::from_u64(AREA_PREFACTOR, w), w)
        .add(&ln_growth_factor(b, precision)?, w, RM)
        .add(&ln_of(g, "G", w)?, w, RM);
    Ok(LogNumber::from_ln(ln, precision))
}

/// Upper bound for `ln(1/δ_j(z))`: `(16 ln(1/δ_j(0)) + 8K²) / (1 − |z|)`.
pub fn schottky_bound(delta0: f64, k: &LogNumber, z_abs: f64) -> Result<LogNumber, BoundsError> {
    if !(delta0 > 0.0 && delta0 <= 1.0) {
        return Err(BoundsError::OutOfRange { name: "delta0", value: delta0, range: "(0, 1]" });
    }
    if !(0.0..1.0).contains(&z_abs) {
        return Err(BoundsError::OutOfRange { name: "|z|", value: z_abs, range: "[0, 1)" });
    }
    let p = k.precision();
    let eight_k_squared = k
        .pow(&BigFloat::from_u64(2, p))
        .mul(&LogNumber::from_f64(8.0, p).expect("positive"));
    let log_term = -delta0.ln();
    let bracket = match LogNumber::from_f64(16.0 * log_term, p) {
        Some(t) => eight_k_squared.add(&t),
        None => eight_k_squared,
    };
    let shrink = LogNumber::from_f64(1.0 - z_abs, p).expect("positive");
    Ok(bracket.div(&shrink))
}

/// How the `2n+1` hyperplanes fed to the bounds were chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// Exactly `2n+1` hyperplanes were given.
    All,
    /// Exhaustive search minimizing `G · G#` over this many candidates.
    Exhaustive { candidates: u64 },
    /// Too many candidates; the first `2n+1` were used.
    FirstOnly { candidates: u64 },
}

#[derive(Debug, Clone)]
pub struct HyperbolicityReport {
    pub dimension: usize,
    /// Indices (into the input configuration) of the `2n+1` hyperplanes used.
    pub selected: Vec<usize>,
    pub selection: Selection,
    pub b: BigUint,
    pub g: Extreme,
    pub g_sharp: Extreme,
    pub area_bound: LogNumber,
    pub k: LogNumber,
    pub per_subset: Vec<SubsetTerm>,
    pub precision_bits: usize,
    pub warnings: Vec<String>,
}

fn binomial_u64(n: u64, k: u64) -> u64 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc * (n - k + i) as u128 / i as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Runs the full constant pipeline on a configuration with `q ≥ 2n+1` hyperplanes.
pub fn hyperbolicity_report(c: &Configuration, precision: usize) -> Result<HyperbolicityReport, BoundsError> {
    check_precision(precision)?;
    let required = check_size(c)?;
    let n = c.dimension();
    let q = c.len();
    let mut warnings = Vec::new();

    let (selected, selection, table) = if q == required {
        let idx: Vec<usize> = (0..q).collect();
        let table = table_for(c, &idx)?;
        (idx, Selection::All, table)
    } else {
        let candidates = binomial_u64(q as u64, required as u64);
        if candidates > MAX_SELECTION_CANDIDATES {
            warnings.push(format!(
                "{candidates} candidate sub-configurations exceed {MAX_SELECTION_CANDIDATES}; using the first {required} hyperplanes"
            ));
            let idx: Vec<usize> = (0..required).collect();
            let table = table_for(c, &idx)?;
            (idx, Selection::FirstOnly { candidates }, table)
        } else {
            let all: Vec<usize> = (0..q).collect();
            let full = table_for(c, &all)?;
            let lookup: HashMap<&[usize], &SubsetTerm> =
                full.iter().map(|t| (t.subset.as_slice(), t)).collect();
            let mut best: Option<(f64, Vec<usize>)> = None;
            for choice in subsets(q, required) {
                let local: Vec<SubsetTerm> = subsets(required, n + 1)
                    .into_iter()
                    .map(|s| {
                        let key: Vec<usize> = s.iter().map(|&i| choice[i]).collect();
                        (*lookup[key.as_slice()]).clone()
                    })
                    .collect();
                let score = g_from_table(&local).value * g_sharp_from_table(&local).value;
                if best.as_ref().is_none_or(|(b, _)| score < *b) {
                    best = Some((score, choice));
                }
            }
            let (_, idx) = best.expect("at least one candidate");
            let table = table_for(c, &idx)?;
            (idx, Selection::Exhaustive { candidates }, table)
        }
    };

    let g = g_from_table(&table);
    let g_sharp = g_sharp_from_table(&table);
    let b = binomial_b(n);
    let k = landau_k(g.value, g_sharp.value, &b, precision)?;
    let area = area_bound(g.value, &b, precision)?;
    Ok(HyperbolicityReport {
        dimension: n,
        selected,
        selection,
        b,
        g,
        g_sharp,
        area_bound: area,
        k,
        per_subset: table,
        precision_bits: precision,
        warnings,
    })
}

/// JSON form of a [`HyperbolicityReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub struct ReportDocument {
    pub dimension: usize,
    pub log_base: String,
    pub precision_bits: usize,
    pub selected: Vec<usize>,
    pub selection: Selection,
    #[serde(rename = "B")]
    pub b: String,
    #[serde(rename = "G")]
    pub g: String,
    #[serde(rename = "G_argmax")]
    pub g_argmax: Vec<usize>,
    #[serde(rename = "G_sharp")]
    pub g_sharp: String,
    #[serde(rename = "G_sharp_argmin")]
    pub g_sharp_argmin: Vec<usize>,
    pub ln_area_bound: String,
    pub log10_area_bound: String,
    #[serde(rename = "ln_K")]
    pub ln_k: String,
    #[serde(rename = "log10_K")]
    pub log10_k: String,
    pub per_subset: Vec<SubsetRow>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetRow {
    pub subset: Vec<usize>,
    pub eigenvalues: Vec<String>,
    pub lambda: String,
    #[serde(rename = "Lambda")]
    pub big_lambda: String,
    pub lambda_sharp: String,
    #[serde(rename = "Lambda_sharp")]
    pub big_lambda_sharp: String,
    pub g_term: String,
}

/// 17 significant digits, the round-trip precision of `f64`.
pub fn format_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

impl HyperbolicityReport {
    pub fn to_document(&self) -> ReportDocument {
        ReportDocument {
            dimension: self.dimension,
            log_base: "natural".into(),
            precision_bits: self.precision_bits,
            selected: self.selected.clone(),
            selection: self.selection.clone(),
            b: self.b.to_string(),
            g: format_f64(self.g.value),
            g_argmax: self.g.subset.clone(),
            g_sharp: format_f64(self.g_sharp.value),
            g_sharp_argmin: self.g_sharp.subset.clone(),
            ln_area_bound: self.area_bound.ln_decimal(),
            log10_area_bound: self.area_bound.log10_decimal(),
            ln_k: self.k.ln_decimal(),
            log10_k: self.k.log10_decimal(),
            per_subset: self
                .per_subset
                .iter()
                .map(|t| SubsetRow {
                    subset: t.subset.clone(),
                    eigenvalues: t.quantities.eigenvalues.iter().map(|&v| format_f64(v)).collect(),
                    lambda: format_f64(t.quantities.lambda),
                    big_lambda: format_f64(t.quantities.big_lambda),
                    lambda_sharp: format_f64(t.quantities.lambda_sharp),
                    big_lambda_sharp: format_f64(t.quantities.big_lambda_sharp),
                    g_term: format_f64(t.g_term),
                })
                .collect(),
            warnings: self.warnings.clone(),
        }
    }
}
