//! Hyperplane configurations in projective n-space.
//!
//! A hyperplane is stored through its unit-norm coefficient vector. A
//! configuration is only constructed once every `(n+1)`-subset has been
//! certified linearly independent with singular-value margin above
//! [`GENERAL_POSITION_EPS`].

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::C64;
use crate::spectrum::{hermitian_eigenvalues, HermitianMatrix};

/// Smallest admissible singular value of any stacked `(n+1)`-subset.
pub const GENERAL_POSITION_EPS: f64 = 1e-10;
/// Unit-norm tolerance after normalization.
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("malformed configuration document: {0}")]
    Malformed(String),
    #[error("dimension must be positive")]
    ZeroDimension,
    #[error("hyperplane {index} has a zero coefficient vector")]
    ZeroVector { index: usize },
    #[error("hyperplane {index} has {found} coefficients, expected {expected}")]
    DimensionMismatch { index: usize, expected: usize, found: usize },
    #[error("{found} hyperplanes given, at least {required} required")]
    TooFewHyperplanes { found: usize, required: usize },
    #[error("hyperplanes {subset:?} are not in general position (smallest singular value {margin:e})")]
    GeneralPosition { subset: Vec<usize>, margin: f64 },
}

impl ConfigError {
    /// True for errors that describe a degenerate configuration rather than bad input.
    pub fn is_degenerate(&self) -> bool {
        matches!(self, ConfigError::GeneralPosition { .. })
    }
}

/// A hyperplane `a_0 X_0 + … + a_n X_n = 0` with `Σ|a_k|² = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<[f64; 2]>", try_from = "Vec<[f64; 2]>")]
pub struct Hyperplane {
    coeffs: Vec<C64>,
}

impl TryFrom<Vec<[f64; 2]>> for Hyperplane {
    type Error = ConfigError;

    fn try_from(raw: Vec<[f64; 2]>) -> Result<Self, Self::Error> {
        let v: Vec<C64> = raw.into_iter().map(|[re, im]| C64::new(re, im)).collect();
        normalize(&v)
    }
}

impl From<Hyperplane> for Vec<[f64; 2]> {
    fn from(h: Hyperplane) -> Self {
        h.coeffs.iter().map(|c| [c.re, c.im]).collect()
    }
}

impl Hyperplane {
    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// The `n` of the ambient projective space.
    pub fn dimension(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `H(w) = Σ a_k w_k`.
    pub fn apply(&self, w: &[C64]) -> C64 {
        self.coeffs.iter().zip(w).map(|(a, x)| a * x).sum()
    }

    /// The hyperplane of `P¹` cut out by a finite point: `a ↦ (−a, 1)/√(1+|a|²)`.
    pub fn from_point(a: C64) -> Self {
        normalize(&[-a, C64::new(1.0, 0.0)]).expect("nonzero by construction")
    }

    /// The point at infinity of `P¹`: `(1, 0)`.
    pub fn infinity() -> Self {
        Hyperplane { coeffs: vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)] }
    }

    /// The coordinate hyperplane `X_k = 0` in `P^n`.
    pub fn coordinate(n: usize, k: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); n + 1];
        coeffs[k] = C64::new(1.0, 0.0);
        Hyperplane { coeffs }
    }

    /// Multiplies every coefficient by `e^{iθ}`; the hyperplane is unchanged.
    pub fn rotate_phase(&self, theta: f64) -> Self {
        let u = C64::from_polar(1.0, theta);
        Hyperplane { coeffs: self.coeffs.iter().map(|&a| a * u).collect() }
    }
}

/// Scales a nonzero coefficient vector to unit Euclidean norm.
pub fn normalize(raw: &[C64]) -> Result<Hyperplane, ConfigError> {
    // hypot-style scaling avoids overflow for huge coefficients
    let big = raw.iter().map(|c| c.re.abs().max(c.im.abs())).fold(0.0, f64::max);
    if raw.is_empty() || big == 0.0 || !big.is_finite() {
        return Err(ConfigError::ZeroVector { index: 0 });
    }
    let scaled: Vec<C64> = raw.iter().map(|&c| c / big).collect();
    let norm = scaled.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let coeffs = scaled.into_iter().map(|c| c / norm).collect();
    Ok(Hyperplane { coeffs })
}

/// Smallest singular value over all `(n+1)`-subsets, with the subset attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct Margin {
    pub value: f64,
    pub subset: Vec<usize>,
}

/// All `k`-subsets of `0..len` in lexicographic order.
pub fn subsets(len: usize, k: usize) -> Vec<Vec<usize>> {
    (0..len).combinations(k).collect()
}

/// Smallest singular value of the stacked coefficient matrix of `rows`.
pub fn smallest_singular_value(rows: &[&[C64]]) -> f64 {
    let gram = HermitianMatrix::gram(rows);
    match hermitian_eigenvalues(&gram) {
        Ok(ev) => ev[0].max(0.0).sqrt(),
        Err(_) => 0.0,
    }
}

/// Minimum over all `(n+1)`-subsets of the smallest singular value.
///
/// Ties resolve to the lexicographically first subset, regardless of the
/// order in which subsets are evaluated.
pub fn general_position_margin(dimension: usize, hyperplanes: &[Hyperplane]) -> Margin {
    let k = dimension + 1;
    if hyperplanes.len() < k {
        return Margin { value: 0.0, subset: Vec::new() };
    }
    let all = subsets(hyperplanes.len(), k);
    let values: Vec<f64> = all
        .par_iter()
        .map(|s| {
            let rows: Vec<&[C64]> = s.iter().map(|&i| hyperplanes[i].coeffs()).collect();
            smallest_singular_value(&rows)
        })
        .collect();
    let (best, value) = values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    Margin { value, subset: all[best].clone() }
}

/// `n` plus `q ≥ n+1` hyperplanes in general position.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    dimension: usize,
    hyperplanes: Vec<Hyperplane>,
    gp_margin: f64,
}

impl Configuration {
    pub fn new(dimension: usize, hyperplanes: Vec<Hyperplane>) -> Result<Self, ConfigError> {
        if dimension == 0 {
            return Err(ConfigError::ZeroDimension);
        }
        for (index, h) in hyperplanes.iter().enumerate() {
            if h.coeffs.len() != dimension + 1 {
                return Err(ConfigError::DimensionMismatch {
                    index,
                    expected: dimension + 1,
                    found: h.coeffs.len(),
                });
            }
        }
        if hyperplanes.len() < dimension + 1 {
            return Err(ConfigError::TooFewHyperplanes {
                found: hyperplanes.len(),
                required: dimension + 1,
            });
        }
        let margin = general_position_margin(dimension, &hyperplanes);
        if margin.value <= GENERAL_POSITION_EPS {
            return Err(ConfigError::GeneralPosition {
                subset: margin.subset,
                margin: margin.value,
            });
        }
        Ok(Configuration { dimension, hyperplanes, gp_margin: margin.value })
    }

    /// Points of `P¹`, `None` standing for ∞.
    pub fn from_points(points: &[Option<C64>]) -> Result<Self, ConfigError> {
        let hyperplanes = points
            .iter()
            .map(|p| match p {
                Some(a) => Hyperplane::from_point(*a),
                None => Hyperplane::infinity(),
            })
            .collect();
        Configuration::new(1, hyperplanes)
    }

    /// The coordinate hyperplanes `X_0, …, X_n`.
    pub fn coordinate(n: usize) -> Self {
        Configuration::new(n, (0..=n).map(|k| Hyperplane::coordinate(n, k)).collect())
            .expect("coordinate hyperplanes are in general position")
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn hyperplanes(&self) -> &[Hyperplane] {
        &self.hyperplanes
    }

    pub fn len(&self) -> usize {
        self.hyperplanes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hyperplanes.is_empty()
    }

    pub fn gp_margin(&self) -> f64 {
        self.gp_margin
    }

    /// The sub-configuration formed by `indices`, in that order.
    pub fn restrict(&self, indices: &[usize]) -> Result<Self, ConfigError> {
        let hs = indices
            .iter()
            .map(|&i| {
                self.hyperplanes.get(i).cloned().ok_or_else(|| {
                    ConfigError::Malformed(format!("hyperplane index {i} out of range"))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Configuration::new(self.dimension, hs)
    }

    pub fn to_document(&self) -> ConfigurationDocument {
        ConfigurationDocument {
            dimension: self.dimension,
            hyperplanes: Some(
                self.hyperplanes.iter().map(|h| h.clone().into()).collect(),
            ),
            points: None,
        }
    }
}

/// A point of `P¹` in a configuration document: `[re, im]` or `"inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PointEntry {
    Finite([f64; 2]),
    Infinite(String),
}

/// On-disk form of a configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigurationDocument {
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hyperplanes: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<PointEntry>>,
}

impl ConfigurationDocument {
    pub fn into_configuration(self) -> Result<Configuration, ConfigError> {
        match (self.hyperplanes, self.points) {
            (Some(rows), None) => {
                let mut hs = Vec::with_capacity(rows.len());
                for (index, row) in rows.into_iter().enumerate() {
                    if row.len() != self.dimension + 1 {
                        return Err(ConfigError::DimensionMismatch {
                            index,
                            expected: self.dimension + 1,
                            found: row.len(),
                        });
                    }
                    let v: Vec<C64> = row.into_iter().map(|[re, im]| C64::new(re, im)).collect();
                    if v.iter().any(|c| !c.is_finite()) {
                        return Err(ConfigError::Malformed(format!(
                            "hyperplane {index} has a non-finite coefficient"
                        )));
                    }
                    hs.push(normalize(&v).map_err(|_| ConfigError::ZeroVector { index })?);
                }
                Configuration::new(self.dimension, hs)
            }
            (None, Some(points)) => {
                if self.dimension != 1 {
                    return Err(ConfigError::Malformed(
                        "\"points\" is only valid for dimension 1".into(),
                    ));
                }
                let parsed = points
                    .into_iter()
                    .map(|p| match p {
                        PointEntry::Finite([re, im]) if re.is_finite() && im.is_finite() => {
                            Ok(Some(C64::new(re, im)))
                        }
                        PointEntry::Infinite(s) if s.eq_ignore_ascii_case("inf") => Ok(None),
                        other => Err(ConfigError::Malformed(format!("bad point {other:?}"))),
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Configuration::from_points(&parsed)
            }
            (Some(_), Some(_)) => Err(ConfigError::Malformed(
                "give either \"hyperplanes\" or \"points\", not both".into(),
            )),
            (None, None) => Err(ConfigError::Malformed(
                "missing \"hyperplanes\" or \"points\"".into(),
            )),
        }
    }
}

/// Parses and certifies a configuration from its JSON text.
pub fn load_configuration(text: &str) -> Result<Configuration, ConfigError> {
    let doc: ConfigurationDocument =
        serde_json::from_str(text).map_err(|e| ConfigError::Malformed(e.to_string()))?;
    doc.into_configuration()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn normalize_examples() {
        let h = normalize(&[c(3.0, 0.0), c(4.0, 0.0)]).unwrap();
        assert!((h.coeffs()[0] - c(0.6, 0.0)).norm() < 1e-15);
        assert!((h.coeffs()[1] - c(0.8, 0.0)).norm() < 1e-15);
        let h = normalize(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(h.coeffs(), &[c(0.0, 0.0), c(1.0, 0.0)]);
        let h = normalize(&[c(-100.0, 0.0), c(1.0, 0.0)]).unwrap();
        let s = 10001f64.sqrt();
        assert!((h.coeffs()[0].re + 100.0 / s).abs() < 1e-15);
        assert!((h.coeffs()[1].re - 1.0 / s).abs() < 1e-15);
        assert!(matches!(normalize(&[c(0.0, 0.0); 3]), Err(ConfigError::ZeroVector { .. })));
    }

    #[test]
    fn identity_rows_have_unit_margin() {
        let cfg = load_configuration(r#"{"dimension":1,"hyperplanes":[[[1,0],[0,0]],[[0,0],[1,0]]]}"#)
            .unwrap();
        assert!((cfg.gp_margin() - 1.0).abs() < 1e-15);
        for n in 1..5 {
            assert!((Configuration::coordinate(n).gp_margin() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn proportional_rows_are_rejected_with_subset() {
        let err = load_configuration(r#"{"dimension":1,"hyperplanes":[[[1,0],[0,0]],[[2,0],[0,0]]]}"#)
            .unwrap_err();
        match err {
            ConfigError::GeneralPosition { subset, margin } => {
                assert_eq!(subset, vec![0, 1]);
                assert!(margin <= GENERAL_POSITION_EPS);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn points_zero_m_infinity() {
        let m = 100.0;
        let cfg = load_configuration(r#"{"dimension":1,"points":[[0,0],[100,0],"inf"]}"#).unwrap();
        assert_eq!(cfg.len(), 3);
        let s = (1.0f64 + m * m).sqrt();
        let rows = [[0.0, 1.0], [-m / s, 1.0 / s], [1.0, 0.0]];
        for (h, row) in cfg.hyperplanes().iter().zip(rows) {
            assert!((h.coeffs()[0].re - row[0]).abs() < 1e-15);
            assert!((h.coeffs()[1].re - row[1]).abs() < 1e-15);
        }
        // pairwise 2x2 determinants are nonzero
        for s in subsets(3, 2) {
            let a = &rows[s[0]];
            let b = &rows[s[1]];
            assert!((a[0] * b[1] - a[1] * b[0]).abs() > 1e-3);
        }
    }

    #[test]
    fn zero_one_infinity_margin() {
        let cfg = Configuration::from_points(&[Some(c(0.0, 0.0)), Some(c(1.0, 0.0)), None]).unwrap();
        let expected = (1.0 - FRAC_1_SQRT_2).sqrt();
        assert!((cfg.gp_margin() - expected).abs() < 1e-12);
        assert!((cfg.gp_margin() - 0.5412).abs() < 1e-4);
    }

    #[test]
    fn duplicate_hyperplane_margin_below_eps() {
        let hs = vec![
            Hyperplane::coordinate(2, 0),
            Hyperplane::coordinate(2, 1),
            Hyperplane::coordinate(2, 2),
            Hyperplane::coordinate(2, 1),
        ];
        let m = general_position_margin(2, &hs);
        assert!(m.value < GENERAL_POSITION_EPS);
        assert_eq!(m.subset, vec![0, 1, 3]);
        assert!(Configuration::new(2, hs).is_err());
    }

    #[test]
    fn malformed_documents() {
        assert!(matches!(load_configuration("{"), Err(ConfigError::Malformed(_))));
        assert!(matches!(
            load_configuration(r#"{"dimension":1,"hyperplanes":[[[1,0]],[[0,0],[1,0]]]}"#),
            Err(ConfigError::DimensionMismatch { index: 0, expected: 2, found: 1 })
        ));
        assert!(matches!(
            load_configuration(r#"{"dimension":1,"hyperplanes":[[[0,0],[0,0]],[[0,0],[1,0]]]}"#),
            Err(ConfigError::ZeroVector { index: 0 })
        ));
        assert!(matches!(
            load_configuration(r#"{"dimension":2,"points":[[0,0],"inf"]}"#),
            Err(ConfigError::Malformed(_))
        ));
        assert!(matches!(
            load_configuration(r#"{"dimension":1,"points":[[0,0],"infinity?"]}"#),
            Err(ConfigError::Malformed(_))
        ));
    }

    fn raw_vector(len: usize) -> impl Strategy<Value = Vec<C64>> {
        prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), len)
            .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
            .prop_map(|v| v.into_iter().map(|(a, b)| C64::new(a, b)).collect())
    }

    /// A random unitary matrix via Gram–Schmidt on random columns.
    fn unitary(raw: &[C64], n: usize) -> Vec<Vec<C64>> {
        let mut cols: Vec<Vec<C64>> = Vec::new();
        for k in 0..n {
            let mut v: Vec<C64> = (0..n).map(|r| raw[(k * n + r) % raw.len()] + if r == k { C64::new(3.0, 0.0) } else { C64::new(0.0, 0.0) }).collect();
            for u in &cols {
                let proj: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= proj * y;
                }
            }
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            cols.push(v.into_iter().map(|x| x / norm).collect());
        }
        cols
    }

    proptest! {
        #[test]
        fn normalization_is_idempotent(v in raw_vector(4)) {
            let once = normalize(&v).unwrap();
            let twice = normalize(once.coeffs()).unwrap();
            let norm: f64 = once.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!((norm - 1.0).abs() < NORM_TOL);
            for (a, b) in once.coeffs().iter().zip(twice.coeffs()) {
                prop_assert!((a - b).norm() <= 1e-15);
            }
        }

        #[test]
        fn margin_is_permutation_and_unitary_invariant(
            rows in prop::collection::vec(raw_vector(3), 5),
            perm_seed in 0usize..120,
            raw in raw_vector(9),
        ) {
            let hs: Vec<Hyperplane> = rows.iter().map(|r| normalize(r).unwrap()).collect();
            let base = general_position_margin(2, &hs).value;

            let mut order: Vec<usize> = (0..5).collect();
            let mut seed = perm_seed;
            for i in (1..5).rev() {
                order.swap(i, seed % (i + 1));
                seed /= i + 1;
            }
            let permuted: Vec<Hyperplane> = order.iter().map(|&i| hs[i].clone()).collect();
            // σ = √λ inherits the eigenvalue error ε‖A‖ amplified by 1/(2σ)
            let tol = 1e-14 + 1e-14 / base.max(1e-3);
            let diff = (general_position_margin(2, &permuted).value - base).abs();
            prop_assert!(diff <= tol, "diff {diff:e} base {base:e}");

            let u = unitary(&raw, 3);
            let moved: Vec<Hyperplane> = hs
                .iter()
                .map(|h| {
                    let w: Vec<C64> = (0..3)
                        .map(|k| (0..3).map(|j| h.coeffs()[j] * u[k][j]).sum())
                        .collect();
                    normalize(&w).unwrap()
                })
                .collect();
            let diff = (general_position_margin(2, &moved).value - base).abs();
            prop_assert!(diff <= 1e-10, "diff {diff:e} base {base:e}");
        }
    }
}
