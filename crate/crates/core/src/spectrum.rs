//! Spectra of `AA*` for `(n+1)`-subsets of a configuration.
//!
//! `A` stacks the unit coefficient vectors of the chosen hyperplanes as rows,
//! so `AA*` is the Gram matrix of those vectors. Its eigenvalues, smallest
//! first, give the four quantities that drive every constant downstream:
//!
//! * `lambda = λ₀` and `big_lambda = λₙ`,
//! * `lambda_sharp = √(λ₀λ₁)/λₙ` and `big_lambda_sharp = √(λₙ₋₁λₙ)/λ₀`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{Configuration, GENERAL_POSITION_EPS};
use crate::poly::C64;

/// Hermitian symmetry tolerance on entries.
pub const HERMITIAN_TOL: f64 = 1e-13;
const MAX_SWEEPS: usize = 50;
const SWEEP_TOL: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("matrix is not Hermitian: |a[{row}][{col}] - conj(a[{col}][{row}])| = {defect:e}")]
    NotHermitian { row: usize, col: usize, defect: f64 },
    #[error("expected {expected} entries for an order-{order} matrix, found {found}")]
    Shape { order: usize, expected: usize, found: usize },
    #[error("subset must contain {expected} indices, found {found}")]
    SubsetSize { expected: usize, found: usize },
    #[error("duplicate index {index} in subset")]
    DuplicateIndex { index: usize },
    #[error("index {index} out of range for {len} hyperplanes")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("subset {subset:?} is degenerate: smallest eigenvalue {lambda:e}")]
    Degenerate { subset: Vec<usize>, lambda: f64 },
    #[error("Jacobi iteration did not converge in {sweeps} sweeps (off-diagonal {off_diagonal:e})")]
    NotConverged { sweeps: usize, off_diagonal: f64 },
}

/// Dense Hermitian matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    order: usize,
    entries: Vec<C64>,
}

impl HermitianMatrix {
    pub fn from_entries(order: usize, entries: Vec<C64>) -> Result<Self, SpectrumError> {
        if entries.len() != order * order {
            return Err(SpectrumError::Shape {
                order,
                expected: order * order,
                found: entries.len(),
            });
        }
        for row in 0..order {
            for col in row..order {
                let a = entries[row * order + col];
                let b = entries[col * order + row];
                let defect = (a - b.conj()).norm();
                if defect > HERMITIAN_TOL {
                    return Err(SpectrumError::NotHermitian { row, col, defect });
                }
            }
        }
        Ok(HermitianMatrix { order, entries })
    }

    pub fn identity(order: usize) -> Self {
        Self::diagonal(&vec![1.0; order])
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let order = values.len();
        let mut entries = vec![C64::new(0.0, 0.0); order * order];
        for (k, &v) in values.iter().enumerate() {
            entries[k * order + k] = C64::new(v, 0.0);
        }
        HermitianMatrix { order, entries }
    }

    /// `AA*` for the matrix whose rows are `rows`.
    pub fn gram(rows: &[&[C64]]) -> Self {
        let order = rows.len();
        let mut entries = vec![C64::new(0.0, 0.0); order * order];
        for j in 0..order {
            for k in j..order {
                let inner: C64 = rows[j]
                    .iter()
                    .zip(rows[k])
                    .map(|(a, b)| a * b.conj())
                    .sum();
                entries[j * order + k] = inner;
                entries[k * order + j] = inner.conj();
            }
            entries[j * order + j].im = 0.0;
        }
        HermitianMatrix { order, entries }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.order + col]
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn trace(&self) -> f64 {
        (0..self.order).map(|k| self.get(k, k).re).sum()
    }
}

/// Result of a cyclic Jacobi run.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiOutcome {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub sweeps: usize,
    /// Frobenius norm of the off-diagonal part of the final rotated matrix.
    pub off_diagonal: f64,
}

fn off_diagonal_norm(a: &[C64], n: usize) -> f64 {
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[r * n + c].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi for complex Hermitian matrices.
///
/// Each rotation first removes the phase of the pivot `a[p][q]` and then
/// applies the classical real rotation. Sweeps stop once the off-diagonal
/// Frobenius mass falls below `1e-14` times the matrix norm.
pub fn jacobi(m: &HermitianMatrix) -> Result<JacobiOutcome, SpectrumError> {
    let n = m.order;
    let mut a = m.entries.clone();
    let scale = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let threshold = SWEEP_TOL * scale;
    let mut sweeps = 0;
    let mut off = off_diagonal_norm(&a, n);
    while off > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(SpectrumError::NotConverged { sweeps, off_diagonal: off });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, n, p, q);
            }
        }
        off = off_diagonal_norm(&a, n);
    }
    let mut eigenvalues: Vec<f64> = (0..n).map(|k| a[k * n + k].re).collect();
    eigenvalues.sort_by(|x, y| x.total_cmp(y));
    Ok(JacobiOutcome { eigenvalues, sweeps, off_diagonal: off })
}

fn rotate(a: &mut [C64], n: usize, p: usize, q: usize) {
    let apq = a[p * n + q];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let phase = apq / b;
    let alpha = a[p * n + p].re;
    let gamma = a[q * n + q].re;
    let theta = (gamma - alpha) / (2.0 * b);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let phase_conj = phase.conj();

    // A <- A U
    for r in 0..n {
        let arp = a[r * n + p];
        let arq = a[r * n + q];
        a[r * n + p] = arp * c - arq * phase_conj * s;
        a[r * n + q] = arp * s + arq * phase_conj * c;
    }
    // A <- U* A
    for col in 0..n {
        let apc = a[p * n + col];
        let aqc = a[q * n + col];
        a[p * n + col] = apc * c - aqc * phase * s;
        a[q * n + col] = apc * s + aqc * phase * c;
    }
    a[p * n + q] = C64::new(0.0, 0.0);
    a[q * n + p] = C64::new(0.0, 0.0);
    a[p * n + p] = C64::new(alpha - t * b, 0.0);
    a[q * n + q] = C64::new(gamma + t * b, 0.0);
}

/// Eigenvalues of a Hermitian matrix in nondecreasing order.
pub fn hermitian_eigenvalues(m: &HermitianMatrix) -> Result<Vec<f64>, SpectrumError> {
    jacobi(m).map(|o| o.eigenvalues)
}

/// Checks that `subset` has `expected` distinct in-range indices.
pub(crate) fn validate_subset(
    subset: &[usize],
    expected: usize,
    len: usize,
) -> Result<(), SpectrumError> {
    if subset.len() != expected {
        return Err(SpectrumError::SubsetSize { expected, found: subset.len() });
    }
    for (i, &index) in subset.iter().enumerate() {
        if index >= len {
            return Err(SpectrumError::IndexOutOfRange { index, len });
        }
        if subset[..i].contains(&index) {
            return Err(SpectrumError::DuplicateIndex { index });
        }
    }
    Ok(())
}

/// `AA*` for the hyperplanes of `c` selected by `subset`.
pub fn gram_of_subset(c: &Configuration, subset: &[usize]) -> Result<HermitianMatrix, SpectrumError> {
    validate_subset(subset, c.dimension() + 1, c.len())?;
    let rows: Vec<&[C64]> = subset.iter().map(|&i| c.hyperplanes()[i].coeffs()).collect();
    Ok(HermitianMatrix::gram(&rows))
}

/// The four spectral quantities of one `(n+1)`-subset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralQuantities {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    pub lambda: f64,
    pub big_lambda: f64,
    pub lambda_sharp: f64,
    pub big_lambda_sharp: f64,
}

impl SpectralQuantities {
    /// From ascending eigenvalues (at least two).
    pub fn from_eigenvalues(eigenvalues: Vec<f64>) -> Self {
        let n = eigenvalues.len() - 1;
        let l0 = eigenvalues[0];
        let l1 = eigenvalues[1];
        let ln = eigenvalues[n];
        let ln1 = eigenvalues[n - 1];
        SpectralQuantities {
            lambda: l0,
            big_lambda: ln,
            lambda_sharp: (l0 * l1).sqrt() / ln,
            big_lambda_sharp: (ln1 * ln).sqrt() / l0,
            eigenvalues,
        }
    }
}

pub fn spectral_quantities(
    c: &Configuration,
    subset: &[usize],
) -> Result<SpectralQuantities, SpectrumError> {
    let gram = gram_of_subset(c, subset)?;
    let eigenvalues = hermitian_eigenvalues(&gram)?;
    if eigenvalues[0] <= GENERAL_POSITION_EPS * GENERAL_POSITION_EPS {
        return Err(SpectrumError::Degenerate {
            subset: subset.to_vec(),
            lambda: eigenvalues[0],
        });
    }
    Ok(SpectralQuantities::from_eigenvalues(eigenvalues))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{normalize, Configuration};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn closed_form_2x2(a: f64, d: f64, b: C64) -> (f64, f64) {
        let mean = 0.5 * (a + d);
        let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        (mean - radius, mean + radius)
    }

    /// Complex LU with partial pivoting, independent of the eigensolver.
    fn determinant(m: &HermitianMatrix) -> C64 {
        let n = m.order();
        let mut a = m.entries().to_vec();
        let mut det = c(1.0, 0.0);
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x * n + col].norm().total_cmp(&a[y * n + col].norm()))
                .unwrap();
            if pivot != col {
                for k in 0..n {
                    a.swap(col * n + k, pivot * n + k);
                }
                det = -det;
            }
            let d = a[col * n + col];
            det *= d;
            for r in (col + 1)..n {
                let f = a[r * n + col] / d;
                for k in col..n {
                    let v = a[col * n + k];
                    a[r * n + k] -= f * v;
                }
            }
        }
        det
    }

    fn pair_config() -> Configuration {
        let h0 = normalize(&[c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let h1 = normalize(&[c(-1.0, 0.0), c(1.0, 0.0)]).unwrap();
        Configuration::new(1, vec![h0, h1]).unwrap()
    }

    #[test]
    fn identity_and_diagonal_spectra() {
        assert_eq!(hermitian_eigenvalues(&HermitianMatrix::identity(3)).unwrap(), vec![1.0; 3]);
        assert_eq!(
            hermitian_eigenvalues(&HermitianMatrix::diagonal(&[2.0, 5.0, 3.0])).unwrap(),
            vec![2.0, 3.0, 5.0]
        );
    }

    #[test]
    fn gram_of_the_zero_one_pair() {
        let g = gram_of_subset(&pair_config(), &[0, 1]).unwrap();
        assert!((g.get(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((g.get(0, 1) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((g.get(1, 0) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((g.trace() - 2.0).abs() < 1e-12);
        let ev = hermitian_eigenvalues(&g).unwrap();
        assert!((ev[0] - (1.0 - FRAC_1_SQRT_2)).abs() < 1e-12);
        assert!((ev[1] - (1.0 + FRAC_1_SQRT_2)).abs() < 1e-12);
    }

    #[test]
    fn spectral_quantities_of_the_pair() {
        let q = spectral_quantities(&pair_config(), &[0, 1]).unwrap();
        let l0 = 1.0 - FRAC_1_SQRT_2;
        let l1 = 1.0 + FRAC_1_SQRT_2;
        assert!((q.lambda - l0).abs() < 1e-12);
        assert!((q.big_lambda - l1).abs() < 1e-12);
        assert!((q.lambda_sharp - 0.5f64.sqrt() / l1).abs() < 1e-12);
        assert!((q.big_lambda_sharp - 0.5f64.sqrt() / l0).abs() < 1e-12);
        assert!((q.lambda_sharp - 0.41421).abs() < 1e-5);
        assert!((q.big_lambda_sharp - 2.41421).abs() < 1e-5);
    }

    #[test]
    fn coordinate_hyperplanes_have_unit_quantities() {
        for n in 1..5 {
            let hs = (0..=n)
                .map(|k| {
                    let mut v = vec![c(0.0, 0.0); n + 1];
                    v[k] = c(1.0, 0.0);
                    normalize(&v).unwrap()
                })
                .collect();
            let cfg = Configuration::new(n, hs).unwrap();
            let subset: Vec<usize> = (0..=n).collect();
            let q = spectral_quantities(&cfg, &subset).unwrap();
            for v in [q.lambda, q.big_lambda, q.lambda_sharp, q.big_lambda_sharp] {
                assert!((v - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn subset_errors() {
        let cfg = pair_config();
        assert_eq!(
            gram_of_subset(&cfg, &[0, 0]),
            Err(SpectrumError::DuplicateIndex { index: 0 })
        );
        assert_eq!(
            gram_of_subset(&cfg, &[0, 2]),
            Err(SpectrumError::IndexOutOfRange { index: 2, len: 2 })
        );
    }

    #[test]
    fn non_hermitian_rejected() {
        let e = vec![c(1.0, 0.0), c(0.5, 0.0), c(0.4, 0.0), c(1.0, 0.0)];
        assert!(matches!(
            HermitianMatrix::from_entries(2, e),
            Err(SpectrumError::NotHermitian { .. })
        ));
    }

    #[test]
    fn unimodular_row_scaling_leaves_quantities_unchanged() {
        let base = pair_config();
        let rotated = normalize(
            &base.hyperplanes()[1]
                .coeffs()
                .iter()
                .map(|&a| a * C64::from_polar(1.0, 1.234))
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let cfg = Configuration::new(1, vec![base.hyperplanes()[0].clone(), rotated]).unwrap();
        let a = spectral_quantities(&base, &[0, 1]).unwrap();
        let b = spectral_quantities(&cfg, &[0, 1]).unwrap();
        assert!((a.lambda - b.lambda).abs() < 1e-12);
        assert!((a.big_lambda - b.big_lambda).abs() < 1e-12);
        assert!((a.lambda_sharp - b.lambda_sharp).abs() < 1e-12);
        assert!((a.big_lambda_sharp - b.big_lambda_sharp).abs() < 1e-12);
    }

    fn complex_entry() -> impl Strategy<Value = C64> {
        (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im))
    }

    fn random_hermitian(order: usize) -> impl Strategy<Value = HermitianMatrix> {
        prop::collection::vec(complex_entry(), order * order).prop_map(move |raw| {
            let mut e = vec![C64::new(0.0, 0.0); order * order];
            for r in 0..order {
                for col in r..order {
                    let v = raw[r * order + col];
                    if r == col {
                        e[r * order + col] = C64::new(v.re, 0.0);
                    } else {
                        e[r * order + col] = v;
                        e[col * order + r] = v.conj();
                    }
                }
            }
            HermitianMatrix::from_entries(order, e).unwrap()
        })
    }

    proptest! {
        #[test]
        fn jacobi_matches_closed_form_2x2(m in random_hermitian(2)) {
            let (lo, hi) = closed_form_2x2(m.get(0, 0).re, m.get(1, 1).re, m.get(0, 1));
            let ev = hermitian_eigenvalues(&m).unwrap();
            prop_assert!((ev[0] - lo).abs() < 1e-13);
            prop_assert!((ev[1] - hi).abs() < 1e-13);
        }

        #[test]
        fn eigenvalue_sum_and_product(order in 2usize..7, seed_rows in prop::collection::vec(complex_entry(), 36)) {
            // Gram of random rows is positive semidefinite.
            let rows: Vec<Vec<C64>> = (0..order)
                .map(|r| (0..order).map(|k| seed_rows[(r * order + k) % 36] + C64::new(if r == k { 1.5 } else { 0.0 }, 0.0)).collect())
                .collect();
            let refs: Vec<&[C64]> = rows.iter().map(|r| r.as_slice()).collect();
            let g = HermitianMatrix::gram(&refs);
            let out = jacobi(&g).unwrap();
            let sum: f64 = out.eigenvalues.iter().sum();
            prop_assert!((sum - g.trace()).abs() <= 1e-9 * g.trace().abs().max(1.0));
            let product: f64 = out.eigenvalues.iter().product();
            let det = determinant(&g);
            prop_assert!(det.im.abs() <= 1e-9 * det.re.abs().max(1e-12));
            prop_assert!((product - det.re).abs() <= 1e-9 * det.re.abs().max(1e-12));
            prop_assert!(out.off_diagonal <= 1e-12 * g.trace());
            prop_assert!(out.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
