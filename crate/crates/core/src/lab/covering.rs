//! The sixteen-disc covering of `D(a, 2ρ_m(a))`.

use std::f64::consts::TAU;

use rand::Rng;

use super::{precondition, uniform_in_disc, CheckResult, LabError};
use crate::poly::C64;

/// `ρ_m(b) = (1 − |b|) / 2^{m+1}`.
pub fn rho(m: u32, b: C64) -> f64 {
    (1.0 - b.norm()) / 2f64.powi(m as i32 + 1)
}

/// `D(a, ρ_m(a))` followed by the fifteen discs `D(b_j, ρ_m(b_j))`.
pub fn covering_discs(a: C64, m: u32) -> Vec<(C64, f64)> {
    let r = rho(m, a);
    let direction = if a.norm() == 0.0 { C64::new(1.0, 0.0) } else { a / a.norm() };
    let mut discs = vec![(a, r)];
    for j in 0..15 {
        let b = a + direction * C64::from_polar(1.5 * r, TAU * j as f64 / 15.0);
        discs.push((b, rho(m, b)));
    }
    discs
}

/// How deep `z` sits inside the best covering disc; negative means uncovered.
pub fn coverage_depth(discs: &[(C64, f64)], z: C64) -> f64 {
    discs
        .iter()
        .map(|&(b, r)| r - (z - b).norm())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Uniform samples of `D(a, 2ρ_m(a))`; the margin is the smallest coverage depth.
pub fn rickman_cover_test<R: Rng>(a: C64, m: u32, samples: usize, rng: &mut R) -> Result<CheckResult, LabError> {
    if !(a.norm() < 1.0) {
        return precondition(format!("|a| = {} is not below 1", a.norm()));
    }
    if m == 0 {
        return precondition("m must be positive");
    }
    if samples < 10_000 {
        return precondition(format!("{samples} samples; at least 10^4 are required"));
    }
    let discs = covering_discs(a, m);
    let outer = 2.0 * rho(m, a);
    let mut worst = (f64::INFINITY, a);
    for _ in 0..samples {
        let z = uniform_in_disc(rng, a, outer);
        let depth = coverage_depth(&discs, z);
        if depth < worst.0 {
            worst = (depth, z);
        }
    }
    // bound − attained with bound 0 and attained = −depth
    Ok(CheckResult::linear("rickman_cover", 0.0, -worst.0)
        .with_witness(worst.1)
        .with_instance(format!("a = {a}, m = {m}"))
        .with_samples(samples as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn centered_geometry() {
        let discs = covering_discs(C64::new(0.0, 0.0), 1);
        assert_eq!(discs[0].1, 0.25);
        for &(b, r) in &discs[1..] {
            assert!((b.norm() - 0.375).abs() < 1e-15);
            assert!((r - 5.0 / 32.0).abs() < 1e-15);
        }
        assert!(coverage_depth(&discs, C64::new(0.0, 0.0)) == 0.25);
    }

    #[test]
    fn boundary_ring_is_covered() {
        // the worst points sit on |z − a| = 2ρ midway between two b_j
        for (a, m) in [(C64::new(0.0, 0.0), 1), (C64::new(0.9, 0.0), 3), (C64::new(-0.3, 0.6), 5)] {
            let discs = covering_discs(a, m);
            let outer = 2.0 * rho(m, a);
            let direction = if a.norm() == 0.0 { C64::new(1.0, 0.0) } else { a / a.norm() };
            for k in 0..3000 {
                let z = a + direction * C64::from_polar(outer * (1.0 - 1e-12), TAU * k as f64 / 3000.0);
                assert!(coverage_depth(&discs, z) > 0.0, "{a} {m} {k}");
            }
        }
    }

    #[test]
    fn sampled_examples_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (a, m) in [(C64::new(0.0, 0.0), 1), (C64::new(0.9, 0.0), 3)] {
            let r = rickman_cover_test(a, m, 100_000, &mut rng).unwrap();
            assert!(r.margin > 0.0, "{r:?}");
        }
        assert!(rickman_cover_test(C64::new(0.0, 0.0), 1, 10, &mut rng).is_err());
        assert!(rickman_cover_test(C64::new(1.0, 0.0), 1, 10_000, &mut rng).is_err());
    }
}
