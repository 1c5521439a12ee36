//! The fourteen acceptance criteria, each reported on its own line.
//!
//! Lines are written straight to stdout so they show up without `--nocapture`.

use std::f64::consts::{FRAC_1_SQRT_2, LN_2};
use std::io::Write;
use std::time::{Duration, Instant};

use landau_core::bounds::{binomial_b, constant_g, constant_g_sharp, landau_k};
use landau_core::curves::Family;
use landau_core::lab::potential::jensen_sides_poly;
use landau_core::lab::suite::{entry_rng, run_check};
use landau_core::lab::{dufresnoy_small_area_margin, CheckResult};
use landau_core::{default_manifest, run_manifest, spectral_quantities, Check, Configuration, CurveSpec, Poly, C64};

const SEED: u64 = 42;
const BITS: usize = 200;

/// Frozen independent 190-digit evaluation of `ln K` for `B = 3`, `G = G# = 1`.
const LN_K_B3: &str = "2742.396822558344745118595882389739326865821342012383683062";

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn run(number: usize, title: &str, limit: Duration, body: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let o = body();
    let elapsed = start.elapsed();
    let in_time = elapsed <= limit;
    let passed = o.passed && in_time;
    let timing = if in_time { String::new() } else { format!(" (over the {limit:?} budget)") };
    writeln!(
        std::io::stdout().lock(),
        "criterion {number:>2} {:<4} {title}: {} [{elapsed:.2?}{timing}]",
        if passed { "PASS" } else { "FAIL" },
        o.detail
    )
    .unwrap();
    passed
}

fn points(ps: &[Option<f64>]) -> Configuration {
    let ps: Vec<Option<C64>> = ps.iter().map(|p| p.map(|x| C64::new(x, 0.0))).collect();
    Configuration::from_points(&ps).unwrap()
}

/// Runs a manifest entry on its own stream and summarizes the worst margin.
fn checks(entries: &[Check]) -> (Vec<CheckResult>, String) {
    let mut all = Vec::new();
    for (i, check) in entries.iter().enumerate() {
        let mut rng = entry_rng(SEED, i);
        match run_check(check, &mut rng, BITS) {
            Ok(rs) => all.extend(rs),
            Err(e) => return (Vec::new(), format!("{}: {e}", check.name())),
        }
    }
    let worst = all.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let failures = all.iter().filter(|r| !r.passed()).count();
    let summary = format!("{} results, {failures} failed, worst margin {worst:.3e}", all.len());
    (all, summary)
}

fn all_pass(entries: &[Check]) -> Outcome {
    let (results, summary) = checks(entries);
    outcome(!results.is_empty() && results.iter().all(CheckResult::passed), summary)
}

fn spectral_ground_truth() -> Outcome {
    let c = points(&[Some(0.0), Some(1.0), None]);
    let q = spectral_quantities(&c, &[0, 1]).unwrap();
    let (lo, hi) = (1.0 - FRAC_1_SQRT_2, 1.0 + FRAC_1_SQRT_2);
    let sharp = 0.5f64.sqrt() / hi;
    let err = (q.eigenvalues[0] - lo).abs().max((q.eigenvalues[1] - hi).abs()).max((q.lambda_sharp - sharp).abs());
    outcome(err < 1e-12, format!("max error {err:.2e}"))
}

fn g_closed_form() -> Outcome {
    let mut worst = 0.0f64;
    for m in [1.0, 10.0, 100.0, 1e3] {
        let g = constant_g(&points(&[Some(0.0), Some(m), None])).unwrap().value;
        let exact = LN_2 - (1.0 - (m * m / (1.0 + m * m)).sqrt()).ln();
        worst = worst.max((g - exact).abs() / exact);
    }
    outcome(worst < 1e-9, format!("max relative error {worst:.2e}"))
}

fn g_asymptotics() -> Outcome {
    let m = 1e6f64;
    let g = constant_g(&points(&[Some(0.0), Some(m), None])).unwrap().value;
    let gap = (g / m.ln() - 2.0).abs();
    outcome(gap < 0.11, format!("|G/ln m − 2| = {gap:.4}"))
}

fn g_sharp_asymptotics() -> Outcome {
    let m = 1e3f64;
    let gs = constant_g_sharp(&points(&[Some(m), Some(-m), None])).unwrap().value;
    let ratio = gs / m;
    outcome(ratio > 0.9 && ratio < 1.1, format!("G#/m = {ratio:.6}"))
}

fn constant_engine() -> Outcome {
    let b = binomial_b(1);
    let k200 = landau_k(1.0, 1.0, &b, 200).unwrap();
    let k400 = landau_k(1.0, 1.0, &b, 400).unwrap();
    let log10 = k200.log10_f64();
    // 30 significant digits of ln K: "2742." and 26 decimals
    let (a, c) = (k200.ln_decimal(), k400.ln_decimal());
    let stable = a.get(..31) == c.get(..31) && a.get(..31) == LN_K_B3.get(..31);
    let passed = (log10 - 1191.0).abs() <= 0.5 && stable;
    outcome(passed, format!("log10 K = {log10:.10}, ln K = {}", &a[..a.len().min(40)]))
}

fn sharpness() -> Outcome {
    let (results, summary) = checks(&[Check::Sharpness { m: 1 }, Check::Sharpness { m: 2 }, Check::Sharpness { m: 5 }]);
    let passed = results.len() == 9 && results.iter().all(CheckResult::passed);
    outcome(passed, summary)
}

fn fs_formulas() -> Outcome {
    all_pass(&[Check::FsFormulas { curves: 10, points: 100 }])
}

fn change_of_coordinates() -> Outcome {
    all_pass(&[Check::ChangeOfCoordinates { pairs: 20, points: 1000 }])
}

fn jensen() -> Outcome {
    let z = Poly::from_real(&[0.0, 1.0]);
    let (lhs, rhs) = jensen_sides_poly(&z, 0.25, 0.5).unwrap();
    let exact = (lhs - LN_2).abs().max((rhs - LN_2).abs()) < 1e-7;
    let (results, summary) = checks(&[
        Check::JensenPolynomial { coefficients: z, r: 0.25, big_r: 0.5 },
        Check::JensenRandom { instances: 20 },
    ]);
    let random_ok = results.len() == 21 && results[1..].iter().all(|r| r.attained < 1e-6);
    let passed = exact && results.first().is_some_and(|r| r.attained < 1e-7) && random_ok;
    outcome(passed, format!("log 2 residual {:.2e}; {summary}", (lhs - rhs).abs()))
}

fn dufresnoy() -> Outcome {
    let (results, summary) = checks(&[Check::DufresnoyFamilies]);
    let family_ok = results.len() == 20 && results.iter().all(|r| r.margin >= 0.0);
    let f = CurveSpec::family(Family::LinearEmbedding { a: [0.1, 0.0] }).build().unwrap();
    let small = dufresnoy_small_area_margin(&f, 1.0).unwrap();
    let small_ok = small.margin >= 0.0 && small.margin <= 1e-4;
    outcome(family_ok && small_ok, format!("{summary}; small-area margin {:.3e}", small.margin))
}

fn rickman() -> Outcome {
    let (results, summary) = checks(&[Check::RickmanRandom { instances: 50, samples: 100_000 }]);
    outcome(results.len() == 50 && results.iter().all(|r| r.margin > 0.0), summary)
}

fn growth() -> Outcome {
    let (results, summary) = checks(&[
        Check::ThreeCirclesRandom { instances: 100 },
        Check::RemezRandom { instances: 100, samples: 20_000 },
    ]);
    outcome(results.len() == 200 && results.iter().all(|r| r.margin >= 0.0), summary)
}

fn landau_schottky() -> Outcome {
    let (results, summary) = checks(&[Check::LandauBuiltin { points: 20 }, Check::SchottkyBuiltin { points: 100 }]);
    outcome(!results.is_empty() && results.iter().all(|r| r.margin > 0.0), summary)
}

fn determinism() -> Outcome {
    let manifest = default_manifest();
    let first = serde_json::to_string_pretty(&run_manifest(&manifest, SEED, BITS).unwrap()).unwrap();
    let second = serde_json::to_string_pretty(&run_manifest(&manifest, SEED, BITS).unwrap()).unwrap();
    outcome(first == second, format!("{} bytes per document", first.len()))
}

#[test]
fn acceptance_criteria() {
    let ms = Duration::from_millis;
    let s = Duration::from_secs;
    let verdicts = [
        run(1, "spectral ground truth", ms(1), spectral_ground_truth),
        run(2, "G closed form", ms(10), g_closed_form),
        run(3, "G asymptotics", ms(10), g_asymptotics),
        run(4, "G# asymptotics", ms(10), g_sharp_asymptotics),
        run(5, "constant engine", ms(100), constant_engine),
        run(6, "sharpness family", s(15), sharpness),
        run(7, "FS formula consistency", s(5), fs_formulas),
        run(8, "change of coordinates", s(10), change_of_coordinates),
        run(9, "Jensen", s(5), jensen),
        run(10, "area-to-derivative bounds", s(10), dufresnoy),
        run(11, "sixteen-disc covering", s(5), rickman),
        run(12, "three circles and Remez", s(10), growth),
        run(13, "Landau and Schottky magnitudes", s(10), landau_schottky),
        run(14, "determinism", Duration::MAX, determinism),
    ];
    let failed: Vec<usize> = verdicts.iter().enumerate().filter(|(_, &ok)| !ok).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
