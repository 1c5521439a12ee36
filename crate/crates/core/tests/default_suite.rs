use landau_core::lab::suite::render_table;
use landau_core::{default_manifest, run_manifest};

#[test]
fn default_manifest_passes() {
    let results = run_manifest(&default_manifest(), 42, 200).unwrap();
    let failures: Vec<_> = results.iter().filter(|r| !r.passed()).collect();
    assert!(failures.is_empty(), "{}", render_table(&results));
    for r in &results {
        assert!(!r.name.is_empty());
    }
}

#[test]
fn manifest_seed_overrides_the_default() {
    let text = r#"{"seed": 7, "checks": [{"check": "rickman_random", "instances": 2, "samples": 10000}]}"#;
    let m = landau_core::Manifest::from_json(text).unwrap();
    assert_eq!(run_manifest(&m, 1, 200).unwrap(), run_manifest(&m, 2, 200).unwrap());
}
