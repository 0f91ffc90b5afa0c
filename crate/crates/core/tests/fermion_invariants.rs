mod common;

use common::*;
use deepvqe::models::{parse_fermion_terms, validate_terms};
use deepvqe::runner::{run_pipeline, Excitation};

const LEVELS: usize = 4;

#[test]
fn random_models_are_hermitian() {
    for seed in 0..20 {
        let (terms, _) = random_fermion_model(seed);
        validate_terms(&terms).unwrap();
    }
}

#[test]
fn sandwich_interlacing_and_richer_sets_on_random_models() {
    let dir = tempfile::tempdir().unwrap();
    for seed in 0..20 {
        let (terms, sizes) = random_fermion_model(seed);
        let file = write_model(dir.path(), &format!("m{seed}.jsonl"), &terms);
        let run = |ex| run_pipeline(&fermion_config(&file, &sizes, ex, LEVELS)).unwrap();
        let ws = run(Excitation::Ws);
        let wd = run(Excitation::Wd);
        let wdc = run(Excitation::WdComplete);
        for r in [&ws, &wd, &wdc] {
            check_variational(r).unwrap_or_else(|e| panic!("seed {seed} {}: {e}", r.basis));
        }
        let levels = |r: &deepvqe::runner::RunReport| r.effective_exact.clone().unwrap();
        check_monotone(&levels(&wd), &levels(&ws)).unwrap_or_else(|e| panic!("seed {seed} Wd vs Ws: {e}"));
        check_monotone(&levels(&wdc), &levels(&wd)).unwrap_or_else(|e| panic!("seed {seed} Wd+ vs Wd: {e}"));
    }
}

#[test]
fn embedded_solve_reproduces_effective_levels() {
    let dir = tempfile::tempdir().unwrap();
    let (terms, sizes) = random_fermion_model(101);
    let file = write_model(dir.path(), "m.jsonl", &terms);
    let r = run_pipeline(&fermion_config(&file, &sizes, Excitation::Ws, 2)).unwrap();
    let eff = r.effective_exact.as_ref().unwrap();
    for (a, b) in r.energies.iter().zip(eff) {
        assert!((a - b).abs() < 1e-9, "{:?} vs {eff:?}", r.energies);
    }
}

#[test]
fn term_file_without_conjugates_is_rejected() {
    let text = r#"{"re": 0.5, "im": 0.2, "ops": [[1, 1], [2, 0]]}"#;
    let err = parse_fermion_terms(text).unwrap_err();
    assert!(matches!(err, deepvqe::Error::Hermiticity(_)), "{err}");
}
