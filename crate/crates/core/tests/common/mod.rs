#![allow(dead_code)]

use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use deepvqe::effective::{EffectiveCoupling, EffectiveHamiltonian};
use deepvqe::linalg::{self, CMat};
use deepvqe::models::{write_fermion_terms, FermionTerm};
use deepvqe::runner::{Backend, Excitation, ModelSpec, RunConfig, RunReport};

/// Slack allowed on the variational inequalities.
pub const SLACK: f64 = 1e-9;

pub fn random_hermitian(rng: &mut ChaCha8Rng, k: usize) -> CMat {
    let a = CMat::from_fn(k, k, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let mut h = linalg::adjoint(&a);
    linalg::add_assign(&mut h, &a);
    linalg::scale(&h, Complex64::new(0.5, 0.0))
}

/// Two or three subsystems with `K_i` in {2, 3} and one or two random couplings per pair.
pub fn random_effective(seed: u64) -> EffectiveHamiltonian {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=3);
    let ks: Vec<usize> = (0..n).map(|_| rng.random_range(2..=3)).collect();
    let blocks = ks.iter().map(|&k| random_hermitian(&mut rng, k)).collect();
    let mut couplings = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for _ in 0..rng.random_range(1..=2) {
                couplings.push(EffectiveCoupling {
                    i,
                    j,
                    nu: Complex64::new(rng.random_range(-1.0..1.0), 0.0),
                    v: random_hermitian(&mut rng, ks[i]),
                    w: random_hermitian(&mut rng, ks[j]),
                });
            }
        }
    }
    EffectiveHamiltonian::new(blocks, couplings).unwrap()
}

fn distinct_pair(rng: &mut ChaCha8Rng, n: usize) -> (usize, usize) {
    let a = rng.random_range(1..=n);
    let mut b = rng.random_range(1..=n);
    while b == a {
        b = rng.random_range(1..=n);
    }
    (a, b)
}

/// Random number-conserving Hamiltonian on 4 to 8 modes split into two halves,
/// with every hermitian conjugate listed explicitly.
pub fn random_fermion_model(seed: u64) -> (Vec<FermionTerm>, Vec<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(4..=8);
    let mut terms = Vec::new();
    for p in 1..=n {
        terms.push(FermionTerm::new(
            Complex64::new(rng.random_range(-2.0..1.0), 0.0),
            vec![(p, true), (p, false)],
        ));
        for q in p + 1..=n {
            if rng.random_bool(0.6) {
                let t = FermionTerm::new(
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-0.5..0.5)),
                    vec![(p, true), (q, false)],
                );
                terms.push(t.adjoint());
                terms.push(t);
            }
        }
    }
    for _ in 0..rng.random_range(2..=6) {
        let (p, q) = distinct_pair(&mut rng, n);
        let (r, s) = distinct_pair(&mut rng, n);
        let t = FermionTerm::new(
            Complex64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)),
            vec![(p, true), (q, true), (r, false), (s, false)],
        );
        terms.push(t.adjoint());
        terms.push(t);
    }
    (terms, vec![n / 2, n - n / 2])
}

pub fn fermion_config(file: &Path, sizes: &[usize], excitation: Excitation, levels: usize) -> RunConfig {
    RunConfig {
        model: ModelSpec::Fermion {
            file: file.to_path_buf(),
            subsystem_sizes: sizes.to_vec(),
        },
        excitation,
        step1: Backend::Exact,
        step3: Backend::Exact,
        levels,
        ..RunConfig::default()
    }
}

pub fn write_model(dir: &Path, name: &str, terms: &[FermionTerm]) -> std::path::PathBuf {
    let path = dir.join(name);
    write_fermion_terms(&path, terms).unwrap();
    path
}

/// `E0(ED) <= E0(effective) <= E0(local)` and `E_m(effective) >= E_m(ED)` for every computed level.
pub fn check_variational(r: &RunReport) -> Result<(), String> {
    let exact = r.exact.as_ref().ok_or("no exact baseline")?;
    let eff = r.effective_exact.as_ref().unwrap_or(&r.energies);
    if !(exact[0] <= eff[0] + SLACK) {
        return Err(format!("E0(ED) {} above E0(effective) {}", exact[0], eff[0]));
    }
    if !(eff[0] <= r.local_energy + SLACK) {
        return Err(format!("E0(effective) {} above E0(local) {}", eff[0], r.local_energy));
    }
    for (m, (e, x)) in eff.iter().zip(exact).enumerate() {
        if !(*e >= x - SLACK) {
            return Err(format!("level {m}: effective {e} below exact {x}"));
        }
    }
    Ok(())
}

/// Level-by-level `richer <= poorer` over the common prefix.
pub fn check_monotone(richer: &[f64], poorer: &[f64]) -> Result<(), String> {
    for (m, (a, b)) in richer.iter().zip(poorer).enumerate() {
        if !(*a <= b + SLACK) {
            return Err(format!("level {m}: {a} above {b}"));
        }
    }
    Ok(())
}
