mod common;

use common::*;
use deepvqe::coarse_grain::{ExcitationSet, DEFAULT_RANK_TOL};
use deepvqe::eigen::{dense_spectrum, qse_spectrum};
use deepvqe::models::{heisenberg_chain, spin_excitation_set, Partition, SpinExcitation};
use deepvqe::runner::{run_pipeline, Backend, Excitation, ModelSpec, RunConfig};
use deepvqe::StateVector;

fn heisenberg(n_sub: usize, n_qubit: usize, excitation: Excitation) -> RunConfig {
    RunConfig {
        model: ModelSpec::Heisenberg { n_sub, n_qubit },
        excitation,
        ..RunConfig::default()
    }
}

fn near(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

#[test]
fn three_by_four_boundary_set() {
    let r = run_pipeline(&heisenberg(3, 4, Excitation::W1)).unwrap();
    assert!(near(r.energies[0], -20.413, 5e-4), "{:?}", r.energies);
    assert!(near(r.energies[1], -18.665, 5e-4), "{:?}", r.energies);
    let exact = r.exact.as_ref().unwrap();
    assert!(near(exact[0], -20.568, 5e-4) && near(exact[1], -19.445, 5e-4));
    assert_eq!(r.required_qubits, 7);
    assert!(near(r.truncation_rate, 2.7e-2, 5e-4));
    check_variational(&r).unwrap();
}

#[test]
fn full_site_set_lowers_every_level() {
    for (n_sub, n_qubit) in [(2, 4), (3, 4), (2, 6)] {
        let runs: Vec<_> = [Excitation::W1, Excitation::W2, Excitation::W]
            .into_iter()
            .map(|ex| {
                let r = run_pipeline(&RunConfig {
                    levels: 3,
                    ..heisenberg(n_sub, n_qubit, ex)
                })
                .unwrap();
                check_variational(&r).unwrap_or_else(|e| panic!("{n_sub}x{n_qubit} {}: {e}", r.basis));
                r.energies
            })
            .collect();
        check_monotone(&runs[2], &runs[0]).unwrap();
        check_monotone(&runs[2], &runs[1]).unwrap();
    }
}

#[test]
fn vqe_references_stay_between_bounds() {
    let r = run_pipeline(&RunConfig {
        step1: Backend::Vqe,
        ..heisenberg(2, 4, Excitation::W2)
    })
    .unwrap();
    check_variational(&r).unwrap();
    assert!(near(r.energies[0], -13.497, 5e-3), "{:?}", r.energies);
}

/// Subspace expansion of one 6-site subsystem around its exact ground state.
#[test]
fn six_site_subspace_expansion() {
    let h = heisenberg_chain(6).unwrap();
    let exact = dense_spectrum(&h.to_dense().unwrap(), 4, true).unwrap();
    let reference = StateVector::from_amplitudes(exact.eigenvectors.unwrap()[0].clone()).unwrap();
    for e in &exact.eigenvalues[1..4] {
        assert!(near(*e, -8.008, 5e-4));
    }
    let partition = Partition::uniform(2, 6).unwrap();
    let levels = |kind| {
        let set = spin_excitation_set(kind, &partition, 0).unwrap();
        let local = ExcitationSet::local(set.operators.clone()).unwrap();
        qse_spectrum(&h, &local, &reference, 4, DEFAULT_RANK_TOL).unwrap().eigenvalues
    };
    let w1 = levels(SpinExcitation::W1);
    assert!(w1[1..4].iter().all(|e| near(*e, -6.415, 5e-3)), "{w1:?}");
    let w2 = levels(SpinExcitation::W2);
    assert!(w2[1..4].iter().all(|e| near(*e, -8.000, 1e-3)), "{w2:?}");
}

#[test]
fn bit_identical_reruns_with_vqe() {
    let cfg = RunConfig {
        step1: Backend::Vqe,
        step3: Backend::Vqe,
        ..heisenberg(2, 4, Excitation::W1)
    };
    let a = run_pipeline(&cfg).unwrap().without_timing();
    let b = run_pipeline(&cfg).unwrap().without_timing();
    assert_eq!(a, b);
}
