//! Subspace expansion of a subsystem Hamiltonian around one reference state.

use super::spectrum::{dense_spectrum, SpectrumResult};
use crate::coarse_grain::{build_local_basis, ExcitationSet};
use crate::error::Result;
use crate::pauli::PauliSum;
use crate::statevector::StateVector;

/// Eigenvalues of `h` projected onto the orthonormalized span of `{P_k |reference>}`.
/// At most `K` values are returned when fewer than `k` basis vectors survive.
pub fn qse_spectrum(
    h: &PauliSum,
    ops: &ExcitationSet,
    reference: &StateVector,
    k: usize,
    rank_tol: f64,
) -> Result<SpectrumResult> {
    let basis = build_local_basis(std::slice::from_ref(reference), ops, rank_tol)?;
    let projected = basis.project(h)?;
    dense_spectrum(&projected, k.min(basis.k), false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coarse_grain::DEFAULT_RANK_TOL;
    use crate::linalg;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_only_gives_reference_energy() {
        let h = PauliSum::from_labels(&[("ZI", 0.2), ("IZ", 0.7), ("XX", 0.3)]).unwrap();
        let mut psi = StateVector::from_amplitudes(vec![
            Complex64::new(0.3, 0.1),
            Complex64::new(-0.5, 0.0),
            Complex64::new(0.2, 0.4),
            Complex64::new(0.6, -0.2),
        ])
        .unwrap();
        psi.normalize().unwrap();
        let ops = ExcitationSet::local(vec![PauliSum::identity(2)]).unwrap();
        let r = qse_spectrum(&h, &ops, &psi, 3, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(r.eigenvalues.len(), 1);
        assert!((r.eigenvalues[0] - psi.expectation(&h).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn projected_levels_lie_above_exact_levels() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let letters = ['I', 'X', 'Y', 'Z'];
            let mut h = PauliSum::zero(3);
            for _ in 0..8 {
                let s: String = (0..3).map(|_| letters[rng.random_range(0..4)]).collect();
                h.add_term(s.parse().unwrap(), Complex64::new(rng.random_range(-1.0..1.0), 0.0));
            }
            let amps = (0..8)
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let mut psi = StateVector::from_amplitudes(amps).unwrap();
            psi.normalize().unwrap();
            let ops = ExcitationSet::local(
                ["III", "XII", "IYI", "IIZ"]
                    .iter()
                    .map(|l| PauliSum::from_labels(&[(l, 1.0)]).unwrap())
                    .collect(),
            )
            .unwrap();
            let proj = qse_spectrum(&h, &ops, &psi, 4, DEFAULT_RANK_TOL).unwrap();
            let exact = linalg::eigvalsh(&h.to_dense().unwrap()).unwrap();
            for (m, v) in proj.eigenvalues.iter().enumerate() {
                assert!(*v >= exact[m] - 1e-10);
            }
        }
    }
}
