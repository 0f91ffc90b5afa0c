//! Restricted local bases: Gram matrices, canonical orthonormalization and
//! projected matrix elements.
//!
//! The raw basis of a subsystem is `{P_k |psi_m>}` for excitation operators
//! `P_k` (the first one the identity) and reference states `psi_m`, indexed
//! reference-major: raw index `m * L + k` for `L` operators.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, ZERO};
use crate::par::{self, Exec};
use crate::pauli::PauliSum;
use crate::statevector::StateVector;

/// Relative rank tolerance used when none is configured.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

const NORM_TOL: f64 = 1e-8;

/// Excitation operators of one subsystem, acting on its local register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcitationSet {
    pub subsystem: usize,
    /// First global qubit (1-based) of the subsystem.
    pub start: usize,
    pub n_qubits: usize,
    pub operators: Vec<PauliSum>,
}

impl ExcitationSet {
    pub fn new(subsystem: usize, start: usize, operators: Vec<PauliSum>) -> Result<Self> {
        let Some(first) = operators.first() else {
            return Err(Error::Precondition("an excitation set needs at least the identity".into()));
        };
        let n_qubits = first.n_qubits();
        if let Some(bad) = operators.iter().find(|p| p.n_qubits() != n_qubits) {
            return Err(Error::Dimension(format!(
                "excitation operator on {} qubits in a {n_qubits}-qubit set",
                bad.n_qubits()
            )));
        }
        let id = PauliSum::identity(n_qubits);
        if (first - &id).terms().any(|(_, c)| c.norm() > 1e-12) {
            return Err(Error::Precondition(
                "the first excitation operator must be the identity".into(),
            ));
        }
        if start == 0 {
            return Err(Error::Index("subsystem start is 1-based".into()));
        }
        Ok(ExcitationSet {
            subsystem,
            start,
            n_qubits,
            operators,
        })
    }

    /// Single-subsystem set covering a whole register.
    pub fn local(operators: Vec<PauliSum>) -> Result<Self> {
        ExcitationSet::new(0, 1, operators)
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    /// Restrict an operator on the full register to this subsystem's qubits.
    pub fn localize(&self, global: &PauliSum) -> Result<PauliSum> {
        global.restrict(self.start, self.n_qubits)
    }

    /// A new set with `extra` operators appended (duplicates are kept).
    pub fn extended(&self, extra: &[PauliSum]) -> Result<Self> {
        let mut ops = self.operators.clone();
        ops.extend_from_slice(extra);
        ExcitationSet::new(self.subsystem, self.start, ops)
    }
}

/// `<psi_m| P_k^dag A P_l |psi_n>` over raw indices, with the operator product
/// expanded in the Pauli basis.
pub fn raw_matrix_elements(
    exec: Exec,
    refs: &[StateVector],
    ops: &ExcitationSet,
    a: &PauliSum,
) -> Result<CMat> {
    check_refs(refs, ops)?;
    if a.n_qubits() != ops.n_qubits {
        return Err(Error::Support(format!(
            "{}-qubit operator on a {}-qubit subsystem",
            a.n_qubits(),
            ops.n_qubits
        )));
    }
    let l = ops.len();
    let m = refs.len();
    let raw = m * l;
    let entries = par::map_range(exec, l * l, |idx| {
        let (k, q) = (idx / l, idx % l);
        let product = &(&ops.operators[k].adjoint() * a) * &ops.operators[q];
        let mut block = Vec::with_capacity(m * m);
        for bra in refs {
            for ket in refs {
                block.push(product.transition(Exec::Sequential, bra.amplitudes(), ket.amplitudes())?);
            }
        }
        Ok::<_, Error>(block)
    });
    let mut out = linalg::zeros(raw, raw);
    for (idx, block) in entries.into_iter().enumerate() {
        let block = block?;
        let (k, q) = (idx / l, idx % l);
        for mi in 0..m {
            for ni in 0..m {
                out[(mi * l + k, ni * l + q)] = block[mi * m + ni];
            }
        }
    }
    Ok(out)
}

/// Gram matrix `<psi_m| P_k^dag P_l |psi_n>`.
pub fn gram_matrix(refs: &[StateVector], ops: &ExcitationSet) -> Result<CMat> {
    let id = PauliSum::identity(ops.n_qubits);
    raw_matrix_elements(Exec::default(), refs, ops, &id)
}

fn check_refs(refs: &[StateVector], ops: &ExcitationSet) -> Result<()> {
    if refs.is_empty() {
        return Err(Error::Precondition("at least one reference state is required".into()));
    }
    for r in refs {
        if r.n_qubits() != ops.n_qubits {
            return Err(Error::Dimension(format!(
                "{}-qubit reference for a {}-qubit subsystem",
                r.n_qubits(),
                ops.n_qubits
            )));
        }
    }
    Ok(())
}

/// Canonical orthonormalization: keep eigenpairs of `G` above `tol * lambda_max`
/// and scale them by `lambda^{-1/2}`. Returns `(S, K)` with `S^dag G S = I_K`.
pub fn orthonormalize(g: &CMat, tol: f64) -> Result<(CMat, usize)> {
    let scale = linalg::max_abs(g).max(1.0);
    let defect = linalg::hermiticity_defect(g);
    if defect > 1e-10 * scale {
        return Err(Error::Precondition(format!(
            "Gram matrix is not hermitian (defect {defect:.3e})"
        )));
    }
    let (vals, u) = linalg::eigh(g)?;
    let lambda_max = vals.last().copied().unwrap_or(0.0);
    if !(lambda_max > 0.0) {
        return Err(Error::DegenerateBasis("Gram matrix has no positive eigenvalue".into()));
    }
    let keep: Vec<usize> = (0..vals.len())
        .rev()
        .filter(|&j| vals[j] > tol * lambda_max)
        .collect();
    if keep.is_empty() {
        return Err(Error::DegenerateBasis("every Gram eigenvalue is below tolerance".into()));
    }
    let raw = g.nrows();
    let s = CMat::from_fn(raw, keep.len(), |i, c| {
        let j = keep[c];
        u[(i, j)] / vals[j].sqrt()
    });
    Ok((s, keep.len()))
}

/// Orthonormalized restricted basis of one subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalBasis {
    pub refs: Vec<StateVector>,
    pub ops: ExcitationSet,
    pub gram: CMat,
    /// Raw-dimension by `K` coefficient matrix.
    pub s: CMat,
    pub k: usize,
}

impl LocalBasis {
    pub fn subsystem(&self) -> usize {
        self.ops.subsystem
    }

    pub fn raw_dim(&self) -> usize {
        self.refs.len() * self.ops.len()
    }

    /// `K x K` matrix `<phi_a| A |phi_b>` of a local operator.
    pub fn project(&self, a: &PauliSum) -> Result<CMat> {
        self.project_with(Exec::default(), a)
    }

    pub fn project_with(&self, exec: Exec, a: &PauliSum) -> Result<CMat> {
        let raw = raw_matrix_elements(exec, &self.refs, &self.ops, a)?;
        Ok(linalg::adjoint(&self.s) * raw * &self.s)
    }

    /// Like [`LocalBasis::project`] for an operator on the full register.
    pub fn project_global(&self, a: &PauliSum) -> Result<CMat> {
        self.project(&self.ops.localize(a)?)
    }

    /// Coordinates of reference `m` in the orthonormal basis, `S^dag G e_{m L}`.
    pub fn reference_coordinates(&self, m: usize) -> Result<Vec<Complex64>> {
        if m >= self.refs.len() {
            return Err(Error::Index(format!("reference {m} of {}", self.refs.len())));
        }
        let col = m * self.ops.len();
        Ok((0..self.k)
            .map(|a| {
                let mut acc = ZERO;
                for r in 0..self.raw_dim() {
                    acc += self.s[(r, a)].conj() * self.gram[(r, col)];
                }
                acc
            })
            .collect())
    }

    pub fn to_record(&self) -> LocalBasisRecord {
        LocalBasisRecord {
            subsystem: self.subsystem(),
            k: self.k,
            raw_dim: self.raw_dim(),
            s: linalg::to_row_major(&self.s),
            excitations: self.ops.clone(),
            references: self
                .refs
                .iter()
                .map(|r| r.amplitudes().iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    pub fn from_record(rec: &LocalBasisRecord) -> Result<Self> {
        let refs = rec
            .references
            .iter()
            .map(|amps| {
                StateVector::from_amplitudes(
                    amps.iter().map(|[re, im]| Complex64::new(*re, *im)).collect(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        let gram = gram_matrix(&refs, &rec.excitations)?;
        let s = linalg::from_row_major(rec.raw_dim, rec.k, &rec.s)?;
        Ok(LocalBasis {
            refs,
            ops: rec.excitations.clone(),
            gram,
            s,
            k: rec.k,
        })
    }
}

/// On-disk form of a [`LocalBasis`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalBasisRecord {
    pub subsystem: usize,
    pub k: usize,
    pub raw_dim: usize,
    /// Row-major `[re, im]` entries of `S`.
    pub s: Vec<[f64; 2]>,
    pub excitations: ExcitationSet,
    pub references: Vec<Vec<[f64; 2]>>,
}

/// Single-reference basis.
pub fn build_local_basis(refs: &[StateVector], ops: &ExcitationSet, tol: f64) -> Result<LocalBasis> {
    check_refs(refs, ops)?;
    for r in refs {
        if (r.norm() - 1.0).abs() > NORM_TOL {
            return Err(Error::Precondition(format!(
                "reference state has norm {}",
                r.norm()
            )));
        }
    }
    if refs.len() > 1 {
        for (i, a) in refs.iter().enumerate() {
            for b in &refs[..i] {
                let ov = a.overlap(b)?.norm();
                if ov > NORM_TOL {
                    return Err(Error::Precondition(format!(
                        "reference states overlap by {ov:.3e}"
                    )));
                }
            }
        }
    }
    let gram = gram_matrix(refs, ops)?;
    let (s, k) = orthonormalize(&gram, tol)?;
    Ok(LocalBasis {
        refs: refs.to_vec(),
        ops: ops.clone(),
        gram,
        s,
        k,
    })
}

/// Basis over the union `{P_k |psi_m>}` of several orthonormal references.
pub fn multi_state_basis(refs: &[StateVector], ops: &ExcitationSet, tol: f64) -> Result<LocalBasis> {
    build_local_basis(refs, ops, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliString;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ops(labels: &[&str]) -> ExcitationSet {
        ExcitationSet::local(
            labels
                .iter()
                .map(|l| PauliSum::from_labels(&[(l, 1.0)]).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn random_state(n: usize, seed: u64) -> StateVector {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..1 << n)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let mut s = StateVector::from_amplitudes(amps).unwrap();
        s.normalize().unwrap();
        s
    }

    fn random_hermitian(n: usize, seed: u64) -> PauliSum {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let letters = ['I', 'X', 'Y', 'Z'];
        let mut sum = PauliSum::zero(n);
        for _ in 0..8 {
            let s: String = (0..n).map(|_| letters[rng.random_range(0..4)]).collect();
            sum.add_term(s.parse::<PauliString>().unwrap(), c(rng.random_range(-1.0..1.0), 0.0));
        }
        sum
    }

    fn all_single_paulis(n: usize) -> Vec<String> {
        let mut out = vec!["I".repeat(n)];
        for q in 0..n {
            for p in ['X', 'Y', 'Z'] {
                let mut s: Vec<char> = vec!['I'; n];
                s[q] = p;
                out.push(s.into_iter().collect());
            }
        }
        out
    }

    #[test]
    fn gram_of_identity_x_z_on_zero() {
        let refs = [StateVector::zero(1).unwrap()];
        let g = gram_matrix(&refs, &ops(&["I", "X", "Z"])).unwrap();
        let expected = [[1.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert!((g[(i, j)] - c(expected[i][j], 0.0)).norm() < 1e-15);
            }
        }
        let (s, k) = orthonormalize(&g, DEFAULT_RANK_TOL).unwrap();
        assert_eq!(k, 2);
        let id = linalg::adjoint(&s) * &g * &s;
        assert!((id[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
        assert!(id[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn identity_only_gives_one_by_one() {
        let refs = [random_state(2, 3)];
        let g = gram_matrix(&refs, &ops(&["II"])).unwrap();
        assert_eq!(g.nrows(), 1);
        assert!((g[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn identity_gram_keeps_full_rank() {
        let (s, k) = orthonormalize(&linalg::identity(3), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(k, 3);
        let d = linalg::adjoint(&s) * &s;
        for i in 0..3 {
            assert!((d[(i, i)] - c(1.0, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn zero_gram_is_degenerate() {
        assert!(matches!(
            orthonormalize(&linalg::zeros(2, 2), DEFAULT_RANK_TOL),
            Err(Error::DegenerateBasis(_))
        ));
    }

    #[test]
    fn non_hermitian_gram_is_rejected() {
        let g = linalg::from_rows(&[vec![c(1.0, 0.0), c(0.5, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]);
        assert!(matches!(orthonormalize(&g, DEFAULT_RANK_TOL), Err(Error::Precondition(_))));
    }

    #[test]
    fn constructed_rank_is_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for rank in 1..=4 {
            let b = CMat::from_fn(rank, 6, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let g = linalg::adjoint(&b) * &b;
            let (_, k) = orthonormalize(&g, DEFAULT_RANK_TOL).unwrap();
            assert_eq!(k, rank);
        }
    }

    #[test]
    fn z_in_identity_x_basis() {
        let refs = [StateVector::zero(1).unwrap()];
        let basis = build_local_basis(&refs, &ops(&["I", "X"]), DEFAULT_RANK_TOL).unwrap();
        let z = PauliSum::from_labels(&[("Z", 1.0)]).unwrap();
        let m = basis.project(&z).unwrap();
        let mut diag = [m[(0, 0)].re, m[(1, 1)].re];
        diag.sort_by(f64::total_cmp);
        assert!((diag[0] + 1.0).abs() < 1e-12 && (diag[1] - 1.0).abs() < 1e-12);
        assert!(m[(0, 1)].norm() < 1e-12);
        let id = basis.project(&PauliSum::identity(1)).unwrap();
        assert!((id[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12 && id[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn exact_ground_reference_is_an_eigenvalue() {
        let h = random_hermitian(3, 5);
        let (vals, u) = linalg::eigh(&h.to_dense().unwrap()).unwrap();
        let gs = StateVector::from_amplitudes((0..8).map(|i| u[(i, 0)]).collect()).unwrap();
        let labels = all_single_paulis(3);
        let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
        let basis = build_local_basis(&[gs], &ops(&labels), DEFAULT_RANK_TOL).unwrap();
        let proj = linalg::eigvalsh(&basis.project(&h).unwrap()).unwrap();
        assert!(proj.iter().any(|v| (v - vals[0]).abs() < 1e-10));
        assert!((proj[0] - vals[0]).abs() < 1e-10);
    }

    #[test]
    fn reference_coordinates_reproduce_reference_energy() {
        let h = random_hermitian(3, 6);
        let psi = random_state(3, 6);
        let labels = all_single_paulis(3);
        let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
        let basis = build_local_basis(&[psi.clone()], &ops(&labels), DEFAULT_RANK_TOL).unwrap();
        let coords = basis.reference_coordinates(0).unwrap();
        let e = linalg::quadratic_form(&basis.project(&h).unwrap(), &coords);
        assert!((e.re - psi.expectation(&h).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn two_references_with_identity_only() {
        let h = random_hermitian(2, 7);
        let (_, u) = linalg::eigh(&h.to_dense().unwrap()).unwrap();
        let refs: Vec<StateVector> = (0..2)
            .map(|j| StateVector::from_amplitudes((0..4).map(|i| u[(i, j)]).collect()).unwrap())
            .collect();
        let basis = multi_state_basis(&refs, &ops(&["II"]), DEFAULT_RANK_TOL).unwrap();
        assert_eq!(basis.k, 2);
        let not_orthogonal = [refs[0].clone(), refs[0].clone()];
        assert!(matches!(
            multi_state_basis(&not_orthogonal, &ops(&["II"]), DEFAULT_RANK_TOL),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn first_operator_must_be_identity() {
        let r = ExcitationSet::local(vec![PauliSum::from_labels(&[("X", 1.0)]).unwrap()]);
        assert!(matches!(r, Err(Error::Precondition(_))));
    }

    #[test]
    fn global_operator_outside_subsystem_is_rejected() {
        let set = ExcitationSet::new(1, 3, vec![PauliSum::identity(2)]).unwrap();
        let inside = PauliSum::from_labels(&[("IIZX", 1.0)]).unwrap();
        assert_eq!(set.localize(&inside).unwrap().n_qubits(), 2);
        let outside = PauliSum::from_labels(&[("IZZI", 1.0)]).unwrap();
        assert!(matches!(set.localize(&outside), Err(Error::Support(_))));
    }

    #[test]
    fn record_round_trip() {
        let psi = random_state(2, 8);
        let basis = build_local_basis(&[psi], &ops(&["II", "XI", "IZ"]), DEFAULT_RANK_TOL).unwrap();
        let json = serde_json::to_string(&basis.to_record()).unwrap();
        let back = LocalBasis::from_record(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back.k, basis.k);
        assert_eq!(back.s, basis.s);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn gram_is_psd_and_projection_hermitian(seed in 0u64..5000) {
            let psi = random_state(3, seed);
            let labels = all_single_paulis(3);
            let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
            let set = ops(&labels);
            let g = gram_matrix(&[psi.clone()], &set).unwrap();
            let vals = linalg::eigvalsh(&g).unwrap();
            prop_assert!(vals[0] >= -1e-10);
            let basis = build_local_basis(&[psi], &set, DEFAULT_RANK_TOL).unwrap();
            let ortho = linalg::adjoint(&basis.s) * &g * &basis.s;
            prop_assert!(linalg::max_abs(&(ortho - linalg::identity(basis.k))) < 1e-8);
            let m = basis.project(&random_hermitian(3, seed + 1)).unwrap();
            prop_assert!(linalg::hermiticity_defect(&m) < 1e-10);
        }

        #[test]
        fn nested_sets_lower_projected_levels(seed in 0u64..5000) {
            let h = random_hermitian(3, seed);
            let psi = random_state(3, seed + 7);
            let big_labels = all_single_paulis(3);
            let big: Vec<&str> = big_labels.iter().map(String::as_str).collect();
            let small: Vec<&str> = big[..4].to_vec();
            let a = build_local_basis(&[psi.clone()], &ops(&small), DEFAULT_RANK_TOL).unwrap();
            let b = build_local_basis(&[psi], &ops(&big), DEFAULT_RANK_TOL).unwrap();
            let ea = linalg::eigvalsh(&a.project(&h).unwrap()).unwrap();
            let eb = linalg::eigvalsh(&b.project(&h).unwrap()).unwrap();
            let exact = linalg::eigvalsh(&h.to_dense().unwrap()).unwrap();
            for m in 0..ea.len() {
                prop_assert!(eb[m] <= ea[m] + 1e-9);
                prop_assert!(ea[m] >= exact[m] - 1e-9);
            }
        }
    }
}
