//! Statevector simulation of the RY/RZ/CZ hardware-efficient ansatz.
//!
//! Amplitude index bit `n - q` holds qubit `q` (1-based), so qubit 1 is the
//! most significant bit. Gate methods take `&mut self`; everything that reads
//! a state ([`StateVector::overlap`], [`StateVector::expectation`]) takes
//! `&self`, so a state is frozen for the duration of any evaluation and may be
//! shared between threads.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ZERO;
use crate::par::{self, Exec};
use crate::pauli::{PauliString, PauliSum};

/// Anything that can act on an `n`-qubit amplitude vector.
pub trait Observable: Sync {
    fn n_qubits(&self) -> usize;

    fn apply(&self, exec: Exec, psi: &[Complex64]) -> Result<Vec<Complex64>>;

    /// `<bra| O |ket>`.
    fn transition(&self, exec: Exec, bra: &[Complex64], ket: &[Complex64]) -> Result<Complex64> {
        let o_ket = self.apply(exec, ket)?;
        inner(exec, bra, &o_ket)
    }
}

impl Observable for PauliSum {
    fn n_qubits(&self) -> usize {
        PauliSum::n_qubits(self)
    }

    fn apply(&self, exec: Exec, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        PauliSum::apply(self, exec, psi)
    }

    fn transition(&self, exec: Exec, bra: &[Complex64], ket: &[Complex64]) -> Result<Complex64> {
        PauliSum::transition(self, exec, bra, ket)
    }
}

/// `<a|b>` with a fixed reduction order.
pub fn inner(exec: Exec, a: &[Complex64], b: &[Complex64]) -> Result<Complex64> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!(
            "vectors of length {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(par::chunked_sum(exec, a.len(), |i| a[i].conj() * b[i]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Computational basis state `|index>`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n >= usize::BITS as usize {
            return Err(Error::Resource(format!("{n} qubits")));
        }
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::Index(format!("basis index {index} for {n} qubits")));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { n, amps })
    }

    pub fn zero(n: usize) -> Result<Self> {
        StateVector::basis(n, 0)
    }

    /// Wraps raw amplitudes without normalizing them.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::Dimension(format!(
                "{dim} amplitudes is not a power of two"
            )));
        }
        Ok(StateVector {
            n: dim.trailing_zeros() as usize,
            amps,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Numeric {
                message: format!("cannot normalize a state of norm {norm}"),
                params: Vec::new(),
            });
        }
        for a in &mut self.amps {
            *a /= norm;
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<usize> {
        if q == 0 || q > self.n {
            return Err(Error::Index(format!("qubit {q} outside 1..={}", self.n)));
        }
        Ok(1usize << (self.n - q))
    }

    /// `RY(theta) = exp(-i theta Y / 2)`.
    pub fn apply_ry(&mut self, q: usize, theta: f64) -> Result<()> {
        let bit = self.check_qubit(q)?;
        let (s, c) = (theta / 2.0).sin_cos();
        for block in self.amps.chunks_exact_mut(2 * bit) {
            let (lo, hi) = block.split_at_mut(bit);
            for (a0, a1) in lo.iter_mut().zip(hi) {
                let (x0, x1) = (*a0, *a1);
                *a0 = x0 * c - x1 * s;
                *a1 = x0 * s + x1 * c;
            }
        }
        Ok(())
    }

    /// `RZ(theta) = exp(-i theta Z / 2)`.
    pub fn apply_rz(&mut self, q: usize, theta: f64) -> Result<()> {
        let bit = self.check_qubit(q)?;
        let (s, c) = (theta / 2.0).sin_cos();
        let up = Complex64::new(c, -s);
        let down = Complex64::new(c, s);
        for block in self.amps.chunks_exact_mut(2 * bit) {
            let (lo, hi) = block.split_at_mut(bit);
            lo.iter_mut().for_each(|a| *a *= up);
            hi.iter_mut().for_each(|a| *a *= down);
        }
        Ok(())
    }

    pub fn apply_cz(&mut self, q1: usize, q2: usize) -> Result<()> {
        let mask = self.check_qubit(q1)? | self.check_qubit(q2)?;
        if q1 == q2 {
            return Err(Error::Index(format!("CZ on a single qubit {q1}")));
        }
        for (b, a) in self.amps.iter_mut().enumerate() {
            if b & mask == mask {
                *a = -*a;
            }
        }
        Ok(())
    }

    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        if p.n_qubits() != self.n {
            return Err(Error::Dimension(format!(
                "{}-qubit string on a {}-qubit state",
                p.n_qubits(),
                self.n
            )));
        }
        let mut out = vec![ZERO; self.amps.len()];
        for (b, a) in self.amps.iter().enumerate() {
            let (to, ph) = p.apply_to_index(b);
            out[to] = ph * a;
        }
        self.amps = out;
        Ok(())
    }

    pub fn overlap(&self, other: &StateVector) -> Result<Complex64> {
        self.overlap_with(Exec::default(), other)
    }

    pub fn overlap_with(&self, exec: Exec, other: &StateVector) -> Result<Complex64> {
        self.same_register(other.n)?;
        inner(exec, &self.amps, &other.amps)
    }

    /// Real part of `<psi|O|psi>`; exact for hermitian observables.
    pub fn expectation<O: Observable + ?Sized>(&self, obs: &O) -> Result<f64> {
        Ok(self.expectation_complex(Exec::default(), obs)?.re)
    }

    pub fn expectation_with<O: Observable + ?Sized>(&self, exec: Exec, obs: &O) -> Result<f64> {
        Ok(self.expectation_complex(exec, obs)?.re)
    }

    pub fn expectation_complex<O: Observable + ?Sized>(
        &self,
        exec: Exec,
        obs: &O,
    ) -> Result<Complex64> {
        self.same_register(obs.n_qubits())?;
        obs.transition(exec, &self.amps, &self.amps)
    }

    fn same_register(&self, n: usize) -> Result<()> {
        if n != self.n {
            return Err(Error::Dimension(format!(
                "{n}-qubit operand on a {}-qubit state",
                self.n
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    /// Rotation about Y on `qubit`, angle taken from `params[param]`.
    Ry { qubit: usize, param: usize },
    Rz { qubit: usize, param: usize },
    Cz(usize, usize),
}

impl Gate {
    fn apply(&self, state: &mut StateVector, params: &[f64], inverse: bool) -> Result<()> {
        let sign = if inverse { -1.0 } else { 1.0 };
        match *self {
            Gate::Ry { qubit, param } => state.apply_ry(qubit, sign * params[param]),
            Gate::Rz { qubit, param } => state.apply_rz(qubit, sign * params[param]),
            Gate::Cz(a, b) => state.apply_cz(a, b),
        }
    }
}

/// Layered ansatz: `D` blocks of (rotation layer, CZ ladder) and a closing
/// rotation layer. Each rotation layer applies `RY` then `RZ` on every qubit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub depth: usize,
}

impl AnsatzSpec {
    pub fn new(n_qubits: usize, depth: usize) -> Self {
        AnsatzSpec { n_qubits, depth }
    }

    pub fn n_params(&self) -> usize {
        2 * self.n_qubits * (self.depth + 1)
    }

    /// Gates in application order. Parameters are laid out `[layer][qubit][ry, rz]`.
    pub fn gates(&self) -> Vec<Gate> {
        let n = self.n_qubits;
        let mut gates = Vec::with_capacity(self.n_params() + self.depth * n.saturating_sub(1));
        for layer in 0..=self.depth {
            for q in 1..=n {
                let base = 2 * (layer * n + q - 1);
                gates.push(Gate::Ry { qubit: q, param: base });
                gates.push(Gate::Rz {
                    qubit: q,
                    param: base + 1,
                });
            }
            if layer < self.depth {
                for q in 1..n {
                    gates.push(Gate::Cz(q, q + 1));
                }
            }
        }
        gates
    }

    fn check_params(&self, params: &[f64]) -> Result<()> {
        if params.len() != self.n_params() {
            return Err(Error::Shape(format!(
                "ansatz with {} qubits and depth {} needs {} parameters, got {}",
                self.n_qubits,
                self.depth,
                self.n_params(),
                params.len()
            )));
        }
        Ok(())
    }
}

/// `U(params) |reference>`.
pub fn run_ansatz(spec: &AnsatzSpec, params: &[f64], reference: usize) -> Result<StateVector> {
    spec.check_params(params)?;
    let mut state = StateVector::basis(spec.n_qubits, reference)?;
    for g in spec.gates() {
        g.apply(&mut state, params, false)?;
    }
    Ok(state)
}

/// Parse a reference bitstring such as `"0001"`; the first character is qubit 1.
pub fn parse_bitstring(s: &str) -> Result<usize> {
    s.chars().try_fold(0usize, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        other => Err(Error::Config(format!("invalid bit '{other}' in reference {s:?}"))),
    })
}

/// Gradient of `sum_r w_r <psi_r|H|psi_r>` by reverse-mode sweep.
///
/// Each rotation is `exp(-i theta P / 2)`, so its derivative contributes
/// `Im <lambda|P|phi>` where `phi` is the state just after the gate and
/// `lambda` is `H psi` propagated back to the same point.
pub fn adjoint_gradient<O: Observable + ?Sized>(
    exec: Exec,
    spec: &AnsatzSpec,
    params: &[f64],
    obs: &O,
    references: &[(usize, f64)],
) -> Result<(f64, Vec<f64>)> {
    spec.check_params(params)?;
    let gates = spec.gates();
    let mut grad = vec![0.0; params.len()];
    let mut value = 0.0;
    for &(reference, weight) in references {
        let mut phi = run_ansatz(spec, params, reference)?;
        let h_phi = obs.apply(exec, phi.amplitudes())?;
        value += weight * inner(exec, phi.amplitudes(), &h_phi)?.re;
        let mut lambda = StateVector::from_amplitudes(h_phi)?;
        for g in gates.iter().rev() {
            if let Gate::Ry { qubit, param } | Gate::Rz { qubit, param } = *g {
                let bit = 1usize << (spec.n_qubits - qubit);
                let is_y = matches!(g, Gate::Ry { .. });
                // <lambda|P|phi> with P = Y or Z on one qubit, split into the
                // halves where the qubit is 0 (`lo`) and 1 (`hi`).
                let mut acc = ZERO;
                for (l, p) in lambda.amps.chunks_exact(2 * bit).zip(phi.amps.chunks_exact(2 * bit)) {
                    let (l_lo, l_hi) = l.split_at(bit);
                    let (p_lo, p_hi) = p.split_at(bit);
                    for i in 0..bit {
                        acc += if is_y {
                            // Y|0> = i|1>, Y|1> = -i|0>.
                            l_hi[i].conj() * p_lo[i] - l_lo[i].conj() * p_hi[i]
                        } else {
                            l_lo[i].conj() * p_lo[i] - l_hi[i].conj() * p_hi[i]
                        };
                    }
                }
                grad[param] += weight * if is_y { acc.re } else { acc.im };
            }
            g.apply(&mut phi, params, true)?;
            g.apply(&mut lambda, params, true)?;
        }
    }
    Ok((value, grad))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_params(spec: &AnsatzSpec, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..spec.n_params())
            .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
            .collect()
    }

    #[test]
    fn zero_parameters_leave_reference() {
        let spec = AnsatzSpec::new(3, 0);
        let s = run_ansatz(&spec, &vec![0.0; spec.n_params()], 0).unwrap();
        assert!((s.amplitudes()[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ry_pi_flips() {
        let spec = AnsatzSpec::new(1, 0);
        let s = run_ansatz(&spec, &[std::f64::consts::PI, 0.0], 0).unwrap();
        assert!((s.amplitudes()[1].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn parameter_count_is_checked() {
        let spec = AnsatzSpec::new(2, 1);
        assert_eq!(spec.n_params(), 8);
        assert!(matches!(run_ansatz(&spec, &[0.0; 7], 0), Err(Error::Shape(_))));
    }

    #[test]
    fn norm_is_preserved_on_deep_random_circuit() {
        let spec = AnsatzSpec::new(4, 3);
        let s = run_ansatz(&spec, &random_params(&spec, 7), 0).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-10);
        let deep = AnsatzSpec::new(3, 1000);
        let s = run_ansatz(&deep, &random_params(&deep, 8), 5).unwrap();
        assert!((s.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn basic_expectations_and_overlaps() {
        let zero = StateVector::zero(1).unwrap();
        let one = StateVector::basis(1, 1).unwrap();
        let z = PauliSum::from_labels(&[("Z", 1.0)]).unwrap();
        assert_eq!(zero.expectation(&z).unwrap(), 1.0);
        assert_eq!(one.expectation(&z).unwrap(), -1.0);
        assert_eq!(zero.overlap(&zero).unwrap(), c(1.0, 0.0));
        assert_eq!(zero.overlap(&one).unwrap(), ZERO);
        let spec = AnsatzSpec::new(3, 2);
        let s = run_ansatz(&spec, &random_params(&spec, 1), 0).unwrap();
        assert!((s.expectation(&PauliSum::identity(3)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn register_mismatch_is_rejected() {
        let s = StateVector::zero(2).unwrap();
        let z = PauliSum::from_labels(&[("Z", 1.0)]).unwrap();
        assert!(matches!(s.expectation(&z), Err(Error::Dimension(_))));
        assert!(matches!(
            s.overlap(&StateVector::zero(3).unwrap()),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn bitstrings_are_msb_first() {
        assert_eq!(parse_bitstring("0001").unwrap(), 1);
        assert_eq!(parse_bitstring("1000").unwrap(), 8);
        assert!(parse_bitstring("01x").is_err());
    }

    #[test]
    fn cz_ladder_entangles_as_expected() {
        // H-like prep on both qubits via RY(pi/2), then CZ: amplitude of |11> flips sign.
        let mut s = StateVector::zero(2).unwrap();
        s.apply_ry(1, std::f64::consts::FRAC_PI_2).unwrap();
        s.apply_ry(2, std::f64::consts::FRAC_PI_2).unwrap();
        s.apply_cz(1, 2).unwrap();
        let a = s.amplitudes();
        assert!((a[0] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((a[3] - c(-0.5, 0.0)).norm() < 1e-15);
    }

    fn random_hermitian(n: usize, seed: u64) -> PauliSum {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let letters = ['I', 'X', 'Y', 'Z'];
        let mut sum = PauliSum::zero(n);
        for _ in 0..6 {
            let s: String = (0..n).map(|_| letters[rng.random_range(0..4)]).collect();
            sum.add_term(s.parse().unwrap(), c(rng.random_range(-1.0..1.0), 0.0));
        }
        sum
    }

    #[test]
    fn adjoint_gradient_matches_finite_difference() {
        let spec = AnsatzSpec::new(3, 2);
        let h = random_hermitian(3, 3);
        let params = random_params(&spec, 11);
        let refs = [(0usize, 2.0), (1usize, 1.0)];
        let (value, grad) = adjoint_gradient(Exec::Sequential, &spec, &params, &h, &refs).unwrap();
        let cost = |p: &[f64]| -> f64 {
            refs.iter()
                .map(|&(r, w)| w * run_ansatz(&spec, p, r).unwrap().expectation(&h).unwrap())
                .sum()
        };
        assert!((value - cost(&params)).abs() < 1e-12);
        for k in 0..params.len() {
            let mut plus = params.clone();
            let mut minus = params.clone();
            plus[k] += 1e-5;
            minus[k] -= 1e-5;
            let fd = (cost(&plus) - cost(&minus)) / 2e-5;
            assert!((fd - grad[k]).abs() < 1e-7, "param {k}: {fd} vs {}", grad[k]);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn overlap_is_conjugate_symmetric(seed in 0u64..10_000) {
            let spec = AnsatzSpec::new(3, 2);
            let a = run_ansatz(&spec, &random_params(&spec, seed), 0).unwrap();
            let b = run_ansatz(&spec, &random_params(&spec, seed + 1), 3).unwrap();
            let ab = a.overlap(&b).unwrap();
            let ba = b.overlap(&a).unwrap();
            prop_assert!((ab - ba.conj()).norm() < 1e-14);
        }

        #[test]
        fn hermitian_expectation_is_real_and_matches_dense(seed in 0u64..10_000, n in 1usize..=6) {
            let spec = AnsatzSpec::new(n, 2);
            let s = run_ansatz(&spec, &random_params(&spec, seed), 0).unwrap();
            let h = random_hermitian(n, seed);
            let e = s.expectation_complex(Exec::default(), &h).unwrap();
            prop_assert!(e.im.abs() < 1e-10);
            let dense = linalg::quadratic_form(&h.to_dense().unwrap(), s.amplitudes());
            prop_assert!((e - dense).norm() < 1e-9);
        }
    }
}
