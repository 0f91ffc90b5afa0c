//! Splitting a Hamiltonian into intra-subsystem parts and two-subsystem couplings.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::partition::Partition;
use crate::error::{Error, Result};
use crate::pauli::{PauliString, PauliSum};

/// `nu * V (x) W` with `V` on subsystem `i` and `W` on subsystem `j > i`, both local.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coupling {
    pub i: usize,
    pub j: usize,
    pub nu: Complex64,
    pub v: PauliSum,
    pub w: PauliSum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitHamiltonian {
    pub partition: Partition,
    /// Local operator per subsystem. Constant terms go to subsystem 0.
    pub intra: Vec<PauliSum>,
    pub inter: Vec<Coupling>,
}

impl SplitHamiltonian {
    /// Split `h` along `partition`. Terms acting on two subsystems are grouped
    /// by their string on the first one, so each coupling has a single Pauli
    /// string `V` and `nu = 1`.
    pub fn new(h: &PauliSum, partition: &Partition) -> Result<Self> {
        if h.n_qubits() != partition.n_total() {
            return Err(Error::Dimension(format!(
                "{}-qubit Hamiltonian with a {}-qubit partition",
                h.n_qubits(),
                partition.n_total()
            )));
        }
        let n_sub = partition.n_subsystems();
        let mut intra: Vec<PauliSum> = (0..n_sub).map(|i| PauliSum::zero(partition.len(i))).collect();
        let mut grouped: BTreeMap<(usize, usize, PauliString), PauliSum> = BTreeMap::new();
        for (s, c) in h.terms() {
            let mut touched = Vec::new();
            for i in 0..n_sub {
                let local = s.restrict(partition.start(i), partition.len(i))?;
                if !local.is_identity() {
                    touched.push((i, local));
                }
            }
            match touched.len() {
                0 => {
                    let id = PauliString::identity(partition.len(0));
                    intra[0].add_term(id, *c);
                }
                1 => {
                    let (i, local) = touched.pop().expect("one subsystem");
                    intra[i].add_term(local, *c);
                }
                2 => {
                    let (j, wj) = touched.pop().expect("second subsystem");
                    let (i, vi) = touched.pop().expect("first subsystem");
                    grouped
                        .entry((i, j, vi))
                        .or_insert_with(|| PauliSum::zero(partition.len(j)))
                        .add_term(wj, *c);
                }
                n => return Err(Error::UnsupportedArity(n)),
            }
        }
        let inter = grouped
            .into_iter()
            .filter(|(_, w)| !w.is_empty())
            .map(|((i, j, v), w)| Coupling {
                i,
                j,
                nu: Complex64::new(1.0, 0.0),
                v: PauliSum::from_string(v, Complex64::new(1.0, 0.0)),
                w,
            })
            .collect();
        Ok(SplitHamiltonian {
            partition: partition.clone(),
            intra,
            inter,
        })
    }

    pub fn n_subsystems(&self) -> usize {
        self.partition.n_subsystems()
    }

    pub fn intra_term_count(&self) -> usize {
        self.intra.iter().map(PauliSum::len).sum()
    }

    /// The full Hamiltonian on `n_total` qubits.
    pub fn reassemble(&self) -> Result<PauliSum> {
        let p = &self.partition;
        let n = p.n_total();
        let mut total = PauliSum::zero(n);
        for (i, h) in self.intra.iter().enumerate() {
            total = &total + &h.embed(n, p.start(i))?;
        }
        for c in &self.inter {
            let v = c.v.embed(n, p.start(c.i))?;
            let w = c.w.embed(n, p.start(c.j))?;
            total = &total + &(&(&v * &w) * c.nu);
        }
        Ok(total)
    }

    /// Terms touching subsystem `i` on the full register, for local solves.
    pub fn subsystem_hamiltonian(&self, i: usize) -> &PauliSum {
        &self.intra[i]
    }
}
