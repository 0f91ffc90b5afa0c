//! Open antiferromagnetic Heisenberg chain and its local excitation sets.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::partition::Partition;
use super::split::SplitHamiltonian;
use crate::coarse_grain::ExcitationSet;
use crate::error::Result;
use crate::pauli::{Pauli, PauliString, PauliSum};

/// `sum_i X_i X_{i+1} + Y_i Y_{i+1} + Z_i Z_{i+1}` with open boundaries.
pub fn heisenberg_chain(n_sites: usize) -> Result<PauliSum> {
    let mut h = PauliSum::zero(n_sites);
    for i in 1..n_sites {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            let a = PauliString::single(n_sites, i, p)?;
            let b = PauliString::single(n_sites, i + 1, p)?;
            h.add_term(a.mul(&b)?.1, Complex64::new(1.0, 0.0));
        }
    }
    Ok(h)
}

pub fn heisenberg_split(partition: &Partition) -> Result<SplitHamiltonian> {
    SplitHamiltonian::new(&heisenberg_chain(partition.n_total())?, partition)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpinExcitation {
    /// Identity plus X, Y, Z on every site.
    W,
    /// Identity plus X, Y, Z on sites adjacent to another subsystem.
    W1,
    /// Identity plus X, Y, Z on every site but the rightmost.
    W2,
}

impl SpinExcitation {
    pub fn label(self) -> &'static str {
        match self {
            SpinExcitation::W => "W",
            SpinExcitation::W1 => "W1",
            SpinExcitation::W2 => "W2",
        }
    }
}

/// Local sites (1-based within the subsystem) that receive Pauli excitations.
fn excited_sites(kind: SpinExcitation, partition: &Partition, i: usize) -> Vec<usize> {
    let n = partition.len(i);
    match kind {
        SpinExcitation::W => (1..=n).collect(),
        SpinExcitation::W2 => (1..n).collect(),
        SpinExcitation::W1 => {
            let mut sites = Vec::new();
            if i > 0 {
                sites.push(1);
            }
            if i + 1 < partition.n_subsystems() && !sites.contains(&n) {
                sites.push(n);
            }
            sites
        }
    }
}

pub fn spin_excitation_set(kind: SpinExcitation, partition: &Partition, i: usize) -> Result<ExcitationSet> {
    let n = partition.len(i);
    let mut ops = vec![PauliSum::identity(n)];
    for site in excited_sites(kind, partition, i) {
        for p in [Pauli::X, Pauli::Y, Pauli::Z] {
            ops.push(PauliSum::from_string(
                PauliString::single(n, site, p)?,
                Complex64::new(1.0, 0.0),
            ));
        }
    }
    ExcitationSet::new(i, partition.start(i), ops)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bond_counts() {
        let p = Partition::uniform(2, 4).unwrap();
        let split = heisenberg_split(&p).unwrap();
        assert_eq!(split.intra_term_count(), 18);
        assert_eq!(split.inter.len(), 3);
        assert_eq!(split.reassemble().unwrap(), heisenberg_chain(8).unwrap());
        let p3 = Partition::uniform(3, 4).unwrap();
        let split3 = heisenberg_split(&p3).unwrap();
        assert_eq!(split3.inter.len(), 6);
        assert_eq!(heisenberg_chain(12).unwrap().len(), 33);
    }

    #[test]
    fn excitation_set_sizes() {
        let p3 = Partition::uniform(3, 4).unwrap();
        assert_eq!(spin_excitation_set(SpinExcitation::W1, &p3, 0).unwrap().len(), 4);
        assert_eq!(spin_excitation_set(SpinExcitation::W1, &p3, 1).unwrap().len(), 7);
        assert_eq!(spin_excitation_set(SpinExcitation::W1, &p3, 2).unwrap().len(), 4);
        assert_eq!(spin_excitation_set(SpinExcitation::W2, &p3, 1).unwrap().len(), 10);
        assert_eq!(spin_excitation_set(SpinExcitation::W, &p3, 1).unwrap().len(), 13);
    }

    #[test]
    fn boundary_sites_face_the_neighbours() {
        let p = Partition::uniform(2, 4).unwrap();
        let left = spin_excitation_set(SpinExcitation::W1, &p, 0).unwrap();
        assert_eq!(left.operators[1].terms().next().unwrap().0.support(), vec![4]);
        let right = spin_excitation_set(SpinExcitation::W1, &p, 1).unwrap();
        assert_eq!(right.operators[1].terms().next().unwrap().0.support(), vec![1]);
    }
}
