use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Contiguous blocks of qubits covering `1..=n_total`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    n_total: usize,
    sizes: Vec<usize>,
}

impl Partition {
    pub fn from_sizes(sizes: &[usize]) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::Partition(format!("block sizes {sizes:?}")));
        }
        Ok(Partition {
            n_total: sizes.iter().sum(),
            sizes: sizes.to_vec(),
        })
    }

    /// `n_sub` equal blocks of `n_qubit` qubits.
    pub fn uniform(n_sub: usize, n_qubit: usize) -> Result<Self> {
        Partition::from_sizes(&vec![n_qubit; n_sub])
    }

    /// From explicit 1-based qubit sets, which must be contiguous, ordered and cover `1..=n_total`.
    pub fn from_sets(n_total: usize, sets: &[Vec<usize>]) -> Result<Self> {
        let mut next = 1;
        let mut sizes = Vec::with_capacity(sets.len());
        for set in sets {
            for (offset, &q) in set.iter().enumerate() {
                if q != next + offset {
                    return Err(Error::Partition(format!(
                        "subsystem {set:?} is not the contiguous block starting at qubit {next}"
                    )));
                }
            }
            next += set.len();
            sizes.push(set.len());
        }
        if next != n_total + 1 {
            return Err(Error::Partition(format!(
                "subsystems cover {} of {n_total} qubits",
                next - 1
            )));
        }
        Partition::from_sizes(&sizes)
    }

    pub fn n_total(&self) -> usize {
        self.n_total
    }

    pub fn n_subsystems(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn len(&self, i: usize) -> usize {
        self.sizes[i]
    }

    /// First qubit (1-based) of subsystem `i` (0-based).
    pub fn start(&self, i: usize) -> usize {
        1 + self.sizes[..i].iter().sum::<usize>()
    }

    pub fn qubits(&self, i: usize) -> std::ops::RangeInclusive<usize> {
        let s = self.start(i);
        s..=s + self.sizes[i] - 1
    }

    pub fn subsystem_of(&self, qubit: usize) -> Result<usize> {
        (0..self.n_subsystems())
            .find(|&i| self.qubits(i).contains(&qubit))
            .ok_or_else(|| Error::Index(format!("qubit {qubit} outside 1..={}", self.n_total)))
    }

    /// Split label such as `2x4` for uniform partitions, `4+6` otherwise.
    pub fn label(&self) -> String {
        if self.sizes.iter().all(|&s| s == self.sizes[0]) {
            format!("{}x{}", self.sizes.len(), self.sizes[0])
        } else {
            self.sizes
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join("+")
        }
    }
}

/// Qubits ordered `(k_1, orbital 1..m), (k_2, ...)`, grouped into consecutive blocks.
pub fn momentum_partition(n_k: usize, orbitals_per_k: usize, n_qubit: usize) -> Result<Partition> {
    let total = n_k * orbitals_per_k;
    if n_qubit == 0 || total == 0 || total % n_qubit != 0 {
        return Err(Error::Partition(format!(
            "{n_k} momenta x {orbitals_per_k} orbitals is not divisible into blocks of {n_qubit}"
        )));
    }
    Partition::uniform(total / n_qubit, n_qubit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn momentum_blocks() {
        let p = momentum_partition(3, 4, 6).unwrap();
        assert_eq!(p.n_subsystems(), 2);
        assert_eq!(p.qubits(0), 1..=6);
        assert_eq!(p.qubits(1), 7..=12);
        let single = momentum_partition(1, 4, 4).unwrap();
        assert_eq!(single.n_subsystems(), 1);
        assert!(matches!(momentum_partition(3, 4, 5), Err(Error::Partition(_))));
    }

    #[test]
    fn explicit_sets_must_be_contiguous_cover() {
        assert!(Partition::from_sets(4, &[vec![1, 2], vec![3, 4]]).is_ok());
        assert!(Partition::from_sets(4, &[vec![1, 3], vec![2, 4]]).is_err());
        assert!(Partition::from_sets(5, &[vec![1, 2], vec![3, 4]]).is_err());
    }

    #[test]
    fn lookups() {
        let p = Partition::from_sizes(&[4, 6]).unwrap();
        assert_eq!(p.start(1), 5);
        assert_eq!(p.subsystem_of(5).unwrap(), 1);
        assert_eq!(p.label(), "4+6");
        assert_eq!(Partition::uniform(3, 4).unwrap().label(), "3x4");
    }
}
