//! Model Hamiltonians, partitions and excitation sets.

pub mod fermion;
pub mod partition;
pub mod spin;
pub mod split;

pub use fermion::{
    fermion_excitation_set, fermion_hamiltonian, jordan_wigner, ladder, load_fermion_terms, parse_fermion_terms,
    truncated_ladder_op, validate_terms, write_fermion_terms, FermionExcitation, FermionTerm,
};
pub use partition::{momentum_partition, Partition};
pub use spin::{heisenberg_chain, heisenberg_split, spin_excitation_set, SpinExcitation};
pub use split::{Coupling, SplitHamiltonian};
