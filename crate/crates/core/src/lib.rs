//! Divide-and-conquer variational eigensolvers, simulated classically.
//!
//! The crate splits a many-qubit Hamiltonian into subsystems, solves each
//! subsystem, coarse-grains it into a small restricted basis and solves the
//! resulting effective model, for the ground state and low excited states.

pub mod coarse_grain;
pub mod effective;
pub mod eigen;
pub mod error;
pub mod linalg;
pub mod models;
pub mod par;
pub mod pauli;
pub mod runner;
pub mod statevector;

pub use error::{Error, Result, Stage, StageExt};
pub use par::Exec;
pub use pauli::{Pauli, PauliString, PauliSum};
pub use statevector::{AnsatzSpec, Observable, StateVector};
