//! Ground and excited-state solvers: exact diagonalization, Lanczos, VQE/SSVQE and subspace expansion.

pub mod lanczos;
pub mod optimizer;
pub mod qse;
pub mod spectrum;
pub mod vqe;

pub use lanczos::{LanczosConfig, LinearOperator};
pub use optimizer::{minimize, GradientMode, OptimizerConfig};
pub use qse::qse_spectrum;
pub use spectrum::{dense_spectrum, exact_spectrum, exact_spectrum_with, ExactConfig, Method, SpectrumResult};
pub use vqe::{ssvqe, vqe_ground, SsvqeConfig, SsvqeResult, VqeResult};
