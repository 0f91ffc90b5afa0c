use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::lanczos::{self, LanczosConfig, LinearOperator};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::pauli::{PauliSum, DENSE_LIMIT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dense,
    Lanczos,
    Variational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// One amplitude vector per eigenvalue, when requested.
    pub eigenvectors: Option<Vec<Vec<Complex64>>>,
    pub method: Method,
}

impl SpectrumResult {
    pub fn ground(&self) -> f64 {
        self.eigenvalues[0]
    }
}

/// The `k` lowest eigenvalues of a dense hermitian matrix.
pub fn dense_spectrum(m: &CMat, k: usize, vectors: bool) -> Result<SpectrumResult> {
    let dim = m.nrows();
    if k == 0 || k > dim {
        return Err(Error::Index(format!("requested {k} eigenvalues of a {dim}-dim matrix")));
    }
    if vectors {
        let (vals, u) = linalg::eigh(m)?;
        let vecs = (0..k)
            .map(|j| (0..dim).map(|i| u[(i, j)]).collect())
            .collect();
        Ok(SpectrumResult {
            eigenvalues: vals[..k].to_vec(),
            eigenvectors: Some(vecs),
            method: Method::Dense,
        })
    } else {
        let vals = linalg::eigvalsh(m)?;
        Ok(SpectrumResult {
            eigenvalues: vals[..k].to_vec(),
            eigenvectors: None,
            method: Method::Dense,
        })
    }
}

/// Lanczos on any operator.
pub fn iterative_spectrum<A: LinearOperator + ?Sized>(
    op: &A,
    k: usize,
    cfg: &LanczosConfig,
) -> Result<SpectrumResult> {
    let (vals, vecs) = lanczos::lowest_eigenpairs(op, k, cfg)?;
    Ok(SpectrumResult {
        eigenvalues: vals,
        eigenvectors: Some(vecs),
        method: Method::Lanczos,
    })
}

/// Options for [`exact_spectrum_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactConfig {
    /// Registers up to this size are diagonalized densely.
    pub dense_max_qubits: usize,
    pub vectors: bool,
    pub lanczos: LanczosConfig,
}

impl Default for ExactConfig {
    fn default() -> Self {
        ExactConfig {
            dense_max_qubits: DENSE_LIMIT,
            vectors: false,
            lanczos: LanczosConfig::default(),
        }
    }
}

/// The `k` lowest eigenvalues of `h`: dense up to the dense limit, matrix-free Lanczos above.
pub fn exact_spectrum(h: &PauliSum, k: usize) -> Result<SpectrumResult> {
    exact_spectrum_with(h, k, &ExactConfig::default())
}

pub fn exact_spectrum_with(h: &PauliSum, k: usize, cfg: &ExactConfig) -> Result<SpectrumResult> {
    if k == 0 {
        return Err(Error::Index("at least one eigenvalue must be requested".into()));
    }
    if h.n_qubits() <= cfg.dense_max_qubits.min(DENSE_LIMIT) {
        dense_spectrum(&h.to_dense()?, k, cfg.vectors)
    } else {
        let mut r = iterative_spectrum(h, k, &cfg.lanczos)?;
        if !cfg.vectors {
            r.eigenvectors = None;
        }
        Ok(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_spectrum() {
        let r = exact_spectrum(&PauliSum::identity(3), 8).unwrap();
        assert_eq!(r.method, Method::Dense);
        assert!(r.eigenvalues.iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn dense_and_lanczos_paths_agree() {
        let h = PauliSum::from_labels(&[
            ("ZZIII", 1.0),
            ("IXXII", 0.7),
            ("IIYYI", -0.4),
            ("IIIZZ", 0.3),
            ("XIIIX", 0.9),
            ("IIZII", 0.2),
        ])
        .unwrap();
        let dense = exact_spectrum(&h, 5).unwrap();
        let cfg = ExactConfig {
            dense_max_qubits: 0,
            ..ExactConfig::default()
        };
        let lanczos = exact_spectrum_with(&h, 5, &cfg).unwrap();
        assert_eq!(lanczos.method, Method::Lanczos);
        for (a, b) in dense.eigenvalues.iter().zip(&lanczos.eigenvalues) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn zero_levels_is_an_error() {
        assert!(exact_spectrum(&PauliSum::identity(1), 0).is_err());
    }
}
