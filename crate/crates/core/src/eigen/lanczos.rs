//! Lanczos with full reorthogonalization and locking of converged vectors.
//!
//! Each outer pass finds the lowest eigenpair of the operator restricted to
//! the orthogonal complement of the vectors locked so far, so degenerate
//! eigenvalues are returned with their multiplicity.

use faer::{Mat, Side};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, ZERO};
use crate::par::{self, Exec};
use crate::pauli::PauliSum;
use crate::statevector::inner;

/// A hermitian operator known only through its action on vectors.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, exec: Exec, v: &[Complex64]) -> Result<Vec<Complex64>>;
}

impl LinearOperator for PauliSum {
    fn dim(&self) -> usize {
        1usize << self.n_qubits()
    }

    fn apply(&self, exec: Exec, v: &[Complex64]) -> Result<Vec<Complex64>> {
        PauliSum::apply(self, exec, v)
    }
}

impl LinearOperator for CMat {
    fn dim(&self) -> usize {
        self.nrows()
    }

    fn apply(&self, _exec: Exec, v: &[Complex64]) -> Result<Vec<Complex64>> {
        if v.len() != self.ncols() {
            return Err(Error::Dimension(format!(
                "vector of length {} for a {}x{} matrix",
                v.len(),
                self.nrows(),
                self.ncols()
            )));
        }
        Ok(linalg::matvec(self, v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosConfig {
    /// Krylov dimension before an explicit restart.
    pub max_krylov: usize,
    /// Residual `||A x - theta x||` below which a Ritz pair is accepted.
    pub tolerance: f64,
    pub max_restarts: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for LanczosConfig {
    fn default() -> Self {
        LanczosConfig {
            max_krylov: 200,
            tolerance: 1e-8,
            max_restarts: 30,
            seed: 0x1a2c_05,
            exec: Exec::default(),
        }
    }
}

fn axpy(y: &mut [Complex64], a: Complex64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

fn norm(exec: Exec, v: &[Complex64]) -> f64 {
    par::chunked_sum(exec, v.len(), |i| Complex64::new(v[i].norm_sqr(), 0.0))
        .re
        .sqrt()
}

/// Remove components along every vector in `basis`, twice for stability.
fn project_out(exec: Exec, v: &mut [Complex64], basis: &[Vec<Complex64>]) -> Result<()> {
    for _ in 0..2 {
        for b in basis {
            let c = inner(exec, b, v)?;
            axpy(v, -c, b);
        }
    }
    Ok(())
}

/// Lowest eigenpair of a real symmetric tridiagonal matrix.
fn tridiagonal_lowest(alpha: &[f64], beta: &[f64]) -> Result<(f64, Vec<f64>)> {
    let m = alpha.len();
    let t = Mat::<f64>::from_fn(m, m, |i, j| {
        if i == j {
            alpha[i]
        } else if i == j + 1 {
            beta[j]
        } else if j == i + 1 {
            beta[i]
        } else {
            0.0
        }
    });
    let evd = t.self_adjoint_eigen(Side::Lower).map_err(|e| Error::Numeric {
        message: format!("tridiagonal eigensolve failed: {e:?}"),
        params: Vec::new(),
    })?;
    let theta = evd.S().column_vector()[0];
    let u = evd.U();
    Ok((theta, (0..m).map(|i| u[(i, 0)]).collect()))
}

/// One Lanczos pass from `start`, orthogonal to `locked`. Returns the lowest
/// Ritz pair and its residual norm.
fn lanczos_pass<A: LinearOperator + ?Sized>(
    op: &A,
    cfg: &LanczosConfig,
    start: Vec<Complex64>,
    locked: &[Vec<Complex64>],
) -> Result<(f64, Vec<Complex64>, f64)> {
    let exec = cfg.exec;
    let free_dim = op.dim() - locked.len();
    let max_m = cfg.max_krylov.min(free_dim).max(1);
    let mut basis: Vec<Vec<Complex64>> = vec![start];
    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let (theta, s, residual) = loop {
        let j = basis.len() - 1;
        let mut w = op.apply(exec, &basis[j])?;
        let a = inner(exec, &basis[j], &w)?.re;
        alpha.push(a);
        project_out(exec, &mut w, locked)?;
        project_out(exec, &mut w, &basis)?;
        let b = norm(exec, &w);
        if !b.is_finite() || !a.is_finite() {
            return Err(Error::Numeric {
                message: "non-finite value during Lanczos iteration".into(),
                params: Vec::new(),
            });
        }
        let m = alpha.len();
        let check = m == max_m || b < 1e-12 || m % 5 == 0;
        if check {
            let (theta, s) = tridiagonal_lowest(&alpha, &beta)?;
            let residual = b * s[m - 1].abs();
            if residual < cfg.tolerance || m == max_m || b < 1e-12 {
                break (theta, s, residual);
            }
        }
        beta.push(b);
        basis.push(w.into_iter().map(|x| x / b).collect());
    };
    let dim = op.dim();
    let mut x = vec![ZERO; dim];
    for (sj, vj) in s.iter().zip(&basis) {
        axpy(&mut x, Complex64::new(*sj, 0.0), vj);
    }
    let nx = norm(exec, &x);
    x.iter_mut().for_each(|v| *v /= nx);
    Ok((theta, x, residual))
}

/// The `k` lowest eigenpairs, ascending, with multiplicity.
pub fn lowest_eigenpairs<A: LinearOperator + ?Sized>(
    op: &A,
    k: usize,
    cfg: &LanczosConfig,
) -> Result<(Vec<f64>, Vec<Vec<Complex64>>)> {
    let dim = op.dim();
    if k == 0 || k > dim {
        return Err(Error::Index(format!("requested {k} eigenvalues of a {dim}-dim operator")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut values = Vec::with_capacity(k);
    let mut locked: Vec<Vec<Complex64>> = Vec::with_capacity(k);
    while locked.len() < k {
        let mut start: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let mut last_residual = f64::INFINITY;
        let mut accepted = None;
        for _ in 0..=cfg.max_restarts {
            project_out(cfg.exec, &mut start, &locked)?;
            let nrm = norm(cfg.exec, &start);
            start.iter_mut().for_each(|v| *v /= nrm);
            let (theta, x, residual) = lanczos_pass(op, cfg, start, &locked)?;
            last_residual = residual;
            if residual < cfg.tolerance {
                accepted = Some((theta, x));
                break;
            }
            start = x;
        }
        let Some((theta, mut x)) = accepted else {
            return Err(Error::NoConvergence {
                iterations: cfg.max_restarts * cfg.max_krylov,
                residual: last_residual,
            });
        };
        project_out(cfg.exec, &mut x, &locked)?;
        let nx = norm(cfg.exec, &x);
        x.iter_mut().for_each(|v| *v /= nx);
        values.push(theta);
        locked.push(x);
    }
    // Locking order is ascending in exact arithmetic; sort to absorb rounding.
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = order.into_iter().map(|i| locked[i].clone()).collect();
    Ok((sorted_values, sorted_vectors))
}
