//! Thin wrappers over faer for the dense hermitian work the crate needs.

use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = Mat<Complex64>;

pub const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
pub const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

pub fn zeros(rows: usize, cols: usize) -> CMat {
    CMat::zeros(rows, cols)
}

pub fn identity(n: usize) -> CMat {
    CMat::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
}

pub fn from_real_diagonal(diag: &[f64]) -> CMat {
    let n = diag.len();
    CMat::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(diag[i], 0.0)
        } else {
            ZERO
        }
    })
}

pub fn from_rows(rows: &[Vec<Complex64>]) -> CMat {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    CMat::from_fn(n, m, |i, j| rows[i][j])
}

pub fn adjoint(m: &CMat) -> CMat {
    m.adjoint().to_owned()
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.as_ref().kron(b.as_ref())
}

pub fn scale(m: &CMat, c: Complex64) -> CMat {
    CMat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)] * c)
}

pub fn add_assign(acc: &mut CMat, other: &CMat) {
    for j in 0..acc.ncols() {
        for i in 0..acc.nrows() {
            acc[(i, j)] += other[(i, j)];
        }
    }
}

/// Largest entrywise modulus.
pub fn max_abs(m: &CMat) -> f64 {
    let mut best = 0.0_f64;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            best = best.max(m[(i, j)].norm());
        }
    }
    best
}

/// Largest entrywise modulus of `m - m†`.
pub fn hermiticity_defect(m: &CMat) -> f64 {
    if m.nrows() != m.ncols() {
        return f64::INFINITY;
    }
    let mut best = 0.0_f64;
    for j in 0..m.ncols() {
        for i in 0..=j {
            best = best.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    best
}

pub fn is_hermitian(m: &CMat, tol: f64) -> bool {
    hermiticity_defect(m) <= tol
}

fn is_real(m: &CMat) -> bool {
    (0..m.ncols()).all(|j| (0..m.nrows()).all(|i| m[(i, j)].im == 0.0))
}

fn evd_error(e: impl std::fmt::Debug) -> Error {
    Error::Numeric {
        message: format!("eigendecomposition failed: {e:?}"),
        params: Vec::new(),
    }
}

/// Eigenvalues of a hermitian matrix, ascending. Only the lower triangle is read.
pub fn eigvalsh(m: &CMat) -> Result<Vec<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "eigvalsh needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    if is_real(m) {
        let r = Mat::<f64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)].re);
        return r.self_adjoint_eigenvalues(Side::Lower).map_err(evd_error);
    }
    m.self_adjoint_eigenvalues(Side::Lower).map_err(evd_error)
}

/// Eigenpairs of a hermitian matrix, ascending; eigenvectors are the columns.
pub fn eigh(m: &CMat) -> Result<(Vec<f64>, CMat)> {
    if m.nrows() != m.ncols() {
        return Err(Error::Dimension(format!(
            "eigh needs a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok((Vec::new(), zeros(0, 0)));
    }
    if is_real(m) {
        let r = Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)].re);
        let evd = r.self_adjoint_eigen(Side::Lower).map_err(evd_error)?;
        let vals = (0..n).map(|i| evd.S().column_vector()[i]).collect();
        let u = evd.U();
        let vecs = CMat::from_fn(n, n, |i, j| Complex64::new(u[(i, j)], 0.0));
        return Ok((vals, vecs));
    }
    let evd = m.self_adjoint_eigen(Side::Lower).map_err(evd_error)?;
    let vals = (0..n).map(|i| evd.S().column_vector()[i].re).collect();
    Ok((vals, evd.U().to_owned()))
}

/// Spectral norm. Hermitian inputs go through the eigenvalues, others through the SVD.
pub fn op_norm(m: &CMat) -> Result<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0.0);
    }
    let scale = max_abs(m).max(1.0);
    if m.nrows() == m.ncols() && hermiticity_defect(m) <= 1e-12 * scale {
        let vals = eigvalsh(m)?;
        let lo = vals.first().copied().unwrap_or(0.0).abs();
        let hi = vals.last().copied().unwrap_or(0.0).abs();
        return Ok(lo.max(hi));
    }
    let sv = m.singular_values().map_err(evd_error)?;
    Ok(sv.first().copied().unwrap_or(0.0))
}

/// `v† m v` for a column vector stored as a slice.
pub fn quadratic_form(m: &CMat, v: &[Complex64]) -> Complex64 {
    let n = v.len();
    let mut acc = ZERO;
    for j in 0..n {
        let mut col = ZERO;
        for i in 0..n {
            col += v[i].conj() * m[(i, j)];
        }
        acc += col * v[j];
    }
    acc
}

pub fn matvec(m: &CMat, v: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![ZERO; m.nrows()];
    for j in 0..m.ncols() {
        let vj = v[j];
        if vj == ZERO {
            continue;
        }
        for (i, o) in out.iter_mut().enumerate() {
            *o += m[(i, j)] * vj;
        }
    }
    out
}

/// Row-major `[re, im]` pairs, the on-disk layout for dense blocks.
pub fn to_row_major(m: &CMat) -> Vec<[f64; 2]> {
    let mut out = Vec::with_capacity(m.nrows() * m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            out.push([z.re, z.im]);
        }
    }
    out
}

pub fn from_row_major(rows: usize, cols: usize, data: &[[f64; 2]]) -> Result<CMat> {
    if data.len() != rows * cols {
        return Err(Error::Shape(format!(
            "expected {} entries for a {rows}x{cols} matrix, got {}",
            rows * cols,
            data.len()
        )));
    }
    Ok(CMat::from_fn(rows, cols, |i, j| {
        let [re, im] = data[i * cols + j];
        Complex64::new(re, im)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigh_reconstructs_complex_hermitian() {
        let m = from_rows(&[
            vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 1.0)],
            vec![Complex64::new(0.0, -1.0), Complex64::new(2.0, 0.0)],
        ]);
        let (vals, vecs) = eigh(&m).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!((vals[1] - 3.0).abs() < 1e-12);
        let rebuilt = &vecs * from_real_diagonal(&vals) * adjoint(&vecs);
        for i in 0..2 {
            for j in 0..2 {
                assert!((rebuilt[(i, j)] - m[(i, j)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn op_norm_of_non_hermitian_uses_singular_values() {
        // |0><1| has norm 1 but both eigenvalues zero.
        let m = from_rows(&[vec![ZERO, ONE], vec![ZERO, ZERO]]);
        assert!((op_norm(&m).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn row_major_round_trip() {
        let m = CMat::from_fn(2, 3, |i, j| Complex64::new(i as f64, j as f64));
        let back = from_row_major(2, 3, &to_row_major(&m)).unwrap();
        assert_eq!(m, back);
    }
}
