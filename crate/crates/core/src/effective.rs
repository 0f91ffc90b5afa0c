//! Coarse-grained Hamiltonian on the product of restricted local bases, and its
//! embedding into qubits with penalties on the padded dimensions.
//!
//! Subsystem 0 is the most significant factor in every tensor-product index,
//! matching the qubit ordering of the statevector simulator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coarse_grain::LocalBasis;
use crate::eigen::LinearOperator;
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, ZERO};
use crate::models::SplitHamiltonian;
use crate::par::{self, Exec};
use crate::pauli::PauliSum;
use crate::statevector::Observable;

const BLOCK_HERMITICITY_TOL: f64 = 1e-10;
const TOTAL_HERMITICITY_TOL: f64 = 1e-9;
/// Relative margin added above the strict penalty bounds.
pub const PENALTY_MARGIN: f64 = 1e-6;

/// `nu * V (x) W` with `V` on subsystem `i` and `W` on subsystem `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveCoupling {
    pub i: usize,
    pub j: usize,
    pub nu: Complex64,
    pub v: CMat,
    pub w: CMat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EffectiveRecord", into = "EffectiveRecord")]
pub struct EffectiveHamiltonian {
    blocks: Vec<CMat>,
    couplings: Vec<EffectiveCoupling>,
}

impl EffectiveHamiltonian {
    pub fn new(blocks: Vec<CMat>, couplings: Vec<EffectiveCoupling>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::Shape("at least one subsystem block is required".into()));
        }
        for (i, b) in blocks.iter().enumerate() {
            if b.nrows() != b.ncols() || b.nrows() == 0 {
                return Err(Error::Shape(format!("block {i} is {}x{}", b.nrows(), b.ncols())));
            }
            let scale = linalg::max_abs(b).max(1.0);
            if !linalg::is_hermitian(b, BLOCK_HERMITICITY_TOL * scale) {
                return Err(Error::Precondition(format!(
                    "block {i} is not hermitian (defect {:.3e})",
                    linalg::hermiticity_defect(b)
                )));
            }
        }
        for c in &couplings {
            if c.i == c.j || c.i >= blocks.len() || c.j >= blocks.len() {
                return Err(Error::Index(format!("coupling between subsystems {} and {}", c.i, c.j)));
            }
            for (m, side) in [(&c.v, c.i), (&c.w, c.j)] {
                let k = blocks[side].nrows();
                if m.nrows() != k || m.ncols() != k {
                    return Err(Error::Shape(format!(
                        "{}x{} coupling factor on a {k}-dim subsystem",
                        m.nrows(),
                        m.ncols()
                    )));
                }
            }
        }
        Ok(EffectiveHamiltonian { blocks, couplings })
    }

    pub fn n_subsystems(&self) -> usize {
        self.blocks.len()
    }

    /// `K_i` per subsystem.
    pub fn dims(&self) -> Vec<usize> {
        self.blocks.iter().map(CMat::nrows).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.dims().iter().product()
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn couplings(&self) -> &[EffectiveCoupling] {
        &self.couplings
    }

    /// Dense `prod K_i` matrix. Fails if the couplings do not add up to a hermitian total.
    pub fn to_dense(&self) -> Result<CMat> {
        let dims = self.dims();
        let couplings: Vec<_> = self
            .couplings
            .iter()
            .map(|c| (c.i, c.j, c.nu, c.v.clone(), c.w.clone()))
            .collect();
        let m = assemble_dense(&dims, &self.blocks, &couplings)?;
        let scale = linalg::max_abs(&m).max(1.0);
        let defect = linalg::hermiticity_defect(&m);
        if defect > TOTAL_HERMITICITY_TOL * scale {
            return Err(Error::Precondition(format!(
                "assembled effective Hamiltonian is not hermitian (defect {defect:.3e})"
            )));
        }
        Ok(symmetrize(&m))
    }

    /// All eigenvalues, ascending.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        linalg::eigvalsh(&self.to_dense()?)
    }

    /// `H - H(D)` on the subsystems outside `removed`, where `H(D)` collects every
    /// term touching a removed subsystem. `None` when every subsystem is removed.
    pub fn without(&self, removed: &[bool]) -> Result<Option<EffectiveHamiltonian>> {
        let kept: Vec<usize> = (0..self.n_subsystems()).filter(|&i| !removed[i]).collect();
        if kept.is_empty() {
            return Ok(None);
        }
        let new_index = |i: usize| kept.iter().position(|&k| k == i);
        let blocks = kept.iter().map(|&i| self.blocks[i].clone()).collect();
        let couplings = self
            .couplings
            .iter()
            .filter_map(|c| match (new_index(c.i), new_index(c.j)) {
                (Some(i), Some(j)) => Some(EffectiveCoupling {
                    i,
                    j,
                    nu: c.nu,
                    v: c.v.clone(),
                    w: c.w.clone(),
                }),
                _ => None,
            })
            .collect();
        EffectiveHamiltonian::new(blocks, couplings).map(Some)
    }

    /// `<psi| H |psi>` for the product state `(x)_i psi_i` given in local coordinates.
    pub fn product_expectation(&self, locals: &[Vec<Complex64>]) -> Result<f64> {
        if locals.len() != self.n_subsystems() {
            return Err(Error::Dimension(format!(
                "{} local states for {} subsystems",
                locals.len(),
                self.n_subsystems()
            )));
        }
        for (i, v) in locals.iter().enumerate() {
            if v.len() != self.blocks[i].nrows() {
                return Err(Error::Dimension(format!(
                    "local state {i} has length {} for K = {}",
                    v.len(),
                    self.blocks[i].nrows()
                )));
            }
        }
        let norms: Vec<f64> = locals.iter().map(|v| v.iter().map(|z| z.norm_sqr()).sum()).collect();
        let all: f64 = norms.iter().product();
        let others = |skip: &[usize]| -> f64 {
            (0..norms.len()).filter(|i| !skip.contains(i)).map(|i| norms[i]).product()
        };
        let mut e = ZERO;
        for (i, b) in self.blocks.iter().enumerate() {
            e += linalg::quadratic_form(b, &locals[i]) * others(&[i]);
        }
        for c in &self.couplings {
            e += c.nu
                * linalg::quadratic_form(&c.v, &locals[c.i])
                * linalg::quadratic_form(&c.w, &locals[c.j])
                * others(&[c.i, c.j]);
        }
        Ok(e.re / all)
    }
}

fn symmetrize(m: &CMat) -> CMat {
    let adj = linalg::adjoint(m);
    CMat::from_fn(m.nrows(), m.ncols(), |r, c| (m[(r, c)] + adj[(r, c)]) * 0.5)
}

/// Kronecker product over all subsystems with identity factors except at `factors`.
fn lift(dims: &[usize], factors: &[(usize, &CMat)]) -> CMat {
    let mut out = linalg::identity(1);
    for (site, &d) in dims.iter().enumerate() {
        let f = factors.iter().find(|(s, _)| *s == site).map(|(_, m)| *m);
        out = match f {
            Some(m) => linalg::kron(&out, m),
            None => linalg::kron(&out, &linalg::identity(d)),
        };
    }
    out
}

/// `m (+) diag(padding)` with the padding filling up to `dim`.
fn pad(m: &CMat, dim: usize, fill: f64) -> CMat {
    let k = m.nrows();
    CMat::from_fn(dim, dim, |r, c| {
        if r < k && c < k {
            m[(r, c)]
        } else if r == c {
            Complex64::new(fill, 0.0)
        } else {
            ZERO
        }
    })
}

type DenseCoupling = (usize, usize, Complex64, CMat, CMat);

fn assemble_dense(dims: &[usize], blocks: &[CMat], couplings: &[DenseCoupling]) -> Result<CMat> {
    let total: usize = dims.iter().product();
    if total > 1 << 14 {
        return Err(Error::Resource(format!("dense assembly of dimension {total}")));
    }
    let mut m = linalg::zeros(total, total);
    for (i, b) in blocks.iter().enumerate() {
        linalg::add_assign(&mut m, &lift(dims, &[(i, b)]));
    }
    for (i, j, nu, v, w) in couplings {
        linalg::add_assign(&mut m, &linalg::scale(&lift(dims, &[(*i, v), (*j, w)]), *nu));
    }
    Ok(m)
}

/// Project every intra operator and coupling of `split` onto the local bases.
pub fn assemble_effective(split: &SplitHamiltonian, bases: &[LocalBasis]) -> Result<EffectiveHamiltonian> {
    assemble_effective_with(Exec::default(), split, bases)
}

pub fn assemble_effective_with(
    exec: Exec,
    split: &SplitHamiltonian,
    bases: &[LocalBasis],
) -> Result<EffectiveHamiltonian> {
    let p = &split.partition;
    if bases.len() != p.n_subsystems() {
        return Err(Error::Dimension(format!(
            "{} local bases for {} subsystems",
            bases.len(),
            p.n_subsystems()
        )));
    }
    for (i, b) in bases.iter().enumerate() {
        if b.ops.n_qubits != p.len(i) || b.ops.start != p.start(i) {
            return Err(Error::Partition(format!(
                "basis {i} covers qubits {}..{} but subsystem {i} is {:?}",
                b.ops.start,
                b.ops.start + b.ops.n_qubits - 1,
                p.qubits(i)
            )));
        }
    }
    let blocks = split
        .intra
        .iter()
        .enumerate()
        .map(|(i, h)| bases[i].project_with(exec, h))
        .collect::<Result<Vec<_>>>()?;
    let couplings = par::map_range(exec, split.inter.len(), |idx| {
        let c = &split.inter[idx];
        Ok::<_, Error>(EffectiveCoupling {
            i: c.i,
            j: c.j,
            nu: c.nu,
            v: bases[c.i].project_with(Exec::Sequential, &c.v)?,
            w: bases[c.j].project_with(Exec::Sequential, &c.w)?,
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    EffectiveHamiltonian::new(blocks, couplings)
}

/// `||H_i|| + sum over couplings touching i of |nu| ||V|| ||W||`.
pub fn extensiveness(eff: &EffectiveHamiltonian, i: usize) -> Result<f64> {
    if i >= eff.n_subsystems() {
        return Err(Error::Index(format!("subsystem {i} of {}", eff.n_subsystems())));
    }
    let mut e = linalg::op_norm(&eff.blocks[i])?;
    for c in eff.couplings.iter().filter(|c| c.i == i || c.j == i) {
        e += c.nu.norm() * linalg::op_norm(&c.v)? * linalg::op_norm(&c.w)?;
    }
    Ok(e)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyMode {
    /// Preserves the ground energy.
    Ground,
    /// Preserves levels `0..=n` given a gap estimate for `E_n - E_0`.
    Excited,
    /// Preserves the whole spectrum without a gap estimate.
    Unconditional,
    /// No penalty; only valid after a spectral check.
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyVector {
    pub lambdas: Vec<f64>,
    pub level: usize,
    pub gap_estimate: f64,
    pub mode: PenaltyMode,
}

impl PenaltyVector {
    pub fn zero(n_subsystems: usize, level: usize) -> Self {
        PenaltyVector {
            lambdas: vec![0.0; n_subsystems],
            level,
            gap_estimate: 0.0,
            mode: PenaltyMode::Zero,
        }
    }
}

fn above(bound: f64) -> f64 {
    bound + PENALTY_MARGIN * bound.abs().max(1.0)
}

pub fn penalty_bounds(
    eff: &EffectiveHamiltonian,
    level: usize,
    gap_estimate: f64,
    mode: PenaltyMode,
) -> Result<PenaltyVector> {
    if !(gap_estimate >= 0.0) {
        return Err(Error::Precondition(format!("gap estimate {gap_estimate} must be nonnegative")));
    }
    let n = eff.n_subsystems();
    if mode == PenaltyMode::Zero {
        return Ok(PenaltyVector::zero(n, level));
    }
    let ext = (0..n).map(|i| extensiveness(eff, i)).collect::<Result<Vec<_>>>()?;
    let total: f64 = ext.iter().sum();
    let lambdas = ext
        .iter()
        .map(|&e| match mode {
            PenaltyMode::Ground => above(e),
            PenaltyMode::Excited => above(e + gap_estimate),
            PenaltyMode::Unconditional => above(e + 2.0 * total),
            PenaltyMode::Zero => 0.0,
        })
        .collect();
    let (level, gap_estimate) = match mode {
        PenaltyMode::Ground => (0, 0.0),
        _ => (level, gap_estimate),
    };
    Ok(PenaltyVector {
        lambdas,
        level,
        gap_estimate,
        mode,
    })
}

/// Qubits needed for a `k`-dimensional local space.
pub fn qubits_for(k: usize) -> usize {
    (usize::BITS - k.saturating_sub(1).leading_zeros()).max(1) as usize
}

/// Dense `H_eff` with each subsystem padded to `dims[i] >= K_i`: blocks get
/// `lambda_i` on the padding, coupling factors get zeros.
pub fn embed_dense(eff: &EffectiveHamiltonian, lambdas: &[f64], dims: &[usize]) -> Result<CMat> {
    let model = EmbeddedModel::with_dims(eff, lambdas, dims)?;
    model.to_dense()
}

/// Padded model on `sum_i N_eff,i` qubits, applied block by block.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedModel {
    dims: Vec<usize>,
    blocks: Vec<CMat>,
    couplings: Vec<DenseCoupling>,
}

impl EmbeddedModel {
    /// Pads subsystem `i` to `2^{N_eff,i}` with `N_eff,i = max(1, ceil(log2 K_i))`.
    pub fn new(eff: &EffectiveHamiltonian, penalties: &PenaltyVector) -> Result<Self> {
        let dims: Vec<usize> = eff.dims().iter().map(|&k| 1usize << qubits_for(k)).collect();
        EmbeddedModel::with_dims(eff, &penalties.lambdas, &dims)
    }

    pub fn with_dims(eff: &EffectiveHamiltonian, lambdas: &[f64], dims: &[usize]) -> Result<Self> {
        let n = eff.n_subsystems();
        if lambdas.len() != n || dims.len() != n {
            return Err(Error::Dimension(format!(
                "{} penalties and {} padded dims for {n} subsystems",
                lambdas.len(),
                dims.len()
            )));
        }
        let ks = eff.dims();
        if let Some(i) = (0..n).find(|&i| dims[i] < ks[i]) {
            return Err(Error::Dimension(format!("padded dim {} below K = {}", dims[i], ks[i])));
        }
        let blocks = (0..n).map(|i| pad(&eff.blocks[i], dims[i], lambdas[i])).collect();
        let couplings = eff
            .couplings
            .iter()
            .map(|c| (c.i, c.j, c.nu, pad(&c.v, dims[c.i], 0.0), pad(&c.w, dims[c.j], 0.0)))
            .collect();
        Ok(EmbeddedModel {
            dims: dims.to_vec(),
            blocks,
            couplings,
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn to_dense(&self) -> Result<CMat> {
        assemble_dense(&self.dims, &self.blocks, &self.couplings)
    }

    /// Each padded factor converted to Pauli form and placed on its qubits.
    /// Requires power-of-two padded dims.
    pub fn to_pauli_sum(&self) -> Result<PauliSum> {
        let widths = self
            .dims
            .iter()
            .map(|&d| {
                if d.is_power_of_two() {
                    Ok(d.trailing_zeros() as usize)
                } else {
                    Err(Error::Dimension(format!("padded dim {d} is not a power of two")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let n: usize = widths.iter().sum();
        let starts: Vec<usize> = widths
            .iter()
            .scan(1, |s, &w| {
                let here = *s;
                *s += w;
                Some(here)
            })
            .collect();
        let mut total = PauliSum::zero(n);
        for (i, b) in self.blocks.iter().enumerate() {
            total = &total + &PauliSum::from_dense(b)?.embed(n, starts[i])?;
        }
        for (i, j, nu, v, w) in &self.couplings {
            let vp = PauliSum::from_dense(v)?.embed(n, starts[*i])?;
            let wp = PauliSum::from_dense(w)?.embed(n, starts[*j])?;
            total = &total + &(&(&vp * &wp) * *nu);
        }
        Ok(total)
    }

    fn apply_local(&self, exec: Exec, m: &CMat, site: usize, psi: &[Complex64]) -> Vec<Complex64> {
        let d = self.dims[site];
        let stride: usize = self.dims[site + 1..].iter().product();
        let mut out = vec![ZERO; psi.len()];
        par::fill(exec, &mut out, |idx| {
            let a = (idx / stride) % d;
            let base = idx - a * stride;
            let mut acc = ZERO;
            for b in 0..d {
                let mab = m[(a, b)];
                if mab != ZERO {
                    acc += mab * psi[base + b * stride];
                }
            }
            acc
        });
        out
    }

    fn apply_model(&self, exec: Exec, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        if psi.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "vector of length {} for a {}-dim model",
                psi.len(),
                self.dim()
            )));
        }
        let mut out = vec![ZERO; psi.len()];
        let mut accumulate = |part: Vec<Complex64>, c: Complex64| {
            for (o, p) in out.iter_mut().zip(part) {
                *o += c * p;
            }
        };
        for (i, b) in self.blocks.iter().enumerate() {
            accumulate(self.apply_local(exec, b, i, psi), Complex64::new(1.0, 0.0));
        }
        for (i, j, nu, v, w) in &self.couplings {
            let tmp = self.apply_local(exec, w, *j, psi);
            accumulate(self.apply_local(exec, v, *i, &tmp), *nu);
        }
        Ok(out)
    }
}

impl Observable for EmbeddedModel {
    fn n_qubits(&self) -> usize {
        self.dims.iter().map(|d| d.trailing_zeros() as usize).sum()
    }

    fn apply(&self, exec: Exec, psi: &[Complex64]) -> Result<Vec<Complex64>> {
        self.apply_model(exec, psi)
    }
}

impl LinearOperator for EmbeddedModel {
    fn dim(&self) -> usize {
        EmbeddedModel::dim(self)
    }

    fn apply(&self, exec: Exec, v: &[Complex64]) -> Result<Vec<Complex64>> {
        self.apply_model(exec, v)
    }
}

pub fn embed_to_qubits(eff: &EffectiveHamiltonian, penalties: &PenaltyVector) -> Result<PauliSum> {
    EmbeddedModel::new(eff, penalties)?.to_pauli_sum()
}

/// Union over subsets `D` of padded subsystems of `Spec(H - H(D)) + sum_{i in D} lambda_i`,
/// each with multiplicity `prod_{i in D} (dims_i - K_i)`. Ascending.
pub fn block_spectrum_decomposition_with_dims(
    eff: &EffectiveHamiltonian,
    lambdas: &[f64],
    dims: &[usize],
) -> Result<Vec<f64>> {
    let n = eff.n_subsystems();
    if n > 16 {
        return Err(Error::Resource(format!("2^{n} subsystem domains")));
    }
    if lambdas.len() != n || dims.len() != n {
        return Err(Error::Dimension(format!("{} penalties for {n} subsystems", lambdas.len())));
    }
    let ks = eff.dims();
    let mut out = Vec::new();
    for mask in 0usize..1 << n {
        let removed: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
        let mut multiplicity = 1usize;
        let mut shift = 0.0;
        for i in (0..n).filter(|&i| removed[i]) {
            multiplicity *= dims[i].checked_sub(ks[i]).ok_or_else(|| {
                Error::Dimension(format!("padded dim {} below K = {}", dims[i], ks[i]))
            })?;
            shift += lambdas[i];
        }
        if multiplicity == 0 {
            continue;
        }
        let values = match eff.without(&removed)? {
            Some(rest) => rest.spectrum()?,
            None => vec![0.0],
        };
        for v in values {
            out.extend(std::iter::repeat_n(v + shift, multiplicity));
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

/// Decomposition for the qubit padding used by [`EmbeddedModel::new`].
pub fn block_spectrum_decomposition(eff: &EffectiveHamiltonian, penalties: &PenaltyVector) -> Result<Vec<f64>> {
    let dims: Vec<usize> = eff.dims().iter().map(|&k| 1usize << qubits_for(k)).collect();
    block_spectrum_decomposition_with_dims(eff, &penalties.lambdas, &dims)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PenaltyCheck {
    /// Lowest levels of the unpadded model.
    pub effective: Vec<f64>,
    /// Lowest levels of the padded model.
    pub embedded: Vec<f64>,
    pub max_deviation: f64,
    pub passed: bool,
}

/// Compare levels `0..=penalties.level` of the padded and unpadded models.
pub fn verify_penalty(eff: &EffectiveHamiltonian, penalties: &PenaltyVector, tol: f64) -> Result<PenaltyCheck> {
    let count = (penalties.level + 1).min(eff.total_dim());
    let effective = eff.spectrum()?[..count].to_vec();
    let embedded = block_spectrum_decomposition(eff, penalties)?[..count].to_vec();
    let max_deviation = effective
        .iter()
        .zip(&embedded)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(PenaltyCheck {
        effective,
        embedded,
        max_deviation,
        passed: max_deviation <= tol,
    })
}

/// First-order estimate of `E_n - E_0`: energies of the product of local block
/// ground states and of every single-subsystem excitation of it, with the
/// couplings evaluated in those product states.
pub fn first_order_gap(eff: &EffectiveHamiltonian, n: usize) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    let local = eff.blocks.iter().map(linalg::eigh).collect::<Result<Vec<_>>>()?;
    let column = |i: usize, a: usize| -> Vec<Complex64> {
        let u = &local[i].1;
        (0..u.nrows()).map(|r| u[(r, a)]).collect()
    };
    let grounds: Vec<Vec<Complex64>> = (0..eff.n_subsystems()).map(|i| column(i, 0)).collect();
    let mut energies = vec![eff.product_expectation(&grounds)?];
    for i in 0..eff.n_subsystems() {
        for a in 1..local[i].0.len() {
            let mut states = grounds.clone();
            states[i] = column(i, a);
            energies.push(eff.product_expectation(&states)?);
        }
    }
    energies.sort_by(f64::total_cmp);
    let top = energies[n.min(energies.len() - 1)];
    Ok((top - energies[0]).max(0.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResourceMetrics {
    /// `prod_i K_i / 2^{n_i}`.
    pub truncation_rate: f64,
    /// Width of the effective register, `sum_i N_eff,i`.
    pub required_qubits: usize,
    /// `max(max_i n_i, sum_i N_eff,i)`, counting the local solves as well.
    pub peak_qubits: usize,
}

pub fn resource_metrics(eff: &EffectiveHamiltonian, qubits_per_subsystem: &[usize]) -> Result<ResourceMetrics> {
    resource_metrics_for(&eff.dims(), qubits_per_subsystem)
}

pub fn resource_metrics_for(ks: &[usize], qubits_per_subsystem: &[usize]) -> Result<ResourceMetrics> {
    if ks.len() != qubits_per_subsystem.len() {
        return Err(Error::Dimension(format!(
            "{} dims for {} subsystems",
            ks.len(),
            qubits_per_subsystem.len()
        )));
    }
    let truncation_rate = ks
        .iter()
        .zip(qubits_per_subsystem)
        .map(|(&k, &q)| k as f64 / (q as f64).exp2())
        .product();
    let effective: usize = ks.iter().map(|&k| qubits_for(k)).sum();
    let largest = qubits_per_subsystem.iter().copied().max().unwrap_or(0);
    Ok(ResourceMetrics {
        truncation_rate,
        required_qubits: effective,
        peak_qubits: largest.max(effective),
    })
}

#[derive(Serialize, Deserialize)]
struct CouplingRecord {
    i: usize,
    j: usize,
    nu: [f64; 2],
    v: Vec<[f64; 2]>,
    w: Vec<[f64; 2]>,
}

/// Handoff form: dims, row-major `[re, im]` blocks and the coupling list.
#[derive(Serialize, Deserialize)]
struct EffectiveRecord {
    dims: Vec<usize>,
    blocks: Vec<Vec<[f64; 2]>>,
    couplings: Vec<CouplingRecord>,
}

impl From<EffectiveHamiltonian> for EffectiveRecord {
    fn from(eff: EffectiveHamiltonian) -> Self {
        EffectiveRecord {
            dims: eff.dims(),
            blocks: eff.blocks.iter().map(linalg::to_row_major).collect(),
            couplings: eff
                .couplings
                .iter()
                .map(|c| CouplingRecord {
                    i: c.i,
                    j: c.j,
                    nu: [c.nu.re, c.nu.im],
                    v: linalg::to_row_major(&c.v),
                    w: linalg::to_row_major(&c.w),
                })
                .collect(),
        }
    }
}

impl TryFrom<EffectiveRecord> for EffectiveHamiltonian {
    type Error = Error;

    fn try_from(rec: EffectiveRecord) -> Result<Self> {
        if rec.blocks.len() != rec.dims.len() {
            return Err(Error::Shape(format!("{} blocks for {} dims", rec.blocks.len(), rec.dims.len())));
        }
        let dim = |i: usize| {
            rec.dims
                .get(i)
                .copied()
                .ok_or_else(|| Error::Index(format!("subsystem {i} of {}", rec.dims.len())))
        };
        let blocks = rec
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| linalg::from_row_major(rec.dims[i], rec.dims[i], b))
            .collect::<Result<Vec<_>>>()?;
        let couplings = rec
            .couplings
            .iter()
            .map(|c| {
                Ok(EffectiveCoupling {
                    i: c.i,
                    j: c.j,
                    nu: Complex64::new(c.nu[0], c.nu[1]),
                    v: linalg::from_row_major(dim(c.i)?, dim(c.i)?, &c.v)?,
                    w: linalg::from_row_major(dim(c.j)?, dim(c.j)?, &c.w)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        EffectiveHamiltonian::new(blocks, couplings)
    }
}
