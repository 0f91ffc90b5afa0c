//! Second-quantized input terms, Jordan-Wigner mapping and local ladder operators.
//!
//! Ladder operators follow `c_j = (Z_1 ... Z_{j-1}) (X_j - i Y_j) / 2`, so an
//! occupied mode is `|0>` and `c_j^dag c_j = (I + Z_j) / 2`.

use std::f64::consts::TAU;
use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::partition::Partition;
use crate::coarse_grain::ExcitationSet;
use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString, PauliSum};

const HERMITICITY_TOL: f64 = 1e-10;
const MOMENTUM_TOL: f64 = 1e-8;

/// `coeff * prod_f op_f` with `op_f` a creation (`dagger`) or annihilation operator on a 1-based mode.
#[derive(Debug, Clone, PartialEq)]
pub struct FermionTerm {
    pub coeff: Complex64,
    pub ops: Vec<(usize, bool)>,
    /// Crystal momentum of each factor's mode, if known.
    pub k: Option<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct TermLine {
    re: f64,
    #[serde(default)]
    im: f64,
    ops: Vec<(usize, u8)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<Vec<f64>>,
}

impl FermionTerm {
    pub fn new(coeff: Complex64, ops: Vec<(usize, bool)>) -> Self {
        FermionTerm { coeff, ops, k: None }
    }

    pub fn max_mode(&self) -> usize {
        self.ops.iter().map(|(m, _)| *m).max().unwrap_or(0)
    }

    /// Hermitian conjugate: reversed factor order, flipped daggers, conjugated coefficient.
    pub fn adjoint(&self) -> FermionTerm {
        FermionTerm {
            coeff: self.coeff.conj(),
            ops: self.ops.iter().rev().map(|&(m, d)| (m, !d)).collect(),
            k: self.k.as_ref().map(|k| k.iter().rev().copied().collect()),
        }
    }

    /// `sum k(creation) - sum k(annihilation)` is a multiple of `2 pi`.
    pub fn conserves_momentum(&self) -> bool {
        let Some(k) = &self.k else {
            return true;
        };
        let total: f64 = self
            .ops
            .iter()
            .zip(k)
            .map(|(&(_, dagger), &kv)| if dagger { kv } else { -kv })
            .sum();
        let cycles = total / TAU;
        (cycles - cycles.round()).abs() * TAU < MOMENTUM_TOL
    }
}

fn parse_line(line: &str, lineno: usize) -> Result<FermionTerm> {
    let raw: TermLine = serde_json::from_str(line).map_err(|e| Error::Parse {
        line: lineno,
        message: e.to_string(),
    })?;
    let mut ops = Vec::with_capacity(raw.ops.len());
    for (mode, flag) in raw.ops {
        if mode == 0 {
            return Err(Error::Parse {
                line: lineno,
                message: "modes are 1-based".into(),
            });
        }
        let dagger = match flag {
            1 => true,
            0 => false,
            other => {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("creation flag must be 0 or 1, got {other}"),
                })
            }
        };
        ops.push((mode, dagger));
    }
    if let Some(k) = &raw.k {
        if k.len() != ops.len() {
            return Err(Error::Parse {
                line: lineno,
                message: format!("{} momentum labels for {} operators", k.len(), ops.len()),
            });
        }
    }
    Ok(FermionTerm {
        coeff: Complex64::new(raw.re, raw.im),
        ops,
        k: raw.k,
    })
}

/// Parse JSON-lines term data; blank lines are skipped.
pub fn parse_fermion_terms(text: &str) -> Result<Vec<FermionTerm>> {
    let terms = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_line(l, i + 1))
        .collect::<Result<Vec<_>>>()?;
    validate_terms(&terms)?;
    Ok(terms)
}

pub fn load_fermion_terms(path: &Path) -> Result<Vec<FermionTerm>> {
    parse_fermion_terms(&fs::read_to_string(path)?)
}

pub fn write_fermion_terms(path: &Path, terms: &[FermionTerm]) -> Result<()> {
    let mut file = fs::File::create(path)?;
    for t in terms {
        let line = TermLine {
            re: t.coeff.re,
            im: t.coeff.im,
            ops: t.ops.iter().map(|&(m, d)| (m, u8::from(d))).collect(),
            k: t.k.clone(),
        };
        writeln!(file, "{}", serde_json::to_string(&line)?)?;
    }
    Ok(())
}

/// Momentum conservation per term and hermiticity of the whole list.
pub fn validate_terms(terms: &[FermionTerm]) -> Result<()> {
    for (i, t) in terms.iter().enumerate() {
        if !t.conserves_momentum() {
            return Err(Error::Momentum(format!(
                "term {} with momenta {:?}",
                i + 1,
                t.k.as_deref().unwrap_or(&[])
            )));
        }
    }
    let n_modes = terms.iter().map(FermionTerm::max_mode).max().unwrap_or(0);
    if n_modes == 0 {
        return Ok(());
    }
    let h = fermion_hamiltonian(terms, n_modes)?;
    let scale = h.terms().map(|(_, c)| c.norm()).fold(1.0, f64::max);
    if let Some((s, c)) = h.terms().find(|(_, c)| c.im.abs() > HERMITICITY_TOL * scale) {
        return Err(Error::Hermiticity(format!(
            "qubit term {s} has coefficient {c}; a conjugate term is missing"
        )));
    }
    Ok(())
}

/// `c_mode` or `c_mode^dag` on `n_modes` qubits.
pub fn ladder(mode: usize, dagger: bool, n_modes: usize) -> Result<PauliSum> {
    if mode == 0 || mode > n_modes {
        return Err(Error::Index(format!("mode {mode} outside 1..={n_modes}")));
    }
    Ok(with_dagger(ladder_with_string(n_modes, mode, 1..mode)?, dagger))
}

/// `(prod_{l in z_sites} Z_l) (X_q -/+ i Y_q) / 2` on an `n`-qubit register.
fn ladder_with_string(n: usize, q: usize, z_sites: std::ops::Range<usize>) -> Result<PauliSum> {
    let mut letters = vec![Pauli::I; n];
    for l in z_sites {
        letters[l - 1] = Pauli::Z;
    }
    letters[q - 1] = Pauli::X;
    let x = PauliString::from_paulis(&letters)?;
    letters[q - 1] = Pauli::Y;
    let y = PauliString::from_paulis(&letters)?;
    // Annihilation; callers take the adjoint for creation.
    PauliSum::from_terms(n, [(x, Complex64::new(0.5, 0.0)), (y, Complex64::new(0.0, -0.5))])
}

fn with_dagger(op: PauliSum, dagger: bool) -> PauliSum {
    if dagger {
        op.adjoint()
    } else {
        op
    }
}

pub fn jordan_wigner(term: &FermionTerm, n_modes: usize) -> Result<PauliSum> {
    let mut out = PauliSum::from_string(PauliString::identity(n_modes), term.coeff);
    for &(mode, dagger) in &term.ops {
        out = &out * &ladder(mode, dagger, n_modes)?;
    }
    Ok(out)
}

/// Sum of the mapped terms.
pub fn fermion_hamiltonian(terms: &[FermionTerm], n_modes: usize) -> Result<PauliSum> {
    let mut h = PauliSum::zero(n_modes);
    for t in terms {
        h = &h + &jordan_wigner(t, n_modes)?;
    }
    Ok(h)
}

/// Ladder operator whose Z string keeps only the factors inside subsystem `i`,
/// returned on the subsystem's local register.
pub fn truncated_ladder_op(mode: usize, dagger: bool, partition: &Partition, i: usize) -> Result<PauliSum> {
    let block = partition.qubits(i);
    if !block.contains(&mode) {
        return Err(Error::Support(format!(
            "mode {mode} is not in subsystem {} (qubits {}..={})",
            i + 1,
            block.start(),
            block.end()
        )));
    }
    let start = partition.start(i);
    let local = mode - start + 1;
    Ok(with_dagger(
        ladder_with_string(partition.len(i), local, 1..local)?,
        dagger,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FermionExcitation {
    /// Identity and every single truncated creation/annihilation operator.
    Ws,
    /// `Ws` plus every `c'_j^dag c'_k`.
    Wd,
    /// `Wd` plus the pair operators `c'_j c'_k` and `c'_j^dag c'_k^dag`, `j < k`.
    WdComplete,
}

impl FermionExcitation {
    pub fn label(self) -> &'static str {
        match self {
            FermionExcitation::Ws => "Ws",
            FermionExcitation::Wd => "Wd",
            FermionExcitation::WdComplete => "Wd+",
        }
    }
}

pub fn fermion_excitation_set(kind: FermionExcitation, partition: &Partition, i: usize) -> Result<ExcitationSet> {
    let n = partition.len(i);
    let modes: Vec<usize> = partition.qubits(i).collect();
    let ann = modes
        .iter()
        .map(|&m| truncated_ladder_op(m, false, partition, i))
        .collect::<Result<Vec<_>>>()?;
    let cre: Vec<PauliSum> = ann.iter().map(PauliSum::adjoint).collect();
    let mut ops = vec![PauliSum::identity(n)];
    for j in 0..n {
        ops.push(ann[j].clone());
        ops.push(cre[j].clone());
    }
    if kind != FermionExcitation::Ws {
        for j in 0..n {
            for k in 0..n {
                ops.push(&cre[j] * &ann[k]);
            }
        }
    }
    if kind == FermionExcitation::WdComplete {
        for j in 0..n {
            for k in j + 1..n {
                ops.push(&ann[j] * &ann[k]);
                ops.push(&cre[j] * &cre[k]);
            }
        }
    }
    ExcitationSet::new(i, partition.start(i), ops)
}
