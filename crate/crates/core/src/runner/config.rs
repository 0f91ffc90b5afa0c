use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::effective::PenaltyMode;
use crate::eigen::{OptimizerConfig, SsvqeConfig};
use crate::error::{Error, Result};
use crate::models::{FermionExcitation, SpinExcitation};
use crate::par::Exec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    /// Open Heisenberg chain of `n_sub * n_qubit` sites split into equal blocks.
    Heisenberg { n_sub: usize, n_qubit: usize },
    /// JSON-lines fermionic terms on contiguous subsystems of the given sizes.
    Fermion { file: PathBuf, subsystem_sizes: Vec<usize> },
}

impl ModelSpec {
    pub fn label(&self) -> &'static str {
        match self {
            ModelSpec::Heisenberg { .. } => "heisenberg",
            ModelSpec::Fermion { .. } => "fermion",
        }
    }

    pub fn sizes(&self) -> Vec<usize> {
        match self {
            ModelSpec::Heisenberg { n_sub, n_qubit } => vec![*n_qubit; *n_sub],
            ModelSpec::Fermion { subsystem_sizes, .. } => subsystem_sizes.clone(),
        }
    }

    pub fn is_fermionic(&self) -> bool {
        matches!(self, ModelSpec::Fermion { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Excitation {
    W,
    W1,
    W2,
    Ws,
    Wd,
    WdComplete,
}

impl Excitation {
    pub fn label(self) -> &'static str {
        match self {
            Excitation::W => "W",
            Excitation::W1 => "W1",
            Excitation::W2 => "W2",
            Excitation::Ws => "Ws",
            Excitation::Wd => "Wd",
            Excitation::WdComplete => "Wd+",
        }
    }

    pub fn spin(self) -> Option<SpinExcitation> {
        match self {
            Excitation::W => Some(SpinExcitation::W),
            Excitation::W1 => Some(SpinExcitation::W1),
            Excitation::W2 => Some(SpinExcitation::W2),
            _ => None,
        }
    }

    pub fn fermion(self) -> Option<FermionExcitation> {
        match self {
            Excitation::Ws => Some(FermionExcitation::Ws),
            Excitation::Wd => Some(FermionExcitation::Wd),
            Excitation::WdComplete => Some(FermionExcitation::WdComplete),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Vqe,
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelSpec,
    pub excitation: Excitation,
    pub step1: Backend,
    pub step3: Backend,
    /// Number of low-lying levels to compute.
    pub levels: usize,
    /// Ansatz depths; chosen from the register size when absent.
    pub step1_depth: Option<usize>,
    pub step3_depth: Option<usize>,
    /// Step 1 optimizer; Step 3 uses the same settings with `step3_restarts`.
    pub optimizer: OptimizerConfig,
    pub step3_restarts: usize,
    /// SSVQE weights; `(2, 1)` for spin models and `(7, 2)` for fermionic ones when absent.
    pub ssvqe_weights: Option<Vec<f64>>,
    pub penalty: PenaltyMode,
    /// `E_n - E_0` scale for the excited penalty; the first-order estimate when absent.
    pub gap_estimate: Option<f64>,
    pub rank_tol: f64,
    /// With a degenerate exact subsystem ground level, use a seeded random
    /// combination of the degenerate vectors instead of the first one.
    pub sample_degenerate_references: bool,
    pub seed: u64,
    pub exec: Exec,
    /// Diagonalize the full Hamiltonian for reference values.
    pub baseline: bool,
    /// Compare padded and unpadded low spectra; always done for the zero penalty.
    pub verify_penalty: bool,
    pub output: Option<PathBuf>,
    pub format: ReportFormat,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            model: ModelSpec::Heisenberg { n_sub: 2, n_qubit: 4 },
            excitation: Excitation::W2,
            step1: Backend::Exact,
            step3: Backend::Exact,
            levels: 2,
            step1_depth: None,
            step3_depth: None,
            optimizer: OptimizerConfig::default(),
            step3_restarts: 10,
            ssvqe_weights: None,
            penalty: PenaltyMode::Excited,
            gap_estimate: None,
            rank_tol: crate::coarse_grain::DEFAULT_RANK_TOL,
            sample_degenerate_references: false,
            seed: 0,
            exec: Exec::default(),
            baseline: true,
            verify_penalty: false,
            output: None,
            format: ReportFormat::Json,
        }
    }
}

/// Step 1 depth for an `n`-qubit subsystem: 10, 15, 20 for up to 4, 6 and more qubits.
fn spin_step1_depth(n: usize) -> usize {
    match n {
        0..=4 => 10,
        5..=6 => 15,
        _ => 20,
    }
}

/// Step 3 depth for an `n`-qubit effective register: 15, 20, 25 for up to 4, 6 and more qubits.
fn spin_step3_depth(n: usize) -> usize {
    match n {
        0..=4 => 15,
        5..=6 => 20,
        _ => 25,
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(&fs::read_to_string(path)?)?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let sizes = self.model.sizes();
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::Config(format!("subsystem sizes {sizes:?}")));
        }
        match (&self.model, self.excitation.spin(), self.excitation.fermion()) {
            (ModelSpec::Heisenberg { .. }, None, _) | (ModelSpec::Fermion { .. }, _, None) => {
                return Err(Error::Config(format!(
                    "excitation set {} does not apply to a {} model",
                    self.excitation.label(),
                    self.model.label()
                )))
            }
            _ => {}
        }
        if self.levels == 0 {
            return Err(Error::Config("at least one level is required".into()));
        }
        if !(self.rank_tol > 0.0 && self.rank_tol < 1.0) {
            return Err(Error::Config(format!("rank tolerance {} outside (0, 1)", self.rank_tol)));
        }
        if let Some(g) = self.gap_estimate {
            if !(g >= 0.0) {
                return Err(Error::Config(format!("gap estimate {g} must be nonnegative")));
            }
        }
        if self.step3_restarts == 0 {
            return Err(Error::Config("Step 3 restart count must be at least 1".into()));
        }
        if self.step3 == Backend::Vqe && self.levels > 1 {
            self.ssvqe().validate()?;
        }
        self.optimizer.validate()
    }

    pub fn step1_depth_for(&self, n_qubits: usize) -> usize {
        self.step1_depth.unwrap_or(if self.model.is_fermionic() {
            20
        } else {
            spin_step1_depth(n_qubits)
        })
    }

    pub fn step3_depth_for(&self, n_qubits: usize) -> usize {
        self.step3_depth.unwrap_or(if self.model.is_fermionic() {
            80
        } else {
            spin_step3_depth(n_qubits)
        })
    }

    /// SSVQE on `|0...0>, |0...01>, ...` with one weight per level.
    pub fn ssvqe(&self) -> SsvqeConfig {
        let references: Vec<usize> = (0..self.levels).collect();
        let weights = match &self.ssvqe_weights {
            Some(w) => w.clone(),
            None if self.levels == 2 && self.model.is_fermionic() => SsvqeConfig::fermion_default().weights,
            None if self.levels == 2 => SsvqeConfig::spin_default().weights,
            None => (0..self.levels).map(|l| (self.levels - l) as f64).collect(),
        };
        SsvqeConfig { weights, references }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        let text = serde_json::to_string_pretty(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn partial_files_fill_defaults() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"model": {"kind": "heisenberg", "n_sub": 3, "n_qubit": 4}, "excitation": "w1", "seed": 7}"#,
        )
        .unwrap();
        assert_eq!(cfg.model.sizes(), vec![4, 4, 4]);
        assert_eq!(cfg.excitation, Excitation::W1);
        assert_eq!(cfg.levels, 2);
        assert!(serde_json::from_str::<RunConfig>(r#"{"sead": 7}"#).is_err());
    }

    #[test]
    fn mismatched_excitation_is_rejected() {
        let cfg = RunConfig {
            excitation: Excitation::Ws,
            ..RunConfig::default()
        };
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn depth_and_weight_defaults() {
        let cfg = RunConfig::default();
        assert_eq!(cfg.step1_depth_for(4), 10);
        assert_eq!(cfg.step1_depth_for(6), 15);
        assert_eq!(cfg.step1_depth_for(8), 20);
        assert_eq!(cfg.step3_depth_for(4), 15);
        assert_eq!(cfg.step3_depth_for(8), 25);
        assert_eq!(cfg.ssvqe().weights, vec![2.0, 1.0]);
        let fermion = RunConfig {
            model: ModelSpec::Fermion {
                file: "terms.jsonl".into(),
                subsystem_sizes: vec![6, 6],
            },
            excitation: Excitation::Wd,
            ..RunConfig::default()
        };
        assert_eq!(fermion.ssvqe().weights, vec![7.0, 2.0]);
        assert_eq!(fermion.step3_depth_for(8), 80);
    }
}
