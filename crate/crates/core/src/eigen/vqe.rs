//! VQE and SSVQE on the layered RY/RZ/CZ ansatz.

use serde::{Deserialize, Serialize};

use super::optimizer::{self, derive_seed, uniform_angles, GradientMode, OptimizerConfig};
use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::statevector::{adjoint_gradient, run_ansatz, AnsatzSpec, Observable, StateVector};

/// Weighted sum `sum_r w_r <ref_r| U^dag O U |ref_r>` as a function of the circuit parameters.
pub struct AnsatzCost<'a, O: Observable + ?Sized> {
    pub spec: AnsatzSpec,
    pub observable: &'a O,
    /// `(basis index, weight)` pairs.
    pub references: Vec<(usize, f64)>,
    pub gradient: GradientMode,
    pub exec: Exec,
}

impl<O: Observable + ?Sized> AnsatzCost<'_, O> {
    pub fn value(&self, params: &[f64]) -> Result<f64> {
        let mut total = 0.0;
        for &(reference, weight) in &self.references {
            let state = run_ansatz(&self.spec, params, reference)?;
            total += weight * state.expectation_with(self.exec, self.observable)?;
        }
        Ok(total)
    }

    pub fn value_and_gradient(&self, params: &[f64]) -> Result<(f64, Vec<f64>)> {
        match self.gradient {
            GradientMode::Adjoint => adjoint_gradient(
                self.exec,
                &self.spec,
                params,
                self.observable,
                &self.references,
            ),
            GradientMode::ParameterShift => {
                let value = self.value(params)?;
                let shift = std::f64::consts::FRAC_PI_2;
                let grad = par::map_range(self.exec, params.len(), |k| {
                    let mut p = params.to_vec();
                    p[k] = params[k] + shift;
                    let up = self.value(&p)?;
                    p[k] = params[k] - shift;
                    let down = self.value(&p)?;
                    Ok((up - down) / 2.0)
                });
                Ok((value, grad.into_iter().collect::<Result<Vec<_>>>()?))
            }
            GradientMode::FiniteDifference { step } => {
                let value = self.value(params)?;
                let grad = par::map_range(self.exec, params.len(), |k| {
                    let mut p = params.to_vec();
                    p[k] = params[k] + step;
                    let up = self.value(&p)?;
                    p[k] = params[k] - step;
                    let down = self.value(&p)?;
                    Ok((up - down) / (2.0 * step))
                });
                Ok((value, grad.into_iter().collect::<Result<Vec<_>>>()?))
            }
        }
    }

    /// BFGS from `cfg.restarts` uniform random starts; returns `(cost, params)`.
    pub fn optimize(&self, cfg: &OptimizerConfig) -> Result<(f64, Vec<f64>)> {
        cfg.validate()?;
        let n = self.spec.n_params();
        let starts: Vec<Vec<f64>> = (0..cfg.restarts)
            .map(|r| uniform_angles(n, derive_seed(cfg.seed, r as u64)))
            .collect();
        let oracle = |x: &[f64]| self.value_and_gradient(x);
        let best = optimizer::best_of(cfg.exec, &oracle, &starts, cfg.max_iterations, cfg.tolerance)?;
        Ok((best.value, best.params))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VqeResult {
    pub energy: f64,
    pub params: Vec<f64>,
    pub state: StateVector,
}

pub fn vqe_ground<O: Observable + ?Sized>(
    h: &O,
    spec: &AnsatzSpec,
    cfg: &OptimizerConfig,
) -> Result<VqeResult> {
    check_register(h, spec)?;
    let cost = AnsatzCost {
        spec: *spec,
        observable: h,
        references: vec![(0, 1.0)],
        gradient: cfg.gradient,
        exec: cfg.exec,
    };
    let (_, params) = cost.optimize(cfg)?;
    let state = run_ansatz(spec, &params, 0)?;
    let energy = state.expectation_with(cfg.exec, h)?;
    Ok(VqeResult {
        energy,
        params,
        state,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SsvqeConfig {
    /// Strictly decreasing positive weights, one per reference.
    pub weights: Vec<f64>,
    /// Computational-basis indices of the references (qubit 1 is the most significant bit).
    pub references: Vec<usize>,
}

impl SsvqeConfig {
    /// Weights `(2, 1)` on `|0...00>`, `|0...01>`.
    pub fn spin_default() -> Self {
        SsvqeConfig {
            weights: vec![2.0, 1.0],
            references: vec![0, 1],
        }
    }

    /// Weights `(7, 2)` on `|0...00>`, `|0...01>`.
    pub fn fermion_default() -> Self {
        SsvqeConfig {
            weights: vec![7.0, 2.0],
            references: vec![0, 1],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.weights.is_empty() || self.weights.len() != self.references.len() {
            return Err(Error::Config(format!(
                "{} weights for {} references",
                self.weights.len(),
                self.references.len()
            )));
        }
        if self.weights.iter().any(|w| !(*w > 0.0)) {
            return Err(Error::Config("SSVQE weights must be positive".into()));
        }
        if self.weights.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::Config("SSVQE weights must be strictly decreasing".into()));
        }
        for (i, a) in self.references.iter().enumerate() {
            if self.references[..i].contains(a) {
                return Err(Error::Config(format!("reference {a} repeated")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SsvqeLevel {
    pub energy: f64,
    pub reference: usize,
    pub state: StateVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SsvqeResult {
    /// In reference order, i.e. by decreasing weight.
    pub levels: Vec<SsvqeLevel>,
    pub params: Vec<f64>,
    pub cost: f64,
}

impl SsvqeResult {
    pub fn energies(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.energy).collect()
    }
}

pub fn ssvqe<O: Observable + ?Sized>(
    h: &O,
    spec: &AnsatzSpec,
    cfg: &OptimizerConfig,
    s: &SsvqeConfig,
) -> Result<SsvqeResult> {
    s.validate()?;
    check_register(h, spec)?;
    let dim = 1usize << spec.n_qubits;
    if let Some(r) = s.references.iter().find(|&&r| r >= dim) {
        return Err(Error::Config(format!(
            "reference {r} outside a {}-qubit register",
            spec.n_qubits
        )));
    }
    let cost = AnsatzCost {
        spec: *spec,
        observable: h,
        references: s.references.iter().copied().zip(s.weights.iter().copied()).collect(),
        gradient: cfg.gradient,
        exec: cfg.exec,
    };
    let (value, params) = cost.optimize(cfg)?;
    let levels = s
        .references
        .iter()
        .map(|&reference| {
            let state = run_ansatz(spec, &params, reference)?;
            Ok(SsvqeLevel {
                energy: state.expectation_with(cfg.exec, h)?,
                reference,
                state,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SsvqeResult {
        levels,
        params,
        cost: value,
    })
}

fn check_register<O: Observable + ?Sized>(h: &O, spec: &AnsatzSpec) -> Result<()> {
    if h.n_qubits() != spec.n_qubits {
        return Err(Error::Dimension(format!(
            "{}-qubit Hamiltonian with a {}-qubit ansatz",
            h.n_qubits(),
            spec.n_qubits
        )));
    }
    Ok(())
}
