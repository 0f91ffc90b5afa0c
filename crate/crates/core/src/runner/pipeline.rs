use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{Backend, ModelSpec, RunConfig};
use super::report::{RunReport, Timing};
use crate::coarse_grain::{build_local_basis, ExcitationSet, LocalBasis};
use crate::effective::{
    assemble_effective_with, first_order_gap, penalty_bounds, resource_metrics, verify_penalty, EffectiveHamiltonian,
    EmbeddedModel, PenaltyCheck, PenaltyMode, PenaltyVector,
};
use crate::eigen::optimizer::derive_seed;
use crate::eigen::{
    dense_spectrum, exact_spectrum_with, spectrum::iterative_spectrum, ssvqe, vqe_ground, ExactConfig, LanczosConfig,
    OptimizerConfig,
};
use crate::error::{Error, Result, Stage, StageExt};
use crate::linalg;
use crate::models::{
    fermion_excitation_set, fermion_hamiltonian, heisenberg_chain, load_fermion_terms, spin_excitation_set,
    FermionTerm, Partition, SplitHamiltonian,
};
use crate::par::{self, Exec};
use crate::pauli::PauliSum;
use crate::statevector::{AnsatzSpec, StateVector};

/// Registers up to this size are diagonalized densely; Lanczos above.
const DENSE_QUBITS: usize = 10;
/// Largest coarse-grained dimension diagonalized densely for reference values.
const DENSE_EFFECTIVE_DIM: usize = 2500;
const PENALTY_CHECK_TOL: f64 = 1e-9;

const STEP1_STREAM: u64 = 0x100;
const STEP3_STREAM: u64 = 0x200;
const LANCZOS_STREAM: u64 = 0x300;

/// Model Hamiltonian, its split and the excitation set of every subsystem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub hamiltonian: PauliSum,
    pub split: SplitHamiltonian,
    pub sets: Vec<ExcitationSet>,
}

impl Problem {
    pub fn partition(&self) -> &Partition {
        &self.split.partition
    }
}

fn hermitian_part(h: &PauliSum) -> PauliSum {
    &(h + &h.adjoint()) * Complex64::new(0.5, 0.0)
}

pub fn fermion_problem(terms: &[FermionTerm], cfg: &RunConfig, sizes: &[usize]) -> Result<Problem> {
    let kind = cfg
        .excitation
        .fermion()
        .ok_or_else(|| Error::Config(format!("{} is not a fermionic excitation set", cfg.excitation.label())))?;
    let partition = Partition::from_sizes(sizes)?;
    let n = partition.n_total();
    if let Some(t) = terms.iter().find(|t| t.max_mode() > n) {
        return Err(Error::Index(format!("mode {} outside the {n}-mode register", t.max_mode())));
    }
    let hamiltonian = hermitian_part(&fermion_hamiltonian(terms, n)?);
    let split = SplitHamiltonian::new(&hamiltonian, &partition)?;
    let sets = (0..partition.n_subsystems())
        .map(|i| fermion_excitation_set(kind, &partition, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(Problem {
        hamiltonian,
        split,
        sets,
    })
}

pub fn build_problem(cfg: &RunConfig) -> Result<Problem> {
    match &cfg.model {
        ModelSpec::Heisenberg { n_sub, n_qubit } => {
            let kind = cfg
                .excitation
                .spin()
                .ok_or_else(|| Error::Config(format!("{} is not a spin excitation set", cfg.excitation.label())))?;
            let partition = Partition::uniform(*n_sub, *n_qubit)?;
            let hamiltonian = heisenberg_chain(partition.n_total())?;
            let split = SplitHamiltonian::new(&hamiltonian, &partition)?;
            let sets = (0..*n_sub)
                .map(|i| spin_excitation_set(kind, &partition, i))
                .collect::<Result<Vec<_>>>()?;
            Ok(Problem {
                hamiltonian,
                split,
                sets,
            })
        }
        ModelSpec::Fermion { file, subsystem_sizes } => {
            let terms = load_fermion_terms(file)?;
            fermion_problem(&terms, cfg, subsystem_sizes)
        }
    }
}

fn lanczos_config(cfg: &RunConfig, stream: u64) -> LanczosConfig {
    LanczosConfig {
        seed: derive_seed(cfg.seed, LANCZOS_STREAM + stream),
        exec: cfg.exec,
        ..LanczosConfig::default()
    }
}

fn optimizer_config(cfg: &RunConfig, stream: u64) -> OptimizerConfig {
    OptimizerConfig {
        seed: derive_seed(cfg.seed, stream),
        exec: cfg.exec,
        ..cfg.optimizer.clone()
    }
}

/// Relative spacing below which two subsystem levels count as degenerate.
const DEGENERACY_TOL: f64 = 1e-8;

/// Ground vector of `h`; optionally a random unit vector in a degenerate ground space.
fn exact_reference(cfg: &RunConfig, h: &PauliSum, i: usize) -> Result<LocalSolution> {
    let k = if cfg.sample_degenerate_references { 4 } else { 1 };
    let (vals, vecs) = exact_levels(cfg, h, k, true, i as u64)?;
    let vecs = vecs.ok_or_else(|| Error::Numeric {
        message: format!("no ground vector for subsystem {i}"),
        params: Vec::new(),
    })?;
    let tol = DEGENERACY_TOL * vals[0].abs().max(1.0);
    let degenerate = vals.iter().take_while(|&&v| v - vals[0] <= tol).count();
    let amps = if degenerate > 1 {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(cfg.seed, STEP1_STREAM + 0x80 + i as u64));
        let weights: Vec<Complex64> = (0..degenerate)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        (0..vecs[0].len())
            .map(|a| weights.iter().zip(&vecs).map(|(w, v)| w * v[a]).sum())
            .collect()
    } else {
        vecs[0].clone()
    };
    let mut state = StateVector::from_amplitudes(amps)?;
    state.normalize()?;
    Ok(LocalSolution {
        energy: vals[0],
        state,
    })
}

/// The `k` lowest levels of `h`, with eigenvectors.
pub fn exact_levels(cfg: &RunConfig, h: &PauliSum, k: usize, vectors: bool, stream: u64) -> Result<(Vec<f64>, Option<Vec<Vec<Complex64>>>)> {
    let k = k.min(1usize << h.n_qubits());
    let exact = ExactConfig {
        dense_max_qubits: DENSE_QUBITS,
        vectors,
        lanczos: lanczos_config(cfg, stream),
    };
    let r = exact_spectrum_with(h, k, &exact)?;
    Ok((r.eigenvalues, r.eigenvectors))
}

/// Step 1 result for one subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSolution {
    pub energy: f64,
    pub state: StateVector,
}

pub fn solve_local(cfg: &RunConfig, problem: &Problem) -> Result<Vec<LocalSolution>> {
    let p = problem.partition();
    (0..p.n_subsystems())
        .map(|i| {
            let h = &problem.split.intra[i];
            match cfg.step1 {
                Backend::Exact => exact_reference(cfg, h, i),
                Backend::Vqe => {
                    let spec = AnsatzSpec::new(p.len(i), cfg.step1_depth_for(p.len(i)));
                    let r = vqe_ground(h, &spec, &optimizer_config(cfg, STEP1_STREAM + i as u64))?;
                    Ok(LocalSolution {
                        energy: r.energy,
                        state: r.state,
                    })
                }
            }
        })
        .collect()
}

/// Steps 1 and 2: local references, local bases and the coarse-grained model.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub problem: Problem,
    pub locals: Vec<LocalSolution>,
    pub bases: Vec<LocalBasis>,
    pub effective: EffectiveHamiltonian,
    pub timing: Timing,
}

impl Prepared {
    /// `<Psi_0| H |Psi_0>` for the product of the local references.
    pub fn local_energy(&self) -> Result<f64> {
        let coords = self
            .bases
            .iter()
            .map(|b| b.reference_coordinates(0))
            .collect::<Result<Vec<_>>>()?;
        self.effective.product_expectation(&coords)
    }
}

pub fn prepare(cfg: &RunConfig) -> Result<Prepared> {
    cfg.validate().stage(Stage::Config)?;
    let problem = build_problem(cfg).stage(Stage::Model)?;
    let t = Instant::now();
    let locals = solve_local(cfg, &problem).stage(Stage::LocalSolve)?;
    let step1 = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let bases = problem
        .sets
        .iter()
        .zip(&locals)
        .map(|(set, l)| build_local_basis(std::slice::from_ref(&l.state), set, cfg.rank_tol))
        .collect::<Result<Vec<_>>>()
        .stage(Stage::CoarseGrain)?;
    let effective = assemble_effective_with(cfg.exec, &problem.split, &bases).stage(Stage::CoarseGrain)?;
    let step2 = t.elapsed().as_secs_f64();
    Ok(Prepared {
        problem,
        locals,
        bases,
        effective,
        timing: Timing {
            step1,
            step2,
            ..Timing::default()
        },
    })
}

/// Penalties for `cfg.levels` levels; the zero penalty must pass the spectral check.
pub fn choose_penalty(cfg: &RunConfig, eff: &EffectiveHamiltonian) -> Result<(PenaltyVector, Option<PenaltyCheck>)> {
    let level = cfg.levels - 1;
    let gap = match cfg.gap_estimate {
        Some(g) => g,
        None => first_order_gap(eff, level)?,
    };
    let penalty = penalty_bounds(eff, level, gap, cfg.penalty)?;
    let check = if cfg.penalty == PenaltyMode::Zero || cfg.verify_penalty {
        let scale = eff.blocks().iter().map(linalg::max_abs).fold(1.0, f64::max);
        Some(verify_penalty(eff, &penalty, PENALTY_CHECK_TOL * scale)?)
    } else {
        None
    };
    if cfg.penalty == PenaltyMode::Zero {
        if let Some(c) = check.as_ref().filter(|c| !c.passed) {
            return Err(Error::Precondition(format!(
                "zero penalty changes the low spectrum by {:.3e}",
                c.max_deviation
            )));
        }
    }
    Ok((penalty, check))
}

fn solve_embedded(cfg: &RunConfig, model: &EmbeddedModel) -> Result<Vec<f64>> {
    let levels = cfg.levels.min(model.dim());
    match cfg.step3 {
        Backend::Exact if model.dim() <= 1 << DENSE_QUBITS => {
            Ok(dense_spectrum(&model.to_dense()?, levels, false)?.eigenvalues)
        }
        Backend::Exact => Ok(iterative_spectrum(model, levels, &lanczos_config(cfg, 1 << 16))?.eigenvalues),
        Backend::Vqe => {
            let n = crate::statevector::Observable::n_qubits(model);
            let spec = AnsatzSpec::new(n, cfg.step3_depth_for(n));
            let opt = OptimizerConfig {
                restarts: cfg.step3_restarts,
                ..optimizer_config(cfg, STEP3_STREAM)
            };
            if levels == 1 {
                Ok(vec![vqe_ground(model, &spec, &opt)?.energy])
            } else {
                Ok(ssvqe(model, &spec, &opt, &cfg.ssvqe())?.energies())
            }
        }
    }
}

fn relative_errors(values: &[f64], exact: &[f64]) -> Vec<f64> {
    values
        .iter()
        .zip(exact)
        .map(|(v, e)| (v - e).abs() / e.abs().max(f64::MIN_POSITIVE))
        .collect()
}

pub fn run_pipeline(cfg: &RunConfig) -> Result<RunReport> {
    let mut prepared = prepare(cfg)?;
    let eff = &prepared.effective;
    let t = Instant::now();
    let (penalty, penalty_check) = choose_penalty(cfg, eff).stage(Stage::Embed)?;
    let model = EmbeddedModel::new(eff, &penalty).stage(Stage::Embed)?;
    let energies = solve_embedded(cfg, &model).stage(Stage::EffectiveSolve)?;
    let effective_exact = if eff.total_dim() <= DENSE_EFFECTIVE_DIM {
        let all = eff.spectrum().stage(Stage::EffectiveSolve)?;
        Some(all[..cfg.levels.min(all.len())].to_vec())
    } else {
        None
    };
    prepared.timing.step3 = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let exact = if cfg.baseline {
        Some(exact_levels(cfg, &prepared.problem.hamiltonian, cfg.levels, false, 1 << 20).stage(Stage::Baseline)?.0)
    } else {
        None
    };
    prepared.timing.baseline = t.elapsed().as_secs_f64();
    let sizes = prepared.problem.partition().sizes().to_vec();
    let metrics = resource_metrics(eff, &sizes).stage(Stage::Report)?;
    Ok(RunReport {
        model: cfg.model.label().into(),
        split: prepared.problem.partition().label(),
        basis: cfg.excitation.label().into(),
        step1: cfg.step1,
        step3: cfg.step3,
        relative_errors: exact.as_ref().map(|e| relative_errors(&energies, e)),
        energies,
        exact,
        effective_exact,
        local_energy: prepared.local_energy().stage(Stage::Report)?,
        subsystem_energies: prepared.locals.iter().map(|l| l.energy).collect(),
        k: eff.dims(),
        truncation_rate: metrics.truncation_rate,
        required_qubits: metrics.required_qubits,
        peak_qubits: metrics.peak_qubits,
        penalty,
        penalty_check,
        seed: cfg.seed,
        timing: prepared.timing,
    })
}

/// Exact low levels of the full model only.
pub fn run_baseline(cfg: &RunConfig) -> Result<Vec<f64>> {
    cfg.validate().stage(Stage::Config)?;
    let problem = build_problem(cfg).stage(Stage::Model)?;
    Ok(exact_levels(cfg, &problem.hamiltonian, cfg.levels, false, 1 << 20)
        .stage(Stage::Baseline)?
        .0)
}

/// Steps 1 and 2 followed by the padded-versus-unpadded spectral comparison.
pub fn run_penalty_check(cfg: &RunConfig) -> Result<PenaltyCheck> {
    let prepared = prepare(cfg)?;
    let eff = &prepared.effective;
    let (penalty, _) = choose_penalty(
        &RunConfig {
            penalty: if cfg.penalty == PenaltyMode::Zero {
                PenaltyMode::Excited
            } else {
                cfg.penalty
            },
            ..cfg.clone()
        },
        eff,
    )
    .stage(Stage::Embed)?;
    let penalty = if cfg.penalty == PenaltyMode::Zero {
        PenaltyVector::zero(eff.n_subsystems(), cfg.levels - 1)
    } else {
        penalty
    };
    let scale = eff.blocks().iter().map(linalg::max_abs).fold(1.0, f64::max);
    verify_penalty(eff, &penalty, PENALTY_CHECK_TOL * scale).stage(Stage::Embed)
}

/// Every split and basis of the Heisenberg table with exact backends.
pub fn table1_grid(seed: u64, exec: Exec) -> Vec<RunConfig> {
    let splits = [(2, 4), (3, 4), (2, 6), (2, 8)];
    let mut grid = Vec::new();
    for (n_sub, n_qubit) in splits {
        for excitation in [super::config::Excitation::W1, super::config::Excitation::W2] {
            grid.push(RunConfig {
                model: ModelSpec::Heisenberg { n_sub, n_qubit },
                excitation,
                seed,
                exec,
                ..RunConfig::default()
            });
        }
    }
    grid
}

/// Run every cell of [`table1_grid`].
pub fn run_table1(seed: u64, exec: Exec) -> Result<Vec<RunReport>> {
    let grid = table1_grid(seed, exec);
    par::map_range(exec, grid.len(), |i| run_pipeline(&grid[i]))
        .into_iter()
        .collect()
}
