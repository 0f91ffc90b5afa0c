use std::fs;
use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;

use deepvqe::eigen::GradientMode;
use deepvqe::runner::{self, ModelSpec, ReportFormat, RunConfig};
use deepvqe::{Exec, Result};

#[derive(Parser)]
#[command(name = "deepvqe", version, about = "Divide-and-conquer eigensolver pipeline on a statevector simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run local solves, coarse-graining and the effective solve.
    Run(RunArgs),
    /// Exact low levels of the full model only.
    Ed(RunArgs),
    /// Compare the low spectrum of the padded model with the unpadded one.
    VerifyPenalty(RunArgs),
    /// All Heisenberg splits with both boundary bases and exact backends, as CSV.
    Table1 {
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        sequential: bool,
    },
}

fn serde_value<T: DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.replace('-', "_"))).map_err(|e| e.to_string())
}

fn gradient_mode(s: &str) -> std::result::Result<GradientMode, String> {
    match s {
        "adjoint" => Ok(GradientMode::Adjoint),
        "parameter-shift" | "parameter_shift" => Ok(GradientMode::ParameterShift),
        "finite-difference" | "finite_difference" => Ok(GradientMode::FiniteDifference { step: 1e-6 }),
        other => Err(format!("unknown gradient mode {other}")),
    }
}

/// Flags override the matching fields of `--config`.
#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Heisenberg chain: number of subsystems.
    #[arg(long)]
    n_sub: Option<usize>,
    /// Heisenberg chain: qubits per subsystem.
    #[arg(long)]
    n_qubit: Option<usize>,
    /// Fermionic model: JSON-lines term file.
    #[arg(long)]
    terms: Option<PathBuf>,
    /// Fermionic model: comma-separated subsystem sizes.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    /// w, w1, w2, ws, wd or wd-complete.
    #[arg(long, value_parser = serde_value::<runner::Excitation>)]
    basis: Option<runner::Excitation>,
    /// vqe or exact.
    #[arg(long, value_parser = serde_value::<runner::Backend>)]
    step1: Option<runner::Backend>,
    /// vqe or exact.
    #[arg(long, value_parser = serde_value::<runner::Backend>)]
    step3: Option<runner::Backend>,
    #[arg(long)]
    levels: Option<usize>,
    #[arg(long)]
    step1_depth: Option<usize>,
    #[arg(long)]
    step3_depth: Option<usize>,
    /// Step 1 restarts.
    #[arg(long)]
    restarts: Option<usize>,
    #[arg(long)]
    step3_restarts: Option<usize>,
    #[arg(long)]
    max_iterations: Option<usize>,
    /// adjoint, parameter-shift or finite-difference.
    #[arg(long, value_parser = gradient_mode)]
    gradient: Option<GradientMode>,
    /// ground, excited, unconditional or zero.
    #[arg(long, value_parser = serde_value::<deepvqe::effective::PenaltyMode>)]
    penalty: Option<deepvqe::effective::PenaltyMode>,
    /// Gap scale for the excited penalty.
    #[arg(long)]
    gap: Option<f64>,
    #[arg(long)]
    rank_tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Use the single-threaded kernels.
    #[arg(long)]
    sequential: bool,
    /// Skip exact diagonalization of the full model.
    #[arg(long)]
    no_baseline: bool,
    #[arg(long)]
    verify_penalty: bool,
    #[arg(long)]
    output: Option<PathBuf>,
    /// json or csv.
    #[arg(long, value_parser = serde_value::<ReportFormat>)]
    format: Option<ReportFormat>,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let Some(file) = &self.terms {
            let sizes = self.sizes.clone().or_else(|| match &cfg.model {
                ModelSpec::Fermion { subsystem_sizes, .. } => Some(subsystem_sizes.clone()),
                _ => None,
            });
            cfg.model = ModelSpec::Fermion {
                file: file.clone(),
                subsystem_sizes: sizes.ok_or_else(|| deepvqe::Error::Config("--terms needs --sizes".into()))?,
            };
            if self.basis.is_none() && cfg.excitation.fermion().is_none() {
                cfg.excitation = runner::Excitation::Ws;
            }
        } else if self.n_sub.is_some() || self.n_qubit.is_some() {
            let (n_sub, n_qubit) = match cfg.model {
                ModelSpec::Heisenberg { n_sub, n_qubit } => (n_sub, n_qubit),
                ModelSpec::Fermion { .. } => (2, 4),
            };
            cfg.model = ModelSpec::Heisenberg {
                n_sub: self.n_sub.unwrap_or(n_sub),
                n_qubit: self.n_qubit.unwrap_or(n_qubit),
            };
        }
        macro_rules! set {
            ($field:ident, $target:expr) => {
                if let Some(v) = self.$field.clone() {
                    $target = v;
                }
            };
        }
        set!(basis, cfg.excitation);
        set!(step1, cfg.step1);
        set!(step3, cfg.step3);
        set!(levels, cfg.levels);
        set!(restarts, cfg.optimizer.restarts);
        set!(step3_restarts, cfg.step3_restarts);
        set!(max_iterations, cfg.optimizer.max_iterations);
        set!(gradient, cfg.optimizer.gradient);
        set!(penalty, cfg.penalty);
        set!(rank_tol, cfg.rank_tol);
        set!(seed, cfg.seed);
        set!(format, cfg.format);
        if self.step1_depth.is_some() {
            cfg.step1_depth = self.step1_depth;
        }
        if self.step3_depth.is_some() {
            cfg.step3_depth = self.step3_depth;
        }
        if self.gap.is_some() {
            cfg.gap_estimate = self.gap;
        }
        if self.output.is_some() {
            cfg.output = self.output.clone();
        }
        if self.sequential {
            cfg.exec = Exec::Sequential;
            cfg.optimizer.exec = Exec::Sequential;
        }
        cfg.baseline &= !self.no_baseline;
        cfg.verify_penalty |= self.verify_penalty;
        Ok(cfg)
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run(args) => {
            let cfg = args.config()?;
            let report = runner::run_pipeline(&cfg)?;
            match &cfg.output {
                Some(path) => runner::emit_report(&report, cfg.format, path)?,
                None => match cfg.format {
                    ReportFormat::Json => runner::write_json(io::stdout().lock(), &report)?,
                    ReportFormat::Csv => runner::write_csv(io::stdout().lock(), &[report])?,
                },
            }
            Ok(true)
        }
        Command::Ed(args) => {
            let cfg = args.config()?;
            let levels = runner::run_baseline(&cfg)?;
            print_json(&serde_json::json!({ "model": cfg.model.label(), "levels": levels }))?;
            Ok(true)
        }
        Command::VerifyPenalty(args) => {
            let cfg = args.config()?;
            let check = runner::run_penalty_check(&cfg)?;
            print_json(&check)?;
            Ok(check.passed)
        }
        Command::Table1 {
            output,
            seed,
            sequential,
        } => {
            let exec = if sequential { Exec::Sequential } else { Exec::default() };
            let reports = runner::run_table1(seed, exec)?;
            match output {
                Some(path) => runner::write_csv(fs::File::create(path)?, &reports)?,
                None => runner::write_csv(io::stdout().lock(), &reports)?,
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
