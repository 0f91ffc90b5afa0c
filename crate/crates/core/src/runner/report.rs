use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{Backend, ReportFormat};
use crate::effective::{PenaltyCheck, PenaltyVector};
use crate::error::Result;

pub const CSV_HEADER: [&str; 10] = ["model", "split", "basis", "E0", "E0_err", "E1", "E1_err", "TR", "N_req", "seed"];

/// Wall-clock seconds per stage. Not part of the reproducible result.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub step1: f64,
    pub step2: f64,
    pub step3: f64,
    pub baseline: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub model: String,
    pub split: String,
    pub basis: String,
    pub step1: Backend,
    pub step3: Backend,
    /// Low-lying energies from Step 3, by level.
    pub energies: Vec<f64>,
    /// Exact levels of the full Hamiltonian, when the baseline ran.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<Vec<f64>>,
    /// `|E - E_exact| / |E_exact|` per level; present exactly when `exact` is.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub relative_errors: Option<Vec<f64>>,
    /// Exact levels of the unpadded coarse-grained model, when small enough.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub effective_exact: Option<Vec<f64>>,
    /// `<Psi_0| H |Psi_0>` for the product of the Step 1 references.
    pub local_energy: f64,
    pub subsystem_energies: Vec<f64>,
    /// Local basis dimension per subsystem.
    pub k: Vec<usize>,
    pub truncation_rate: f64,
    /// Effective register width.
    pub required_qubits: usize,
    /// Largest register used by any step.
    pub peak_qubits: usize,
    pub penalty: PenaltyVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub penalty_check: Option<PenaltyCheck>,
    pub seed: u64,
    #[serde(default)]
    pub timing: Timing,
}

impl RunReport {
    /// Copy with timings zeroed, for comparing runs.
    pub fn without_timing(&self) -> RunReport {
        RunReport {
            timing: Timing::default(),
            ..self.clone()
        }
    }

    pub fn load_json(path: &Path) -> Result<RunReport> {
        Ok(serde_json::from_str(&fs::read_to_string(path)?)?)
    }

    fn csv_record(&self) -> Vec<String> {
        let level = |i: usize| self.energies.get(i).map(|e| e.to_string()).unwrap_or_default();
        let err = |i: usize| {
            self.relative_errors
                .as_ref()
                .and_then(|r| r.get(i))
                .map(|e| e.to_string())
                .unwrap_or_default()
        };
        vec![
            self.model.clone(),
            self.split.clone(),
            self.basis.clone(),
            level(0),
            err(0),
            level(1),
            err(1),
            self.truncation_rate.to_string(),
            self.required_qubits.to_string(),
            self.seed.to_string(),
        ]
    }
}

pub fn write_csv<W: Write>(out: W, reports: &[RunReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in reports {
        w.write_record(r.csv_record())?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(mut out: W, report: &RunReport) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, report)?;
    writeln!(out)?;
    Ok(())
}

/// Write one report to `path` in the given format.
pub fn emit_report(report: &RunReport, format: ReportFormat, path: &Path) -> Result<()> {
    let file = fs::File::create(path)?;
    match format {
        ReportFormat::Json => write_json(file, report),
        ReportFormat::Csv => write_csv(file, std::slice::from_ref(report)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effective::PenaltyMode;

    fn sample(with_exact: bool) -> RunReport {
        RunReport {
            model: "heisenberg".into(),
            split: "2x4".into(),
            basis: "W2".into(),
            step1: Backend::Exact,
            step3: Backend::Exact,
            energies: vec![-13.497_123_456_789_01, -11.882_000_000_000_1],
            exact: with_exact.then(|| vec![-13.499_730_394_751_6, -11.928_5]),
            relative_errors: with_exact.then(|| vec![1.9e-4, 3.9e-3]),
            effective_exact: None,
            local_energy: -12.928,
            subsystem_energies: vec![-6.464, -6.464],
            k: vec![10, 10],
            truncation_rate: 0.390625,
            required_qubits: 8,
            peak_qubits: 8,
            penalty: PenaltyVector {
                lambdas: vec![12.1, 12.1],
                level: 1,
                gap_estimate: 1.3,
                mode: PenaltyMode::Excited,
            },
            penalty_check: None,
            seed: 42,
            timing: Timing {
                step1: 0.1,
                ..Timing::default()
            },
        }
    }

    #[test]
    fn json_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        let r = sample(true);
        emit_report(&r, ReportFormat::Json, &path).unwrap();
        assert_eq!(RunReport::load_json(&path).unwrap(), r);
    }

    #[test]
    fn csv_header_and_empty_errors() {
        let mut buf = Vec::new();
        write_csv(&mut buf, &[sample(false), sample(true)]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "model,split,basis,E0,E0_err,E1,E1_err,TR,N_req,seed");
        let cells: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(cells[4], "");
        assert_eq!(cells[6], "");
        let cells: Vec<&str> = lines[2].split(',').collect();
        assert_eq!(cells[4], "0.00019");
    }

    #[test]
    fn timing_is_ignored_by_comparison_copy() {
        let a = sample(true);
        let mut b = a.clone();
        b.timing.step3 = 9.0;
        assert_ne!(a, b);
        assert_eq!(a.without_timing(), b.without_timing());
    }
}
