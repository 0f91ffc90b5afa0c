//! Three-step pipeline, baselines and report output.

pub mod config;
pub mod pipeline;
pub mod report;

pub use config::{Backend, Excitation, ModelSpec, ReportFormat, RunConfig};
pub use pipeline::{
    build_problem, prepare, run_baseline, run_penalty_check, run_pipeline, run_table1, table1_grid, Prepared, Problem,
};
pub use report::{emit_report, write_csv, write_json, RunReport, Timing, CSV_HEADER};
