//! Configuration, experiment orchestration over h, pairing of predictions
//! with oracle resonances, slope fits and report output.

pub mod checks;
pub mod compare;
pub mod config;
pub mod fit;
pub mod fixtures;
pub mod report;

pub use checks::{consistency_scan, sweep_checks, ConsistencyRow, SweepCheck};
pub use compare::{compare_at, pair, run_compare, CompareOutput, ComparisonRow, HRun, OracleOutput, CSV_HEADER};
pub use config::{ExperimentConfig, Potentials, Sweep};
pub use fit::{convergence_fit, loglog_fit, ConvergenceFit, LineFit};
pub use fixtures::Fixtures;
pub use report::{csv_string, write_csv, write_plot_data};
