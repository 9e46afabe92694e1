//! Configuration files, snapshots, CSV output and the batch jobs run by the
//! `biaxframe` binary.

pub mod commands;
pub mod config;
pub mod output;
pub mod snapshot;

pub use commands::{check_coeffs, lp_analyze, run_job, twin_job, RunSummary, TwinSummary};
pub use config::{parse_config, RunConfig};
pub use output::{write_energy_csv, write_metrics_csv, ENERGY_COLUMNS, METRIC_COLUMNS};
pub use snapshot::{read_snapshot, write_snapshot, SnapshotHeader, SNAPSHOT_VERSION};
