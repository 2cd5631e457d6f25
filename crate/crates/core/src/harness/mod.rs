//! File formats, configuration, counting statistics and reports behind the
//! `qinterf` binary.

pub mod config;
mod ingest;
mod montecarlo;
pub mod report;
mod run;

pub use config::{ExperimentConfig, Mode};
pub use ingest::{format_exact, read_cross_sections, write_cross_sections};
pub use montecarlo::{
    run_monte_carlo, simulate_trial, Exposure, McParams, McSummary, QUANTILE_LEVELS,
};
pub use report::{Format, Report, Section, Value};
pub use run::{
    classify_csv, fit_csv, monte_carlo_config, neutron_config, simulate_config, Input, RunOptions,
    Simulation,
};
