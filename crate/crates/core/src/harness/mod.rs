//! Seeded Monte-Carlo experiments and file I/O.
//!
//! Three studies are available: interval coverage, the sampling
//! distribution of `θ̂`, and the power of the two-network test. Every
//! replicate draws its networks from a seed derived from
//! `(master_seed, N, replicate)` alone, and rows are aggregated in a fixed
//! order, so a CSV is a pure function of its configuration.

mod config;
mod experiments;
mod io;
mod ks;

pub use config::{ExperimentConfig, ExperimentKind, ModelConfig};
pub use experiments::{
    replicate_seed, run_coverage_experiment, run_distribution_experiment, run_experiment,
    run_power_experiment, CoverageRow, DistributionRow, ExperimentOutput, PowerRow,
};
pub use io::{load_matrix, parse_matrix, render_matrix, save_matrix};
pub use ks::ks_statistic;
