//! Monte Carlo campaigns, statistics and file output.

pub mod campaign;
pub mod config;
pub mod export;
pub mod stats;

pub use campaign::{
    derive_seed, iteration_topology, run_campaign, run_solver, sweep_link_length, RunReport,
    SweepPoint,
};
pub use config::{ScenarioConfig, Solver};
pub use export::{export, export_sweep, read_runs_csv, RunRow};
pub use stats::{percentile, summarize, Boxplot, EmpiricalCdf, Gain, SolverSummary, Summary};
