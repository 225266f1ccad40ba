//! Configured batches of paired runs and their on-disk artifacts.

pub mod config;
pub mod persist;
pub mod seeds;
pub mod sweep;

pub use config::{ExperimentConfig, SweepAxis};
pub use seeds::derive_seed;
pub use sweep::{
    execute_run, run_epsilon_sweep, run_field_controls, run_particle_sweep, run_sweep, run_theta_sweep, ControlsResult,
    ExecOptions, ModeStats, RunPaths, RunSummary, SweepResult, SweepSpec, ValueStats, C_THRESHOLD,
};
