//! Scenario configuration, presets, sweeps and file output.

pub mod config;
pub mod emit;
pub mod scenario;

pub use config::{load_config, FilterSpec, OutputFormat, ScenarioConfig, SweepParam, SweepSpec};
pub use emit::{write_outputs, ManifestEntry};
pub use scenario::{run_scenario, run_sweep, RunReport, ScenarioOutput, SweepRow, SweepTable};
