//! JSON-configured experiments with invariant checklists and plot-ready outputs.

mod config;
mod output;
mod runner;
mod tolerances;

pub use config::{
    parse_config, parse_config_str, ConfigError, DeltaConfig, DiffusionConfig, EvolutionConfig,
    GaussianConfig, GridConfig, OutputConfig, PotentialConfig, ScenarioConfig, ScenarioKind, TailConfig,
};
pub use output::{emit_plot_data, write_csv, Column, OutputFile};
pub use runner::{invariant_table, run_scenario, Check, Relation, RunError, RunReport};
pub use tolerances::Tolerances;
