//! Command-line orchestration: run configuration and pipeline commands.

pub mod config;
pub mod pipeline;

pub use config::{parse_config, Driver, MeshConfig, NozzleConfig, RunConfig, CONFIG_SCHEMA_VERSION};
pub use pipeline::{build_mesh, build_report, run_pipeline, Command, Failure};

/// Version line: crate version plus the on-disk format versions.
pub const VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    " (config schema 1, mesh format axisym-mesh v1, checkpoint format v1)"
);
