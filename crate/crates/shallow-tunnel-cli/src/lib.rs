//! Configuration, drivers and artifact writers behind the `shallow-tunnel`
//! command.

pub mod config;
pub mod error;
pub mod run;
pub mod verify;

pub use config::{parse_config, RunConfig};
pub use error::CliError;
pub use run::{emit_plot_script, run_case, run_sweep};
