//! # mmspace
//!
//! File formats, experiment scenarios and the `mmspace` command line tool on
//! top of [`mmspace_core`].

pub mod cli;
pub mod config;
pub mod error;
pub mod io;
pub mod output;
pub mod scenarios;

pub use config::{Scenario, ScenarioConfig};
pub use error::{CliError, Result};
pub use scenarios::run_scenario;
