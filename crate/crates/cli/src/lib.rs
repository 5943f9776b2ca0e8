//! File formats, reports and the command runner behind the `privdist`
//! binary.

pub mod config;
pub mod formats;
pub mod report;
pub mod run;

pub use config::{Cli, Command, GlobalArgs, RunConfig};
pub use run::{execute, write_outputs, RunOutput, Status};
