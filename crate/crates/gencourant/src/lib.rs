//! Scene files, command dispatch and JSON reports for the `gencourant`
//! command-line checker.

pub mod commands;
pub mod error;
pub mod report;
pub mod scene;

pub use commands::{run_command, Command};
pub use error::CliError;
pub use report::Report;
pub use scene::{load_scene, parse_scene, Overrides, Scene};
