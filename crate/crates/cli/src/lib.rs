//! Command-line front end: subcommands for single runs, benchmarks, exact distances, code
//! generation and circuit evaluation, plus the end-to-end acceptance checks.

pub mod acceptance;
pub mod app;

pub use app::{run, CliOutput};
