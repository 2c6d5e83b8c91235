//! Front end for the `etlab` binary: configuration, sweeps, CSV and SVG
//! output, and the invariant suite.

pub mod args;
pub mod config;
pub mod output;
pub mod plot;
pub mod run;
pub mod verify;

pub use run::{resolve_cli, run, RunError};
