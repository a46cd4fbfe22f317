//! Verification runs over homogeneous descriptions of complex hyperbolic
//! space, reported as versioned JSON.
//!
//! The binary `chyp` is a thin shell over [`run_verify`], [`run_sweep`] and
//! [`run_classify`].

pub mod config;
pub mod error;
pub mod report;
pub mod run;

pub use config::{RunConfig, SpecEntry, Specs};
pub use error::{CliError, CliResult};
pub use report::{Check, Report, SCHEMA};
pub use run::{run_classify, run_sweep, run_verify};
