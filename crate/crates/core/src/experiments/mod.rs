//! Run configuration, built-in scenarios and the command-line front end.

pub mod canonical;
pub mod cli;
pub mod config;

pub use canonical::{CanonicalName, CanonicalOutcome, CheckLine};
pub use config::{ConfigError, RunConfig};
