//! Command-line driver and file formats for `afem-core`: run configuration,
//! custom problem files, per-level CSV, mesh and indicator dumps, rate fits
//! and random solver cross-checks.

pub mod cli;
pub mod config;
pub mod custom;
mod error;
pub mod formats;
pub mod instances;
pub mod rates;
pub mod runner;

pub use error::{AfemError, Result};
