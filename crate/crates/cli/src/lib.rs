//! Command-line front end for `infoengine-core`: configuration, CSV and SVG
//! output, the verification suite and rayon-parallel drivers.

pub mod cli;
pub mod commands;
pub mod config;
mod error;
pub mod output;
pub mod parallel;
pub mod svg;
pub mod verify;

pub use error::CliError;
