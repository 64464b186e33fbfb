// SPDX-License-Identifier: MIT OR Apache-2.0

//! Experiment harness for AR(1) change-point detection: reproducible
//! subcommands over the estimation engine, flat `key = value` configs, and
//! deterministic CSV outputs.

#![forbid(unsafe_code)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod reference;

pub use commands::CommandOutput;
pub use config::Config;
pub use error::CliError;
