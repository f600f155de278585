//! File formats, run orchestration, and reporting around `subweave-core`.
//!
//! The core crate computes; this crate touches the world:
//!
//! - [`manifest`] — the tab-separated corpus listing
//! - [`vocab_io`] — the vocabulary file format
//! - [`config`] — the TOML run configuration
//! - [`run`] — staged, resumable execution against a run directory
//! - [`report`] — JSON and aligned-text metric reports
//! - [`synth`] — the bundled deterministic six-language corpus
//!
//! The `subweave` binary wires these into subcommands.

#![deny(unsafe_code)]
#![warn(missing_docs)]

pub mod config;
pub mod error;
pub mod fsio;
pub mod manifest;
pub mod report;
pub mod run;
pub mod synth;
pub mod vocab_io;

pub use error::{AppError, Result};
