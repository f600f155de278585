//! Core algorithms for building multilingual subword vocabularies.
//!
//! Everything in this crate is `no_std` + `alloc`: pure in-memory computation
//! with deterministic, platform-independent results. File formats, the CLI,
//! and parallel execution live in the companion `subweave` crate.
//!
//! The modules compose into a pipeline:
//!
//! 1. [`corpus`] — normalization, language sampling weights, coverage alphabets
//! 2. [`unigram`] / [`bpe`] — per-language vocabulary training
//! 3. [`vocab`] — the scored vocabulary type and vocabulary union
//! 4. [`cluster`] — binary language vectors, spherical k-means under cosine distance
//! 5. [`allocate`] — largest-remainder size allocation across clusters
//! 6. [`pipeline`] — the staged orchestration, with the single-cluster case
//!    reducing exactly to joint training on the pooled corpus
//! 7. [`segment`] / [`analysis`] — encoding text with a trained vocabulary and
//!    measuring it (description length, OOV rate, Wasserstein-1, script makeup)

#![no_std]
#![deny(unsafe_code)]
#![warn(missing_docs)]

extern crate alloc;

pub mod allocate;
pub mod analysis;
pub mod bpe;
pub mod cluster;
pub mod corpus;
mod error;
pub mod pipeline;
pub mod rng;
pub mod script;
pub mod segment;
pub mod text;
mod trie;
pub mod unigram;
pub mod vocab;

pub use error::Error;

/// Convenience alias for fallible operations in this crate.
pub type Result<T> = core::result::Result<T, Error>;
