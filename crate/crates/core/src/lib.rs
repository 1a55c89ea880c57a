//! Keyword mining over anti-virus detection labels.
//!
//! Reports are tokenized, serial-like label columns are dropped, tokens are
//! embedded with a co-occurrence model and clustered per sample, spelling
//! variants are merged, and each sample gets a short ranked keyword list.

pub mod cluster;
pub mod commands;
pub mod config;
pub mod corpus;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod filter;
mod par;
pub mod pipeline;
pub mod ranking;
pub mod report;
pub mod synth;
pub mod tokenize;

pub use config::RunConfig;
pub use corpus::{Corpus, DuplicatePolicy};
pub use error::{Error, Result};
pub use pipeline::{render_output, run_pipeline, PipelineOutput};
pub use report::{AvReport, Detection};
