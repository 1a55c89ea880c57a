//! Corpus-level token scoring and per-sample keyword selection.

mod rerank;
mod tfidf;

pub use rerank::{format_output, parse_keywords, rerank, RankedKeywords, Separator};
pub use tfidf::{compute_tfidf, TfidfIndex, TokenCounts};
