//! Token embeddings learned from in-sample co-occurrence.

mod cooccur;
mod glove;

pub use cooccur::{build_cooccurrence, CooccurrenceMatrix, Entry, Vocabulary};
pub use glove::{
    glove_gradient, glove_loss, token_vector, train_glove, EmbeddingModel, GloveParams, ModelGradient,
    Weighting,
};
