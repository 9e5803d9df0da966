//! Preprocessing, dictionary tokenization and evaluation for noisy Thai
//! social-media text.

pub mod corpus_io;
pub mod error;
pub mod filters;
pub mod metrics;
pub mod normalizer;
pub mod pipeline;
pub mod postproc;
pub mod thai;
pub mod tokenizer;

pub use error::{Error, Result};
