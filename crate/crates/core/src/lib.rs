//! Stance classification for Chinese-language Twitter accounts.
//!
//! Tweets are converted from traditional to simplified characters,
//! segmented with a prefix-dictionary DAG (falling back to a BMES HMM for
//! unknown runs), turned into TF-IDF vectors, and classified by k-nearest
//! neighbours under cosine similarity. Two reference baselines and a seeded
//! k-fold cross-validation harness are included.

pub mod classify;
pub mod corpus;
pub mod error;
pub mod evaluate;
pub mod pipeline;
pub mod rng;
pub mod segmenter;
pub mod vectorize;
pub mod zh_convert;

pub mod cli;

pub use error::{Error, Result};
