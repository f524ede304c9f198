pub mod classifier;
pub mod config;
pub mod engine;
pub mod error;
pub mod importance;
pub mod learner;
pub mod oer;
pub mod recommender;
pub mod sim;
pub mod store;
pub mod text;
pub mod tfidf;
pub mod vacancy;

pub use error::{Error, Result};
