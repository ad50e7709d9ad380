pub mod cli;
pub mod cloud;
pub mod curve;
pub mod error;
pub mod ingest;
pub mod metrics;
pub mod stats;
pub mod synth;
pub mod tree;

pub use error::{Error, Result};
