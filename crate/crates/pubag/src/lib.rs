//! Files, configuration and experiment runners around [`pubag_core`].

pub mod config;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod formats;
pub mod records;
pub mod svmlight;

pub use error::{Error, Result};
