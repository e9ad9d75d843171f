//! File formats, benchmarks, and the command-line driver for the
//! `mpsvqe-core` emulator.

pub mod bench;
pub mod cli;
pub mod config;
mod error;
pub mod fixtures;
pub mod formats;
pub mod report;

pub use error::{Error, Result};
