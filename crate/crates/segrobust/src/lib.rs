//! File formats, corpus handling and pipeline orchestration around
//! [`segrobust_core`].
//!
//! The command-line entry point is the `segrobust` binary; everything it does
//! is reachable from this library so the acceptance suite can drive the same
//! code paths in-process.

pub mod config;
pub mod corpus;
pub mod dataset;
pub mod error;
pub mod io;
pub mod maskfile;
pub mod pipeline;
pub mod plot;
pub mod records;
pub mod synth;

pub use error::{Error, Result};
pub use segrobust_core as core;
