//! Command-line front end for the `fraclp` library.
//!
//! Exposed as a library so the config parser and output writers can be
//! exercised from integration tests and fuzz targets; the `fraclp` binary in
//! `main.rs` is a thin wrapper around [`run::execute`].

pub mod config;
pub mod error;
pub mod output;
pub mod run;
