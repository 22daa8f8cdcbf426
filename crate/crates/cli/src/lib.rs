//! Command-line front end for `nlpw`: flag and config-file handling, report
//! emission, and the `verify` suite. The binary in `main.rs` is a thin wrapper.

pub mod commands;
pub mod config;
pub mod emit;
pub mod verify;
