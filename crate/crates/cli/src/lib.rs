//! Library surface of the command-line pipeline: run configuration, file
//! formats, and the command implementations the `modelsched` binary
//! dispatches to.

pub mod commands;
pub mod config;
pub mod context;
pub mod formats;
