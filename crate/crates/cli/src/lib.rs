//! Library side of the `qtcmodel` command-line tool: configuration loading
//! and command implementations.

pub mod commands;
pub mod config;
