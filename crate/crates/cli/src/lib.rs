//! Experiment pipelines over the `catnet` library: config loading, the
//! subcommands behind the `catnet` binary, and the regression suite.

pub mod commands;
pub mod config;
pub mod pipeline;
pub mod regress;
