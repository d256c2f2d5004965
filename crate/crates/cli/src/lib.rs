//! Configuration parsing and subcommands behind the `dqd` binary.

pub mod commands;
pub mod config;
