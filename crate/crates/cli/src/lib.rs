//! Command-line front end: argument parsing, output records and the four subcommands.

pub mod args;
pub mod commands;
pub mod record;
