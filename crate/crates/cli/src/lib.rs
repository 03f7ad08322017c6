//! Library half of the `asdlab` command-line tool.

pub mod cache;
pub mod commands;
pub mod config;
pub mod report;
