//! Library side of the `trolab` command-line tool.

pub mod checks;
pub mod commands;
pub mod problem;
pub mod report;
