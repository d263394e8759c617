//! Scenario runner behind the `msurf` binary.

pub mod builtin;
pub mod runner;
pub mod scenario;
