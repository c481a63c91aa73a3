//! Command-line front end: configuration, report writing and the
//! `construct`, `verify` and `export-mesh` subcommands.

pub mod config;
pub mod construct;
pub mod mesh;
pub mod report;
pub mod verify;
