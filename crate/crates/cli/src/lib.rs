//! Command implementations behind the `qlf` binary.

pub mod commands;
