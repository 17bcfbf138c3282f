//! Command-line front end for `kobayashi-core`.

pub mod commands;
pub mod report;
pub mod vectors;
