//! Library surface of the benchmark harness; the `proxsarah` binary is a
//! thin argument-parsing shell over these modules.

pub mod commands;
pub mod config;
pub mod csvout;
pub mod plot;
pub mod runner;
