//! Std companion to `ris-eq-core`: experiment configuration, the seeded
//! Monte Carlo runner, result emission, and the verification harnesses
//! behind the `gradcheck` and `oracle` CLI subcommands.

pub mod config;
pub mod gradcheck;
pub mod oracle;
pub mod output;
pub mod runner;
