//! Command-line front end for `newton-decay-core`: input files, JSON and
//! CSV reports, and parallel orchestration of the oracle checks.

pub mod cli;
pub mod input;
pub mod parallel;
pub mod report;
pub mod verify;
