//! Batch front end: spec parsing, commands, reports and plots.
pub mod commands;
pub mod plot;
pub mod report;
pub mod spec;
