//! Library side of the `qetorus` command-line tool: number formatting,
//! verification suites and reports, and the command implementations.

pub mod commands;
pub mod format;
pub mod report;
pub mod suites;
