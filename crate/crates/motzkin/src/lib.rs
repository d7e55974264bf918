//! File formats, the expression language and the command-line driver.

pub mod cli;
pub mod expr;
pub mod format;
pub mod suite;
