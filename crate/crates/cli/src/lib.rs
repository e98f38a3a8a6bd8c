//! File format, reports and command dispatch for the `lieweyl` tool.

pub mod commands;
pub mod mla;
pub mod records;

pub use commands::{run, CliError, Output};
pub use mla::{emit_mla, parse_mla, MlaDocument, MlaError};
pub use records::{emit_records, emit_text, parse_records, Format, Report, Value};
