//! File formats, rendering and the command-line driver for `qdm-core`.

pub mod error;
pub mod input;
pub mod job;
pub mod output;
pub mod parallel;

pub use error::CliError;
pub use job::{run, Command, JobConfig, Outcome};
pub use output::{parse_structured, Document, Format};
