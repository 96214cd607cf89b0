//! Declaration language, command-line queries and output rendering.

pub mod cli;
pub mod dsl;
pub mod render;

pub use cli::{run_cli, run_query, CandidateSet, Command, OutputFormat, QueryOutput, QueryRequest};
pub use dsl::{parse_document, parse_structure, LocatedError, ParseErrors, StructureDocument};
