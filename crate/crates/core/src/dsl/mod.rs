//! Text formats: hazard models (`.haz`), test hierarchies (`.htd`) and
//! feeders (`.net`).
//!
//! All three share one line-oriented lexical layer: `#` starts a comment,
//! tokens are separated by whitespace, descriptions are double-quoted with
//! `\"`, `\\` and `\n` escapes. The first error aborts parsing.

mod cursor;
mod error;
mod feeder;
mod lexer;
mod number;
mod parse;
mod write;

pub use crate::model::SourcePos;
pub use error::{DslError, ParseError};
pub use feeder::parse_feeder;
pub use number::{canonical, format_number};
pub use parse::{parse_bundle, parse_model, parse_testspec};
pub use write::{serialize_bundle, serialize_feeder, serialize_test_spec};
