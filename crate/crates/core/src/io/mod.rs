//! Spread files, JSON exports and run manifests.

mod export;
mod manifest;
mod spread_file;

use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

use crate::gf2geom::GeomError;
use crate::spread::SpreadError;

pub use export::{code_json, spread_json, CodeJson, CodewordJson, SpreadJson};
pub use manifest::{sha256_hex, write_atomic, RunManifest};
pub use spread_file::{format_spread, format_spread_file, parse_spreads, read_spread_file, SpreadFile};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error("character {0:?} is not 7-bit printable")]
    BadCharacter(char),
    #[error(transparent)]
    Token(#[from] GeomError),
    #[error("not a line: {0}")]
    NotALine(String),
    /// `block` is 1-based; `detail` names the offending line pair, if any.
    #[error("block {block}: {error}{detail}")]
    Spread { block: usize, error: SpreadError, detail: String },
}

/// Parse failure with its 1-based line number.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub file: Option<PathBuf>,
    pub line: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.file {
            Some(p) => write!(f, "{}:{}: {}", p.display(), self.line, self.kind),
            None => write!(f, "line {}: {}", self.line, self.kind),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IoError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("cannot read {}: {message}", .path.display())]
    Read { path: PathBuf, message: String },
    #[error("cannot write {}: {message}", .path.display())]
    Write { path: PathBuf, message: String },
}
