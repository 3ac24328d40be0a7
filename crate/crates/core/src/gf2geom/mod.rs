//! Linear algebra over GF(2) for the 5- and 6-dimensional ambient spaces.
//!
//! Vectors are packed into a `u8`; subspaces carry a canonical RREF basis and
//! a point-membership mask so that meets, containment and disjointness reduce
//! to bitwise operations.

mod subspace;
mod tables;
mod vector;

pub(crate) use subspace::iter_mask;
pub use subspace::{dim_of_mask, dual, join, meet, span, subspace_distance, Subspace};
pub use tables::{enumerate_subspaces, pg42, Pg42};
pub use vector::{parse_point, Gf2Vector, MAX_AMBIENT};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeomError {
    #[error("unsupported ambient dimension {0}")]
    UnsupportedAmbient(u8),
    #[error("mixed ambient dimensions {0} and {1}")]
    MixedAmbient(u8, u8),
    #[error("bit pattern {bits:#b} does not fit ambient dimension {ambient}")]
    VectorOutOfRange { bits: u8, ambient: u8 },
    #[error("coordinate index {index} out of range for ambient dimension {ambient}")]
    CoordinateOutOfRange { index: u8, ambient: u8 },
    #[error("empty point token")]
    EmptyToken,
    #[error("unknown character {c:?} in point token {token:?}")]
    UnknownTokenChar { token: String, c: char },
    #[error("repeated character {c:?} in point token {token:?}")]
    RepeatedTokenChar { token: String, c: char },
    #[error("point token {0:?} sums to the zero vector")]
    ZeroPoint(String),
    #[error("malformed bit string {0:?}")]
    BadBitString(String),
    #[error("requested dimension {dim} exceeds ambient dimension {ambient}")]
    DimOutOfRange { dim: u8, ambient: u8 },
    #[error("expected a subspace of dimension {expected}, got {got}")]
    WrongDimension { expected: u8, got: u8 },
}
