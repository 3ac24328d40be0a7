//! Doubling codes `S1 ∪ (S2)^⊥`: nine lines of one spread together with the
//! orthogonal complements of the lines of another.
//!
//! Two lines of a spread are at distance 4, two dual planes meet in a point
//! (distance 4), and a line meets a plane in at most a line. The code is
//! therefore optimal (minimum distance 3) unless some line of `S1` lies
//! inside some plane of `(S2)^⊥`, which is the only failure mode checked on
//! the fast path.

mod census;
mod pattern;
mod search;

use serde::Serialize;
use thiserror::Error;

use crate::gf2geom::Subspace;
use crate::spread::{Spread, SpreadError, SPREAD_SIZE};

pub use census::{
    pattern_census, x_spread_count, xx_census_exhaustive, xx_census_rows, xx_row_census, CensusViolation, PatternCensus, PatternKey,
};
pub use pattern::{
    format_counts, hole_count, intersection_pattern, IntersectionPattern, PatternCounts, ALLOWED_PATTERNS, ELIMINATED_PATTERN, OPEN_PATTERN,
};
pub use search::{doubling_search, for_each_doubling, TypeFilter};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DoublingError {
    #[error(transparent)]
    Spread(#[from] SpreadError),
    #[error("first spread must be of type X, found {0}")]
    NotTypeX(crate::spread::SpreadKind),
    #[error("expected a plane of PG(4,2)")]
    NotAPlane,
    #[error("plane contains the common line")]
    PlaneContainsCommonLine,
    #[error("hole count violates the trichotomy: meets common line = {meets_a9}, holes = {holes}")]
    HoleTrichotomy { meets_a9: bool, holes: u32 },
    #[error("pair is not an optimal doubling code: line a{} lies in plane B{}", .line + 1, .plane + 1)]
    NotOptimal { line: usize, plane: usize },
    #[error("malformed filter {0:?}")]
    BadFilter(String),
}

/// Outcome of checking a spread pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Optimal,
    /// Line `a_{line}` of `S1` is contained in the dual plane `B_{plane}`;
    /// both indices are 0-based positions.
    Invalid {
        line: usize,
        plane: usize,
    },
}

impl Verdict {
    pub fn is_optimal(&self) -> bool {
        matches!(self, Verdict::Optimal)
    }
}

/// First containment of a line of `s1` in a dual plane of `s2`, scanning
/// lines then planes in stored order.
pub fn validate_doubling(s1: &Spread, s2: &Spread) -> Verdict {
    let planes = s2.dual_spread();
    for (i, a) in s1.lines().enumerate() {
        for (j, b) in planes.iter().enumerate() {
            if b.contains(a) {
                return Verdict::Invalid { line: i, plane: j };
            }
        }
    }
    debug_assert!(pairwise_min_distance(&codewords_of(s1, &planes)) >= 3);
    Verdict::Optimal
}

fn codewords_of(s1: &Spread, planes: &[Subspace]) -> Vec<Subspace> {
    s1.lines().copied().chain(planes.iter().copied()).collect()
}

fn pairwise_min_distance(words: &[Subspace]) -> u8 {
    let mut best = u8::MAX;
    for (i, u) in words.iter().enumerate() {
        for v in &words[i + 1..] {
            best = best.min(u.distance(v).expect("same ambient"));
        }
    }
    best
}

/// The 18-word code `S1 ∪ (S2)^⊥`, only constructed for optimal pairs.
#[derive(Clone, Debug)]
pub struct DoublingCode {
    pub s1: Spread,
    pub s2: Spread,
    /// `B_j` = orthogonal complement of line `j` of `s2`.
    pub planes: [Subspace; SPREAD_SIZE],
}

impl DoublingCode {
    pub fn new(s1: Spread, s2: Spread) -> Result<Self, DoublingError> {
        if let Verdict::Invalid { line, plane } = validate_doubling(&s1, &s2) {
            return Err(DoublingError::NotOptimal { line, plane });
        }
        let duals = s2.dual_spread();
        let planes = std::array::from_fn(|j| duals[j]);
        Ok(Self { s1, s2, planes })
    }

    /// Lines of `s1` followed by the planes `B_1..B_9`.
    pub fn codewords(&self) -> Vec<Subspace> {
        codewords_of(&self.s1, &self.planes)
    }

    pub fn size(&self) -> usize {
        2 * SPREAD_SIZE
    }

    pub fn min_distance(&self) -> u8 {
        min_distance(self)
    }
}

/// Minimum subspace distance over all 153 unordered codeword pairs.
pub fn min_distance(code: &DoublingCode) -> u8 {
    pairwise_min_distance(&code.codewords())
}
