use std::fmt;

use serde::Serialize;

use crate::gf2geom::{pg42, Subspace};
use crate::spread::{Spread, SpreadType};

use super::DoublingError;

/// Per-regulus meet counts, sorted in descending order.
pub type PatternCounts = [u8; 4];

/// The six patterns a dual codeword plane can show against a type X spread.
pub const ALLOWED_PATTERNS: [PatternCounts; 6] = [[2, 2, 2, 0], [2, 2, 1, 1], [3, 3, 1, 1], [2, 2, 2, 2], [3, 3, 2, 2], [3, 3, 3, 1]];

/// Feasible on hole counting alone but ruled out for optimal codes.
pub const ELIMINATED_PATTERN: PatternCounts = [3, 2, 2, 1];

/// Allowed, with no known realization before an exhaustive search.
pub const OPEN_PATTERN: PatternCounts = [3, 3, 3, 1];

/// Hole count that goes with each allowed pattern.
pub fn expected_holes(counts: PatternCounts) -> Option<u32> {
    match counts {
        [2, 2, 2, 0] | [2, 2, 1, 1] => Some(1),
        [3, 3, 1, 1] | [2, 2, 2, 2] => Some(2),
        [3, 3, 2, 2] | [3, 3, 3, 1] => Some(0),
        _ => None,
    }
}

/// How a plane meets the four reguli of a type X spread.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct IntersectionPattern {
    /// Descending meet counts.
    pub counts: PatternCounts,
    /// Meet counts in the spread's regulus order.
    pub raw: PatternCounts,
    /// Whether the plane meets the common line.
    pub meets_a9: bool,
    /// Number of holes of the spread inside the plane.
    pub hole_count: u32,
}

impl IntersectionPattern {
    pub fn is_allowed(&self) -> bool {
        ALLOWED_PATTERNS.contains(&self.counts)
    }

    /// Disjoint from the common line ⇒ one hole; meeting it ⇒ zero or two.
    pub fn satisfies_trichotomy(&self) -> bool {
        match self.meets_a9 {
            false => self.hole_count == 1,
            true => self.hole_count == 0 || self.hole_count == 2,
        }
    }

    pub fn holes_match_pattern(&self) -> bool {
        expected_holes(self.counts) == Some(self.hole_count)
    }

    pub fn tuple_string(&self) -> String {
        format_counts(self.counts)
    }
}

pub fn format_counts(c: PatternCounts) -> String {
    format!("({},{},{},{})", c[0], c[1], c[2], c[3])
}

impl fmt::Display for IntersectionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} meets_a9={} holes={}", self.tuple_string(), self.meets_a9, self.hole_count)
    }
}

/// Point masks describing a type X spread, enough to evaluate patterns of
/// arbitrary planes with a handful of bit operations.
#[derive(Clone, Debug)]
pub(crate) struct XFrame {
    /// For each regulus, the point masks of its three lines.
    reguli: [[u32; 3]; 4],
    common: u32,
    holes: u32,
}

impl XFrame {
    pub(crate) fn new(s1: &Spread) -> Result<Self, DoublingError> {
        let ty = s1.classify()?;
        let SpreadType::X { common_line } = ty else {
            return Err(DoublingError::NotTypeX(ty.kind()));
        };
        let reguli = s1.reguli()?;
        let mask = |p: usize| s1.line(p).point_mask() as u32;
        Ok(Self {
            reguli: std::array::from_fn(|r| reguli[r].positions.map(mask)),
            common: mask(common_line),
            holes: s1.holes().mask() as u32,
        })
    }

    pub(crate) fn pattern(&self, plane: u32) -> IntersectionPattern {
        let raw = self.reguli.map(|lines| lines.iter().filter(|&&l| l & plane != 0).count() as u8);
        let mut counts = raw;
        counts.sort_unstable_by(|a, b| b.cmp(a));
        IntersectionPattern {
            counts,
            raw,
            meets_a9: self.common & plane != 0,
            hole_count: (self.holes & plane).count_ones(),
        }
    }

    pub(crate) fn contains_common(&self, plane: u32) -> bool {
        self.common & !plane == 0
    }
}

fn plane_mask(b: &Subspace) -> Result<u32, DoublingError> {
    pg42().plane_id(b).ok_or(DoublingError::NotAPlane)?;
    Ok(b.point_mask() as u32)
}

/// Whether `b` meets the common line of `s1`, and how many holes of `s1` it
/// contains. Errors if the combination falls outside the three cases that
/// can occur for a codeword plane of an optimal doubling code.
pub fn hole_count(b: &Subspace, s1: &Spread) -> Result<(bool, u32), DoublingError> {
    let frame = XFrame::new(s1)?;
    let mask = plane_mask(b)?;
    if frame.contains_common(mask) {
        return Err(DoublingError::PlaneContainsCommonLine);
    }
    let p = frame.pattern(mask);
    if !p.satisfies_trichotomy() {
        return Err(DoublingError::HoleTrichotomy {
            meets_a9: p.meets_a9,
            holes: p.hole_count,
        });
    }
    Ok((p.meets_a9, p.hole_count))
}

/// Intersection pattern of a plane against the reguli of a type X spread.
/// The common line lies in all four reguli, so meeting it adds one to every
/// count.
pub fn intersection_pattern(b: &Subspace, s1: &Spread) -> Result<IntersectionPattern, DoublingError> {
    let frame = XFrame::new(s1)?;
    Ok(frame.pattern(plane_mask(b)?))
}
