//! Maximal partial line spreads of PG(4,2): structure and classification.
//!
//! A size-9 partial spread leaves four uncovered points (holes) and its lines
//! group into exactly four reguli. The per-line regulus membership counts
//! separate the three projective types X, E and IΔ.

mod graph;
mod lineset;
mod regulus;

use std::fmt;
use std::hash::{Hash, Hasher};

use serde::Serialize;
use thiserror::Error;

use crate::gf2geom::{pg42, GeomError, Gf2Vector, Subspace};

pub use graph::{all_spreads, disjointness_graph, find_maximal_spreads, for_each_spread, DisjointnessGraph, SearchMode};
pub use lineset::LineSet;
pub use regulus::{is_regulus, opposite_regulus, Regulus};

pub const SPREAD_SIZE: usize = 9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpreadError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("expected {expected} lines, got {got}")]
    WrongLineCount { expected: usize, got: usize },
    #[error("entry {index} is not a line of PG(4,2)")]
    NotALine { index: usize },
    #[error("lines a{} and a{} are identical", .0 + 1, .1 + 1)]
    DuplicateLine(usize, usize),
    #[error("lines a{} and a{} intersect", .0 + 1, .1 + 1)]
    LinesMeet(usize, usize),
    #[error("expected a plane of PG(4,2)")]
    NotAPlane,
    #[error("the lines do not partition the complement of the plane")]
    PartitionViolated,
    #[error("structural anomaly: {0}")]
    Anomaly(String),
}

/// Canonical identity of a spread: its line set, independent of order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SpreadId(pub LineSet);

impl fmt::Display for SpreadId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.to_hex())
    }
}

/// Nine pairwise disjoint lines of PG(4,2).
///
/// The stored order is kept so that lines can be referenced by position
/// (`a_1 .. a_9`), but equality and hashing only look at the line set.
#[derive(Clone, Debug)]
pub struct Spread {
    ids: [u8; SPREAD_SIZE],
    set: LineSet,
}

impl PartialEq for Spread {
    fn eq(&self, other: &Self) -> bool {
        self.set == other.set
    }
}

impl Eq for Spread {}

impl Hash for Spread {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.set.hash(state);
    }
}

impl Spread {
    pub fn new(lines: &[Subspace]) -> Result<Self, SpreadError> {
        if lines.len() != SPREAD_SIZE {
            return Err(SpreadError::WrongLineCount {
                expected: SPREAD_SIZE,
                got: lines.len(),
            });
        }
        let t = pg42();
        let mut ids = [0u8; SPREAD_SIZE];
        for (i, l) in lines.iter().enumerate() {
            ids[i] = t.line_id(l).ok_or(SpreadError::NotALine { index: i })? as u8;
        }
        for i in 0..SPREAD_SIZE {
            for j in i + 1..SPREAD_SIZE {
                if ids[i] == ids[j] {
                    return Err(SpreadError::DuplicateLine(i, j));
                }
                if !lines[i].is_disjoint(&lines[j]) {
                    return Err(SpreadError::LinesMeet(i, j));
                }
            }
        }
        Ok(Self::from_ids(ids))
    }

    /// Builds a spread from line IDs already known to be pairwise disjoint.
    pub(crate) fn from_ids(ids: [u8; SPREAD_SIZE]) -> Self {
        let set: LineSet = ids.iter().map(|&i| usize::from(i)).collect();
        debug_assert_eq!(set.len() as usize, SPREAD_SIZE);
        debug_assert_eq!(
            ids.iter()
                .fold(0u64, |m, &i| m | pg42().lines[usize::from(i)].point_mask())
                .count_ones(),
            27
        );
        Self { ids, set }
    }

    pub fn line_ids(&self) -> [u8; SPREAD_SIZE] {
        self.ids
    }

    pub fn line_set(&self) -> LineSet {
        self.set
    }

    pub fn id(&self) -> SpreadId {
        SpreadId(self.set)
    }

    /// Line at 0-based position `i` of the stored order.
    pub fn line(&self, i: usize) -> &'static Subspace {
        &pg42().lines[usize::from(self.ids[i])]
    }

    pub fn lines(&self) -> impl Iterator<Item = &'static Subspace> + '_ {
        self.ids.iter().map(|&i| &pg42().lines[usize::from(i)])
    }

    /// Mask of the 27 points covered by the lines.
    pub fn covered_mask(&self) -> u64 {
        self.lines().fold(0, |m, l| m | l.point_mask())
    }

    /// The four points covered by no line.
    pub fn holes(&self) -> HoleSet {
        HoleSet::from_mask(!self.covered_mask() & ALL_POINTS)
    }

    /// Every triple of lines forming a regulus, in lexicographic order of
    /// positions. Anything other than four reguli is reported as an anomaly.
    pub fn reguli(&self) -> Result<Vec<SpreadRegulus>, SpreadError> {
        let found = self.regulus_positions();
        if found.len() != 4 {
            return Err(SpreadError::Anomaly(format!("spread {} has {} reguli", self.id(), found.len())));
        }
        Ok(found
            .into_iter()
            .map(|positions| SpreadRegulus {
                positions,
                regulus: Regulus::new_unchecked(positions.map(|p| *self.line(p))),
            })
            .collect())
    }

    pub(crate) fn regulus_positions(&self) -> Vec<[usize; 3]> {
        let solid = regulus::solid_table();
        let mut out = Vec::with_capacity(4);
        for i in 0..SPREAD_SIZE {
            for j in i + 1..SPREAD_SIZE {
                let carrier = solid[usize::from(self.ids[i])][usize::from(self.ids[j])];
                for k in j + 1..SPREAD_SIZE {
                    let l = self.line(k).point_mask() as u32;
                    if l & !carrier == 0 {
                        out.push([i, j, k]);
                    }
                }
            }
        }
        out
    }

    pub fn classify(&self) -> Result<SpreadType, SpreadError> {
        classify_positions(&self.regulus_positions()).map_err(|msg| SpreadError::Anomaly(format!("spread {}: {msg}", self.id())))
    }

    /// Element-wise orthogonal complements, in stored order.
    pub fn dual_spread(&self) -> Vec<Subspace> {
        self.lines().map(Subspace::dual).collect()
    }

    /// Same lines with the regulus at `positions` replaced by its opposite.
    /// Replacement lines take over the vacated positions.
    pub fn swap_regulus(&self, positions: [usize; 3]) -> Result<Spread, SpreadError> {
        let r = Regulus::new(positions.map(|p| *self.line(p)))?;
        let opp = opposite_regulus(&r);
        let mut lines: Vec<Subspace> = self.lines().copied().collect();
        for (p, l) in positions.iter().zip(opp.lines()) {
            lines[*p] = *l;
        }
        Spread::new(&lines)
    }

    /// Positions in presentation order: for a type X spread the common line
    /// is moved to the end, otherwise the stored order is returned.
    pub fn presentation_order(&self) -> [usize; SPREAD_SIZE] {
        let mut order: [usize; SPREAD_SIZE] = std::array::from_fn(|i| i);
        if let Ok(SpreadType::X { common_line }) = self.classify() {
            order[common_line..].rotate_left(1);
        }
        order
    }

    /// Copy with the lines rearranged into presentation order.
    pub fn presented(&self) -> Spread {
        let order = self.presentation_order();
        Self {
            ids: order.map(|p| self.ids[p]),
            set: self.set,
        }
    }
}

impl fmt::Display for Spread {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.lines().map(|l| l.to_compact()).collect();
        f.write_str(&parts.join(","))
    }
}

pub(crate) const ALL_POINTS: u64 = (1 << 31) - 1;

/// The uncovered points of a spread.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HoleSet {
    mask: u64,
}

impl HoleSet {
    fn from_mask(mask: u64) -> Self {
        Self { mask }
    }

    pub fn mask(&self) -> u64 {
        self.mask
    }

    pub fn len(&self) -> usize {
        self.mask.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.mask == 0
    }

    pub fn points(&self) -> Vec<Gf2Vector> {
        crate::gf2geom::iter_mask(self.mask)
            .map(|v| Gf2Vector::new(5, v).expect("5-bit point"))
            .collect()
    }
}

/// A regulus of a spread, with the 0-based positions of its lines.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpreadRegulus {
    pub positions: [usize; 3],
    pub regulus: Regulus,
}

impl SpreadRegulus {
    /// `R_{ijk}` label with 1-based positions, e.g. `R139`.
    pub fn name(&self) -> String {
        regulus_name(self.positions)
    }
}

pub fn regulus_name(positions: [usize; 3]) -> String {
    let mut p = positions;
    p.sort_unstable();
    format!("R{}{}{}", p[0] + 1, p[1] + 1, p[2] + 1)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SpreadKind {
    X,
    E,
    #[serde(rename = "IDelta")]
    IDelta,
}

impl fmt::Display for SpreadKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpreadKind::X => "X",
            SpreadKind::E => "E",
            SpreadKind::IDelta => "IDelta",
        })
    }
}

impl std::str::FromStr for SpreadKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "X" | "x" => Ok(SpreadKind::X),
            "E" | "e" => Ok(SpreadKind::E),
            "IDelta" | "ID" | "I" | "idelta" | "i" => Ok(SpreadKind::IDelta),
            _ => Err(format!("unknown spread type {s:?}")),
        }
    }
}

/// Type of a size-9 spread with its distinguishing feature, given as
/// 0-based positions in the spread's stored order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpreadType {
    /// One line lies in all four reguli.
    X { common_line: usize },
    /// The three lines shared by two reguli form a regulus themselves.
    E { distinguished: [usize; 3] },
    /// The shared lines form a triangle; the distinguished regulus is the
    /// one whose lines lie in no other regulus.
    IDelta { distinguished: [usize; 3] },
}

impl SpreadType {
    pub fn kind(&self) -> SpreadKind {
        match self {
            SpreadType::X { .. } => SpreadKind::X,
            SpreadType::E { .. } => SpreadKind::E,
            SpreadType::IDelta { .. } => SpreadKind::IDelta,
        }
    }
}

fn classify_positions(reguli: &[[usize; 3]]) -> Result<SpreadType, String> {
    if reguli.len() != 4 {
        return Err(format!("{} reguli", reguli.len()));
    }
    let mut counts = [0u8; SPREAD_SIZE];
    for r in reguli {
        for &p in r {
            counts[p] += 1;
        }
    }
    let mut sorted = counts;
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    match sorted {
        [4, 1, 1, 1, 1, 1, 1, 1, 1] => {
            let common_line = counts.iter().position(|&c| c == 4).expect("count 4 present");
            Ok(SpreadType::X { common_line })
        }
        [2, 2, 2, 1, 1, 1, 1, 1, 1] => {
            let shared: Vec<usize> = (0..SPREAD_SIZE).filter(|&p| counts[p] == 2).collect();
            let shared = [shared[0], shared[1], shared[2]];
            if reguli.contains(&shared) {
                return Ok(SpreadType::E { distinguished: shared });
            }
            let lonely: Vec<&[usize; 3]> = reguli.iter().filter(|r| r.iter().all(|&p| counts[p] == 1)).collect();
            match lonely.as_slice() {
                [r] => Ok(SpreadType::IDelta { distinguished: **r }),
                _ => Err(format!("{} reguli without shared lines", lonely.len())),
            }
        }
        other => Err(format!("regulus membership counts {other:?}")),
    }
}

pub fn holes(s: &Spread) -> HoleSet {
    s.holes()
}

pub fn reguli(s: &Spread) -> Result<Vec<SpreadRegulus>, SpreadError> {
    s.reguli()
}

pub fn classify(s: &Spread) -> Result<SpreadType, SpreadError> {
    s.classify()
}

pub fn dual_spread(s: &Spread) -> Vec<Subspace> {
    s.dual_spread()
}

/// Checks both halves of the partition property of type X spreads: eight
/// disjoint lines partitioning the complement of a plane contain no regulus,
/// and adding any line of the plane gives a type X spread.
pub fn verify_regulus_free_extension(s8: &[Subspace], plane: &Subspace) -> Result<bool, SpreadError> {
    if s8.len() != 8 {
        return Err(SpreadError::WrongLineCount {
            expected: 8,
            got: s8.len(),
        });
    }
    let t = pg42();
    if t.plane_id(plane).is_none() {
        return Err(SpreadError::NotAPlane);
    }
    let mut covered = 0u64;
    for (i, l) in s8.iter().enumerate() {
        if t.line_id(l).is_none() {
            return Err(SpreadError::NotALine { index: i });
        }
        if covered & l.point_mask() != 0 {
            return Err(SpreadError::PartitionViolated);
        }
        covered |= l.point_mask();
    }
    if covered | plane.point_mask() != ALL_POINTS || covered & plane.point_mask() != 0 {
        return Err(SpreadError::PartitionViolated);
    }
    for i in 0..8 {
        for j in i + 1..8 {
            for k in j + 1..8 {
                if is_regulus(&s8[i], &s8[j], &s8[k])? {
                    return Ok(false);
                }
            }
        }
    }
    for ninth in t.lines.iter().filter(|l| plane.contains(l)) {
        let mut lines = s8.to_vec();
        lines.push(*ninth);
        let s = Spread::new(&lines)?;
        if !matches!(s.classify()?, SpreadType::X { common_line: 8 }) {
            return Ok(false);
        }
    }
    Ok(true)
}
