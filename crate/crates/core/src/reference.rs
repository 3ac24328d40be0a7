//! Five reference doubling pairs of type X spreads with known B9 patterns,
//! used as a fixed regression corpus.

use serde::Serialize;

use crate::doubling::{intersection_pattern, validate_doubling, DoublingCode, IntersectionPattern, PatternCounts};
use crate::io::{parse_spreads, ParseError};
use crate::spread::{Spread, SpreadType};

#[derive(Clone, Copy, Debug)]
pub struct ReferencePair {
    pub name: &'static str,
    pub s1: &'static str,
    pub s2: &'static str,
    /// Expected pattern of `B9 = b9^⊥` against the reguli of `S1`.
    pub b9_pattern: PatternCounts,
    /// Expected regulus labels of `S1`, where known.
    pub s1_reguli: Option<[&'static str; 4]>,
}

macro_rules! const_str_join {
    ($a:expr, $b:expr) => {{
        const A: &str = $a;
        const B: &str = $b;
        const LEN: usize = A.len() + B.len();
        const BYTES: [u8; LEN] = {
            let mut out = [0u8; LEN];
            let (a, b) = (A.as_bytes(), B.as_bytes());
            let mut i = 0;
            while i < a.len() {
                out[i] = a[i];
                i += 1;
            }
            while i < LEN {
                out[i] = b[i - a.len()];
                i += 1;
            }
            out
        };
        match std::str::from_utf8(&BYTES) {
            Ok(s) => s,
            Err(_) => panic!("ascii input"),
        }
    }};
}

const S1_A: &str = "{1,25,125},{15,24,3u},{14,23,5u},{145,234,4u},{12,345,u},{124,34,123},{2,35,235},{245,3,1u},{135,4,2u}";
const S2_A_HEAD: &str = "{1,23,123},{15,25,12},{14,1u,4u},{145,2,3u},{125,34,u},{124,3,5u},{24,345,235},{245,35,234}";

pub const REFERENCE_PAIRS: [ReferencePair; 5] = [
    ReferencePair {
        name: "pair-1",
        s1: S1_A,
        s2: const_str_join!(S2_A_HEAD, ",{135,45,134}"),
        b9_pattern: [2, 2, 2, 0],
        s1_reguli: Some(["R139", "R249", "R579", "R689"]),
    },
    ReferencePair {
        name: "pair-2",
        s1: "{1,25,125},{14,23,5u},{145,245,12},{135,1u,124},{13,45,2u},{4u,4,u},{2,34,234},{3,5,35},{15,24,3u}",
        s2: "{1,234,5u},{15,2,125},{14,1u,4u},{134,235,3u},{124,34,123},{135,4,2u},{25,45,24},{3,5,35},{145,245,12}",
        b9_pattern: [2, 2, 1, 1],
        s1_reguli: Some(["R139", "R259", "R489", "R679"]),
    },
    ReferencePair {
        name: "pair-3",
        s1: S1_A,
        s2: const_str_join!(S2_A_HEAD, ",{13,45,2u}"),
        b9_pattern: [3, 3, 1, 1],
        s1_reguli: Some(["R139", "R249", "R579", "R689"]),
    },
    ReferencePair {
        name: "pair-4",
        s1: S1_A,
        s2: const_str_join!(S2_A_HEAD, ",{13,5,135}"),
        b9_pattern: [2, 2, 2, 2],
        s1_reguli: Some(["R139", "R249", "R579", "R689"]),
    },
    ReferencePair {
        name: "pair-5",
        s1: "{1,25,125},{15,24,3u},{14,23,5u},{145,234,4u},{12,345,u},{124,34,123},{2,35,235},{245,3,1u},{13,5,135}",
        s2: "{1,23,123},{15,25,12},{14,1u,4u},{2u,235,124},{145,35,134},{125,4,3u},{2,34,234},{3,45,345},{135,245,5u}",
        b9_pattern: [3, 3, 2, 2],
        s1_reguli: Some(["R179", "R289", "R359", "R469"]),
    },
];

impl ReferencePair {
    pub fn spreads(&self) -> Result<(Spread, Spread), ParseError> {
        let one = |t: &str| parse_spreads(t).map(|f| f.spreads[0].clone());
        Ok((one(self.s1)?, one(self.s2)?))
    }
}

/// Outcome of checking one reference pair.
#[derive(Clone, Debug, Serialize)]
pub struct ReferenceCheck {
    pub name: &'static str,
    pub optimal: bool,
    pub size: usize,
    pub min_distance: u8,
    pub s1_common_line: Option<usize>,
    pub s2_common_line: Option<usize>,
    pub b9: Option<IntersectionPattern>,
    pub s1_reguli: Vec<String>,
    pub problems: Vec<String>,
}

impl ReferenceCheck {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
    }
}

fn common_line(s: &Spread) -> Option<usize> {
    match s.classify() {
        Ok(SpreadType::X { common_line }) => Some(common_line),
        _ => None,
    }
}

/// Exact comparison of one pair against its expected structure: both spreads
/// type X with the ninth line common to all reguli, an optimal 18-word code
/// at distance 3, and the stated B9 pattern and reguli.
pub fn check_reference_pair(p: &ReferencePair) -> Result<ReferenceCheck, ParseError> {
    let (s1, s2) = p.spreads()?;
    let mut problems = Vec::new();
    let (c1, c2) = (common_line(&s1), common_line(&s2));
    if c1 != Some(8) {
        problems.push(format!("S1 common line is {c1:?}, expected position 9"));
    }
    if c2 != Some(8) {
        problems.push(format!("S2 common line is {c2:?}, expected position 9"));
    }
    let optimal = validate_doubling(&s1, &s2).is_optimal();
    let (size, min_distance) = match DoublingCode::new(s1.clone(), s2.clone()) {
        Ok(code) => (code.size(), code.min_distance()),
        Err(_) => (0, 0),
    };
    if !optimal || size != 18 || min_distance != 3 {
        problems.push(format!("optimal={optimal} size={size} min_distance={min_distance}"));
    }
    let b9 = intersection_pattern(&s2.dual_spread()[8], &s1).ok();
    match b9 {
        Some(b) if b.counts == p.b9_pattern => {}
        other => problems.push(format!("B9 pattern {:?}, expected {:?}", other.map(|b| b.counts), p.b9_pattern)),
    }
    let mut names: Vec<String> = s1.reguli().map(|r| r.iter().map(|x| x.name()).collect()).unwrap_or_default();
    names.sort();
    if let Some(expected) = p.s1_reguli {
        if names != expected {
            problems.push(format!("S1 reguli {names:?}, expected {expected:?}"));
        }
    }
    Ok(ReferenceCheck {
        name: p.name,
        optimal,
        size,
        min_distance,
        s1_common_line: c1,
        s2_common_line: c2,
        b9,
        s1_reguli: names,
        problems,
    })
}

/// The corpus as a spread file: ten blocks, S1 then S2 for each pair.
pub fn reference_spread_file() -> String {
    REFERENCE_PAIRS
        .iter()
        .flat_map(|p| [format!("# {} S1\n{}\n", p.name, p.s1), format!("# {} S2\n{}\n", p.name, p.s2)])
        .collect::<Vec<_>>()
        .join("\n")
}
