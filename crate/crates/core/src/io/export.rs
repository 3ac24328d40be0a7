use serde::Serialize;

use crate::doubling::DoublingCode;
use crate::spread::{Spread, SpreadError, SpreadKind, SpreadType};

/// JSON view of a spread. Positions are 1-based, matching `a_1 .. a_9`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpreadJson {
    pub id: String,
    /// Basis rows of each line as bit strings.
    pub lines: Vec<Vec<String>>,
    #[serde(rename = "type")]
    pub kind: SpreadKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub common_line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distinguished_regulus: Option<[usize; 3]>,
    pub holes: Vec<String>,
    pub reguli: Vec<[usize; 3]>,
}

pub fn spread_json(s: &Spread) -> Result<SpreadJson, SpreadError> {
    let one_based = |p: [usize; 3]| p.map(|i| i + 1);
    let (common_line, distinguished_regulus) = match s.classify()? {
        SpreadType::X { common_line } => (Some(common_line + 1), None),
        SpreadType::E { distinguished } | SpreadType::IDelta { distinguished } => (None, Some(one_based(distinguished))),
    };
    Ok(SpreadJson {
        id: s.id().to_string(),
        lines: s.lines().map(|l| l.basis_strings()).collect(),
        kind: s.classify()?.kind(),
        common_line,
        distinguished_regulus,
        holes: s.holes().points().iter().map(|p| p.to_bit_string()).collect(),
        reguli: s.reguli()?.iter().map(|r| one_based(r.positions)).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodewordJson {
    pub dim: u8,
    pub basis: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodeJson {
    pub s1_id: String,
    pub s2_id: String,
    pub codewords: Vec<CodewordJson>,
    pub min_distance: u8,
}

pub fn code_json(code: &DoublingCode) -> CodeJson {
    CodeJson {
        s1_id: code.s1.id().to_string(),
        s2_id: code.s2.id().to_string(),
        codewords: code
            .codewords()
            .iter()
            .map(|w| CodewordJson {
                dim: w.dim(),
                basis: w.basis_strings(),
            })
            .collect(),
        min_distance: code.min_distance(),
    }
}
