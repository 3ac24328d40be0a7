use std::collections::HashSet;
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::gf2geom::pg42;
use crate::spread::{LineSet, Spread, SpreadKind};

use super::{DoublingCode, DoublingError};

/// Spread-type constraint on `(S1, S2)`; `None` accepts any type.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TypeFilter {
    pub first: Option<SpreadKind>,
    pub second: Option<SpreadKind>,
}

impl TypeFilter {
    pub const XX: Self = Self {
        first: Some(SpreadKind::X),
        second: Some(SpreadKind::X),
    };
    pub const ANY: Self = Self { first: None, second: None };

    pub fn accepts(&self, first: SpreadKind, second: SpreadKind) -> bool {
        self.first.is_none_or(|k| k == first) && self.second.is_none_or(|k| k == second)
    }
}

impl FromStr for TypeFilter {
    type Err = DoublingError;

    /// Two characters from `X`, `E`, `I` (for IΔ) and `*`, e.g. `XX` or `X*`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let one = |c: char| match c.to_ascii_uppercase() {
            'X' => Ok(Some(SpreadKind::X)),
            'E' => Ok(Some(SpreadKind::E)),
            'I' => Ok(Some(SpreadKind::IDelta)),
            '*' => Ok(None),
            _ => Err(DoublingError::BadFilter(s.into())),
        };
        let chars: Vec<char> = s.chars().collect();
        match chars.as_slice() {
            [a, b] => Ok(Self {
                first: one(*a)?,
                second: one(*b)?,
            }),
            _ => Err(DoublingError::BadFilter(s.into())),
        }
    }
}

impl fmt::Display for TypeFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = |k: Option<SpreadKind>| match k {
            Some(SpreadKind::X) => 'X',
            Some(SpreadKind::E) => 'E',
            Some(SpreadKind::IDelta) => 'I',
            None => '*',
        };
        write!(f, "{}{}", c(self.first), c(self.second))
    }
}

/// `table[a]` holds every line `b` with `a ⊆ b^⊥` (equivalently `b ⊆ a^⊥`).
pub(crate) fn orthogonal_lines() -> &'static Vec<LineSet> {
    static TABLE: OnceLock<Vec<LineSet>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let lines = &pg42().lines;
        lines
            .iter()
            .map(|a| {
                let perp = a.dual();
                lines.iter().enumerate().filter(|(_, b)| perp.contains(b)).map(|(j, _)| j).collect()
            })
            .collect()
    })
}

/// Lines that no partner spread of `s1` may contain.
pub(crate) fn forbidden_partner_lines(s1: &Spread) -> LineSet {
    let orth = orthogonal_lines();
    s1.line_ids().iter().fold(LineSet::EMPTY, |acc, &a| acc | orth[usize::from(a)])
}

/// Streams optimal doubling codes over ordered pairs of `db` in row-major
/// order. A pair is rejected as soon as one line of `S1` is found inside a
/// plane of `(S2)^⊥`. Duplicate spreads in `db` are skipped.
pub fn for_each_doubling<F>(db: &[Spread], filter: TypeFilter, mut emit: F) -> Result<(), DoublingError>
where
    F: FnMut(DoublingCode) -> ControlFlow<()>,
{
    let mut seen = HashSet::new();
    let unique: Vec<&Spread> = db.iter().filter(|s| seen.insert(s.id())).collect();
    let kinds: Vec<SpreadKind> = unique
        .par_iter()
        .map(|s| s.classify().map(|t| t.kind()))
        .collect::<Result<_, _>>()?;
    let firsts: Vec<usize> = (0..unique.len()).filter(|&i| filter.first.is_none_or(|k| k == kinds[i])).collect();
    let seconds: Vec<usize> = (0..unique.len()).filter(|&j| filter.second.is_none_or(|k| k == kinds[j])).collect();
    for &i in &firsts {
        let forbidden = forbidden_partner_lines(unique[i]);
        for &j in &seconds {
            if forbidden.intersects(&unique[j].line_set()) {
                continue;
            }
            let code = DoublingCode::new(unique[i].clone(), unique[j].clone())?;
            if emit(code).is_break() {
                return Ok(());
            }
        }
    }
    Ok(())
}

/// Collects up to `limit` codes from `for_each_doubling`.
pub fn doubling_search(db: &[Spread], filter: TypeFilter, limit: Option<usize>) -> Result<Vec<DoublingCode>, DoublingError> {
    let mut out = Vec::new();
    if limit == Some(0) {
        return Ok(out);
    }
    for_each_doubling(db, filter, |code| {
        out.push(code);
        if limit.is_some_and(|l| out.len() >= l) {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doubling::tests::reference_s2;
    use crate::doubling::validate_doubling;
    use crate::spread::tests::reference_s1;

    #[test]
    fn filter_parsing() {
        assert_eq!("XX".parse::<TypeFilter>().unwrap(), TypeFilter::XX);
        assert_eq!("**".parse::<TypeFilter>().unwrap(), TypeFilter::ANY);
        let f: TypeFilter = "Ie".parse().unwrap();
        assert_eq!(f.first, Some(SpreadKind::IDelta));
        assert_eq!(f.second, Some(SpreadKind::E));
        assert_eq!(f.to_string(), "IE");
        assert!("X".parse::<TypeFilter>().is_err());
        assert!("XQ".parse::<TypeFilter>().is_err());
    }

    #[test]
    fn orthogonality_table_is_symmetric() {
        let orth = orthogonal_lines();
        for a in 0..155 {
            assert_eq!(orth[a].len(), 7);
            for b in orth[a].iter() {
                assert!(orth[b].contains(a));
            }
        }
    }

    #[test]
    fn forbidden_set_matches_validator() {
        let s1 = reference_s1();
        let forbidden = forbidden_partner_lines(&s1);
        assert_eq!(forbidden.len(), 63);
        for s2 in crate::spread::all_spreads().iter().step_by(997).take(3000) {
            assert_eq!(!forbidden.intersects(&s2.line_set()), validate_doubling(&s1, s2).is_optimal());
        }
    }

    #[test]
    fn search_finds_example_pair_and_respects_limit() {
        let db = vec![reference_s1(), reference_s2()];
        let codes = doubling_search(&db, TypeFilter::XX, None).unwrap();
        assert!(codes.iter().any(|c| c.s1 == db[0] && c.s2 == db[1]));
        for c in &codes {
            assert!(validate_doubling(&c.s1, &c.s2).is_optimal());
        }
        assert_eq!(doubling_search(&db, TypeFilter::XX, Some(1)).unwrap().len(), 1);
        assert!(doubling_search(&db, "EE".parse().unwrap(), None).unwrap().is_empty());
    }
}
