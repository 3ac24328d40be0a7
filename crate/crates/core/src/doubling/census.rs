use std::borrow::Borrow;
use std::collections::BTreeMap;
use std::io;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::gf2geom::pg42;
use crate::spread::{all_spreads, Spread, SpreadKind};

use super::pattern::{format_counts, IntersectionPattern, PatternCounts, XFrame, ELIMINATED_PATTERN, OPEN_PATTERN};
use super::search::{forbidden_partner_lines, TypeFilter};
use super::validate_doubling;

/// Histogram key: sorted counts plus the two hole-related observations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PatternKey {
    pub counts: PatternCounts,
    pub meets_a9: bool,
    pub holes: u32,
}

impl PatternKey {
    fn of(p: &IntersectionPattern) -> Self {
        Self {
            counts: p.counts,
            meets_a9: p.meets_a9,
            holes: p.hole_count,
        }
    }

    fn encode(&self) -> usize {
        let c = self.counts.iter().fold(0usize, |acc, &x| acc * 4 + usize::from(x));
        c | usize::from(self.meets_a9) << 8 | (self.holes as usize) << 9
    }

    fn decode(code: usize) -> Self {
        let c = code & 0xff;
        Self {
            counts: [(c >> 6) as u8 & 3, (c >> 4) as u8 & 3, (c >> 2) as u8 & 3, c as u8 & 3],
            meets_a9: code >> 8 & 1 == 1,
            holes: (code >> 9) as u32,
        }
    }

    fn as_pattern(&self) -> IntersectionPattern {
        IntersectionPattern {
            counts: self.counts,
            raw: self.counts,
            meets_a9: self.meets_a9,
            hole_count: self.holes,
        }
    }

    /// Allowed pattern, hole trichotomy and pattern/hole pairing all hold.
    pub fn is_consistent(&self) -> bool {
        let p = self.as_pattern();
        p.is_allowed() && p.satisfies_trichotomy() && p.holes_match_pattern()
    }

    fn problems(&self) -> Vec<&'static str> {
        let p = self.as_pattern();
        let mut out = Vec::new();
        if !p.is_allowed() {
            out.push("pattern outside the allowed set");
        }
        if !p.satisfies_trichotomy() {
            out.push("hole count outside the trichotomy");
        }
        if p.is_allowed() && !p.holes_match_pattern() {
            out.push("hole count does not match pattern");
        }
        out
    }
}

const KEY_SPACE: usize = 1 << 12;
const MAX_STORED_VIOLATIONS: usize = 1000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CensusViolation {
    pub s1: String,
    pub s2: String,
    /// 0-based plane index into `(S2)^⊥`, if the violation concerns a plane.
    pub plane: Option<usize>,
    pub pattern: Option<String>,
    pub reason: String,
}

/// Pattern histogram over every dual plane of a set of doubling pairs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PatternCensus {
    pub histogram: BTreeMap<PatternKey, u64>,
    pub pairs: u64,
    pub planes: u64,
    /// First violations found (capped); `violation_count` has the total.
    pub violations: Vec<CensusViolation>,
    pub violation_count: u64,
}

impl PatternCensus {
    fn add(&mut self, key: PatternKey, n: u64) {
        if n > 0 {
            *self.histogram.entry(key).or_insert(0) += n;
            self.planes += n;
        }
    }

    fn violate(&mut self, v: CensusViolation) {
        self.violate_n(v, 1);
    }

    fn violate_n(&mut self, v: CensusViolation, n: u64) {
        self.violation_count += n;
        if self.violations.len() < MAX_STORED_VIOLATIONS {
            self.violations.push(v);
        }
    }

    /// Associative merge of two partial censuses.
    pub fn merge(mut self, other: PatternCensus) -> PatternCensus {
        for (k, n) in other.histogram {
            *self.histogram.entry(k).or_insert(0) += n;
        }
        self.pairs += other.pairs;
        self.planes += other.planes;
        self.violation_count += other.violation_count;
        for v in other.violations {
            if self.violations.len() < MAX_STORED_VIOLATIONS {
                self.violations.push(v);
            }
        }
        self
    }

    fn count_where(&self, pred: impl Fn(&PatternKey) -> bool) -> u64 {
        self.histogram.iter().filter(|(k, _)| pred(k)).map(|(_, n)| n).sum()
    }

    pub fn pattern_count(&self, counts: PatternCounts) -> u64 {
        self.count_where(|k| k.counts == counts)
    }

    /// Occurrences of the pattern ruled out for optimal codes.
    pub fn eliminated_count(&self) -> u64 {
        self.pattern_count(ELIMINATED_PATTERN)
    }

    /// Occurrences of the allowed pattern with no previously known instance.
    pub fn open_pattern_count(&self) -> u64 {
        self.pattern_count(OPEN_PATTERN)
    }

    pub fn write_csv<W: io::Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["pattern", "meets_a9", "holes", "count"])?;
        for (k, n) in &self.histogram {
            out.write_record([format_counts(k.counts), k.meets_a9.to_string(), k.holes.to_string(), n.to_string()])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn summary_json(&self) -> serde_json::Value {
        let histogram: Vec<_> = self
            .histogram
            .iter()
            .map(|(k, n)| json!({"pattern": format_counts(k.counts), "meets_a9": k.meets_a9, "holes": k.holes, "count": n}))
            .collect();
        json!({
            "pairs": self.pairs,
            "planes": self.planes,
            "histogram": histogram,
            "violations": self.violations,
            "violation_count": self.violation_count,
            "eliminated_pattern_count": self.eliminated_count(),
            "open_pattern_count": self.open_pattern_count(),
        })
    }
}

/// Census over an explicit stream of pairs. Every pair must be optimal, have
/// a type X first spread, and match `filter`; anything else is recorded as
/// a violation rather than silently skipped.
pub fn pattern_census<I, S>(pairs: I, filter: TypeFilter) -> PatternCensus
where
    I: IntoIterator<Item = (S, S)>,
    S: Borrow<Spread>,
{
    let mut census = PatternCensus::default();
    for (s1, s2) in pairs {
        let (s1, s2) = (s1.borrow(), s2.borrow());
        let pair_violation = |reason: String| CensusViolation {
            s1: s1.id().to_string(),
            s2: s2.id().to_string(),
            plane: None,
            pattern: None,
            reason,
        };
        census.pairs += 1;
        let kinds = (s1.classify(), s2.classify());
        let (k1, k2) = match kinds {
            (Ok(a), Ok(b)) => (a.kind(), b.kind()),
            (Err(e), _) | (_, Err(e)) => {
                census.violate(pair_violation(e.to_string()));
                continue;
            }
        };
        if !filter.accepts(k1, k2) {
            census.violate(pair_violation(format!("pair of types ({k1},{k2}) outside filter {filter}")));
            continue;
        }
        if !validate_doubling(s1, s2).is_optimal() {
            census.violate(pair_violation("pair is not optimal".into()));
            continue;
        }
        let frame = match XFrame::new(s1) {
            Ok(f) => f,
            Err(e) => {
                census.violate(pair_violation(e.to_string()));
                continue;
            }
        };
        for (j, b) in s2.dual_spread().iter().enumerate() {
            let p = frame.pattern(b.point_mask() as u32);
            let key = PatternKey::of(&p);
            census.add(key, 1);
            for reason in key.problems() {
                census.violate(CensusViolation {
                    s1: s1.id().to_string(),
                    s2: s2.id().to_string(),
                    plane: Some(j),
                    pattern: Some(p.to_string()),
                    reason: reason.into(),
                });
            }
        }
    }
    census
}

/// All type X spreads with, for every line, a bitset over the spreads that
/// contain it.
struct XIndex {
    spreads: Vec<Spread>,
    containing: Vec<Vec<u64>>,
    words: usize,
    dual_masks: Vec<u32>,
}

impl XIndex {
    fn build() -> Self {
        let spreads: Vec<Spread> = all_spreads()
            .par_iter()
            .filter(|s| matches!(s.classify().map(|t| t.kind()), Ok(SpreadKind::X)))
            .cloned()
            .collect();
        let words = spreads.len().div_ceil(64);
        let mut containing = vec![vec![0u64; words]; pg42().lines.len()];
        for (k, s) in spreads.iter().enumerate() {
            for &l in &s.line_ids() {
                containing[usize::from(l)][k / 64] |= 1 << (k % 64);
            }
        }
        let dual_masks = pg42().lines.iter().map(|l| l.dual().point_mask() as u32).collect();
        Self {
            spreads,
            containing,
            words,
            dual_masks,
        }
    }

    fn shared() -> &'static Self {
        static INDEX: OnceLock<XIndex> = OnceLock::new();
        INDEX.get_or_init(Self::build)
    }

    /// Bitset of type X spreads avoiding every forbidden line of `s1`.
    fn partners(&self, s1: &Spread) -> Vec<u64> {
        let n = self.spreads.len();
        let mut allowed = vec![!0u64; self.words];
        if !n.is_multiple_of(64) {
            allowed[self.words - 1] = (1u64 << (n % 64)) - 1;
        }
        for l in forbidden_partner_lines(s1).iter() {
            for (a, c) in allowed.iter_mut().zip(&self.containing[l]) {
                *a &= !c;
            }
        }
        allowed
    }

    fn row(&self, s1: &Spread, hist: &mut [u64], census: &mut PatternCensus) {
        let frame = XFrame::new(s1).expect("index holds type X spreads only");
        let keys: Vec<usize> = self
            .dual_masks
            .iter()
            .map(|&m| PatternKey::of(&frame.pattern(m)).encode())
            .collect();
        let allowed = self.partners(s1);
        let mut line_uses = [0u64; 155];
        for (w, &word) in allowed.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let k = w * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                census.pairs += 1;
                for &l in &self.spreads[k].line_ids() {
                    line_uses[usize::from(l)] += 1;
                }
            }
        }
        for (b, &uses) in line_uses.iter().enumerate() {
            if uses == 0 {
                continue;
            }
            hist[keys[b]] += uses;
            let key = PatternKey::decode(keys[b]);
            if !key.is_consistent() {
                let witness = (0..self.spreads.len())
                    .find(|&k| allowed[k / 64] >> (k % 64) & 1 == 1 && self.spreads[k].line_set().contains(b))
                    .expect("line is used by some partner");
                let s2 = &self.spreads[witness];
                let plane = s2.line_ids().iter().position(|&l| usize::from(l) == b);
                for reason in key.problems() {
                    let v = CensusViolation {
                        s1: s1.id().to_string(),
                        s2: s2.id().to_string(),
                        plane,
                        pattern: Some(key.as_pattern().to_string()),
                        reason: reason.into(),
                    };
                    census.violate_n(v, uses);
                }
            }
        }
    }
}

/// Exhaustive census over every ordered pair of type X spreads forming an
/// optimal doubling code.
///
/// For each first spread the admissible partners are found by clearing,
/// from a bitset over all type X spreads, those containing a line orthogonal
/// to one of its lines. Each partner line then contributes the pattern of
/// its dual plane, which depends only on the first spread and that line.
pub fn xx_census_exhaustive() -> PatternCensus {
    xx_census_rows(None)
}

/// Exhaustive census over the first `limit` type X spreads (in enumeration
/// order) as first spread, with every admissible partner.
pub fn xx_census_rows(limit: Option<usize>) -> PatternCensus {
    let index = XIndex::shared();
    let rows = &index.spreads[..limit.map_or(index.spreads.len(), |l| l.min(index.spreads.len()))];
    let (hist, census) = rows
        .par_iter()
        .fold(
            || (vec![0u64; KEY_SPACE], PatternCensus::default()),
            |(mut hist, mut census), s1| {
                index.row(s1, &mut hist, &mut census);
                (hist, census)
            },
        )
        .reduce(
            || (vec![0u64; KEY_SPACE], PatternCensus::default()),
            |(mut ha, ca), (hb, cb)| {
                for (a, b) in ha.iter_mut().zip(hb) {
                    *a += b;
                }
                (ha, ca.merge(cb))
            },
        );
    finish(hist, census)
}

/// Exhaustive census restricted to pairs whose first spread is `s1`.
pub fn xx_row_census(s1: &Spread) -> PatternCensus {
    let index = XIndex::shared();
    let mut hist = vec![0u64; KEY_SPACE];
    let mut census = PatternCensus::default();
    index.row(s1, &mut hist, &mut census);
    finish(hist, census)
}

/// Number of type X spreads, as held by the census index.
pub fn x_spread_count() -> usize {
    XIndex::shared().spreads.len()
}

fn finish(hist: Vec<u64>, mut census: PatternCensus) -> PatternCensus {
    for (code, &n) in hist.iter().enumerate() {
        census.add(PatternKey::decode(code), n);
    }
    census
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doubling::intersection_pattern;
    use crate::doubling::tests::reference_s2;
    use crate::spread::tests::reference_s1;

    #[test]
    fn key_encoding_round_trips() {
        for counts in [[3, 3, 3, 1], [2, 2, 2, 0], [0, 0, 0, 0], [3, 2, 2, 1]] {
            for meets_a9 in [false, true] {
                for holes in 0..5 {
                    let k = PatternKey { counts, meets_a9, holes };
                    assert_eq!(PatternKey::decode(k.encode()), k);
                    assert!(k.encode() < KEY_SPACE);
                }
            }
        }
    }

    #[test]
    fn stream_census_flags_bad_pairs() {
        let s1 = reference_s1();
        let good = reference_s2();
        let census = pattern_census([(&s1, &good)], TypeFilter::XX);
        assert_eq!(census.pairs, 1);
        assert_eq!(census.planes, 9);
        assert_eq!(census.violation_count, 0);

        let census = pattern_census([(&s1, &s1)], TypeFilter::XX);
        assert!(census.violation_count <= 1);
        let census = pattern_census([(&s1, &good)], "XE".parse().unwrap());
        assert_eq!(census.violation_count, 1);
        assert_eq!(census.planes, 0);
    }

    #[test]
    fn row_census_agrees_with_brute_force() {
        // brute force over all type X partners, through the public
        // validator and pattern functions
        let s1 = reference_s1();
        let mut expect: BTreeMap<PatternKey, u64> = BTreeMap::new();
        let mut pairs = 0;
        for s2 in all_spreads() {
            if s2.classify().unwrap().kind() != SpreadKind::X || !validate_doubling(&s1, s2).is_optimal() {
                continue;
            }
            pairs += 1;
            for b in s2.dual_spread() {
                let p = intersection_pattern(&b, &s1).unwrap();
                *expect.entry(PatternKey::of(&p)).or_insert(0) += 1;
            }
        }
        let row = xx_row_census(&s1);
        assert_eq!(row.pairs, pairs);
        assert_eq!(row.histogram, expect);
    }

    #[test]
    fn csv_and_json_shapes() {
        let census = pattern_census([(reference_s1(), reference_s2())], TypeFilter::XX);
        let mut buf = Vec::new();
        census.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("pattern,meets_a9,holes,count\n"));
        assert!(text.contains("\"(2,2,2,0)\",false,1,"));
        let js = census.summary_json();
        assert_eq!(js["pairs"], 1);
        assert_eq!(js["planes"], 9);
        assert_eq!(js["open_pattern_count"], census.open_pattern_count());
    }
}
