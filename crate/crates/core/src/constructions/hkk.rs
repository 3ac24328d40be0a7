use std::ops::ControlFlow;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::doubling::{intersection_pattern, DoublingCode, IntersectionPattern};
use crate::gf2geom::{enumerate_subspaces, parse_point, GeomError, Gf2Vector, Subspace};
use crate::spread::{verify_regulus_free_extension, Spread, SpreadKind, SpreadType};

use super::gabidulin::{build_lifted_gabidulin, LiftedGabidulinCode};
use super::ConstructionError;

/// Shortening point `P`, shortening hyperplane `H` and the two augmenting
/// planes `E ∋ P` and `E' ⊂ H`, all in GF(2)^6.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HkkConfig {
    pub p: Gf2Vector,
    pub h: Subspace,
    pub e: Subspace,
    pub e_prime: Subspace,
}

/// JSON form of an `HkkConfig`, with compact tokens in ambient 6.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HkkRecord {
    #[serde(rename = "P")]
    pub p: String,
    #[serde(rename = "H_basis")]
    pub h_basis: Vec<String>,
    #[serde(rename = "E_basis")]
    pub e_basis: Vec<String>,
    #[serde(rename = "Eprime_basis")]
    pub e_prime_basis: Vec<String>,
}

fn shared_code() -> &'static LiftedGabidulinCode {
    static CODE: OnceLock<LiftedGabidulinCode> = OnceLock::new();
    CODE.get_or_init(build_lifted_gabidulin)
}

fn at_most_a_point(a: u64, b: u64) -> bool {
    (a & b).count_ones() <= 1
}

fn far_from_code(plane: &Subspace, code: &LiftedGabidulinCode) -> bool {
    code.codewords.iter().all(|c| at_most_a_point(c.point_mask(), plane.point_mask()))
}

impl HkkConfig {
    /// Checks every invariant against the shared lifted Gabidulin code.
    pub fn check(&self) -> Result<(), ConstructionError> {
        let g = shared_code();
        let s = &g.special_plane;
        let bad = |msg: &str| Err(ConstructionError::InvalidConfig(msg.into()));
        if self.p.ambient() != 6 || self.h.ambient() != 6 || self.e.ambient() != 6 || self.e_prime.ambient() != 6 {
            return bad("all parts must live in ambient 6");
        }
        if !self.p.is_point() {
            return bad("P must be a nonzero vector");
        }
        if self.h.dim() != 5 || self.e.dim() != 3 || self.e_prime.dim() != 3 {
            return bad("H must be a hyperplane and E, E' planes");
        }
        if s.contains_vector(self.p) {
            return bad("P lies in the special plane");
        }
        if self.h.contains_vector(self.p) {
            return bad("P lies in H");
        }
        if self.h.contains(s) {
            return bad("H contains the special plane");
        }
        if !self.e.contains_vector(self.p) {
            return bad("E does not contain P");
        }
        if !self.h.contains(&self.e_prime) {
            return bad("E' is not inside H");
        }
        if !self.e_prime.contains(&self.l2()) {
            return bad("E' does not contain the meet of H with the special plane");
        }
        if !far_from_code(&self.e, g) || !far_from_code(&self.e_prime, g) {
            return bad("augmenting plane meets a codeword in more than a point");
        }
        if !at_most_a_point(self.e.point_mask(), self.e_prime.point_mask()) {
            return bad("E and E' meet in more than a point");
        }
        Ok(())
    }

    /// `L2 = 𝒮 ∩ H`, in ambient 6.
    pub fn l2(&self) -> Subspace {
        shared_code().special_plane.meet(&self.h).expect("ambient 6")
    }

    /// `(𝒮 + P) ∩ H`, in ambient 6.
    pub fn alpha9(&self) -> Subspace {
        let p = Subspace::span(6, &[self.p]).expect("ambient 6");
        shared_code()
            .special_plane
            .join(&p)
            .and_then(|sp| sp.meet(&self.h))
            .expect("ambient 6")
    }

    pub fn record(&self) -> HkkRecord {
        let toks = |s: &Subspace| s.basis().iter().map(|v| v.to_compact()).collect();
        HkkRecord {
            p: self.p.to_compact(),
            h_basis: toks(&self.h),
            e_basis: toks(&self.e),
            e_prime_basis: toks(&self.e_prime),
        }
    }

    pub fn from_record(r: &HkkRecord) -> Result<Self, ConstructionError> {
        let sub = |toks: &[String]| -> Result<Subspace, GeomError> {
            let vs = toks.iter().map(|t| parse_point(t, 6)).collect::<Result<Vec<_>, _>>()?;
            Subspace::span(6, &vs)
        };
        Ok(Self {
            p: parse_point(&r.p, 6)?,
            h: sub(&r.h_basis)?,
            e: sub(&r.e_basis)?,
            e_prime: sub(&r.e_prime_basis)?,
        })
    }
}

/// Coordinates of a subspace of `h` with respect to the RREF basis of `h`:
/// component `i` of the image is the entry of `v` at the pivot of row `i`.
pub fn recoordinatize(h: &Subspace, s: &Subspace) -> Result<Subspace, ConstructionError> {
    if !h.contains(s) {
        return Err(ConstructionError::InvalidConfig("subspace is not inside the hyperplane".into()));
    }
    let rows = h.basis_bits();
    let k = rows.len() as u8;
    let image: Vec<Gf2Vector> = s
        .basis_bits()
        .iter()
        .map(|&v| {
            let bits = rows.iter().enumerate().fold(0u8, |acc, (i, &r)| {
                let pivot = 1u8 << (7 - r.leading_zeros());
                acc | u8::from(v & pivot != 0) << (k as usize - 1 - i)
            });
            Gf2Vector::new(k, bits)
        })
        .collect::<Result<_, _>>()?;
    Ok(Subspace::span(k, &image)?)
}

/// Point-hyperplane shortening: codewords inside `h` are kept, codewords
/// through `p` are cut down to their meet with `h`, everything else is
/// dropped. Results are expressed in the coordinates of `h`.
pub fn shorten(code: &[Subspace], p: Gf2Vector, h: &Subspace) -> Result<Vec<Subspace>, ConstructionError> {
    if h.ambient() != p.ambient() || h.dim() + 1 != h.ambient() {
        return Err(ConstructionError::InvalidConfig(
            "H must be a hyperplane of the ambient space of P".into(),
        ));
    }
    if !p.is_point() {
        return Err(ConstructionError::InvalidConfig("P must be a nonzero vector".into()));
    }
    if h.contains_vector(p) {
        return Err(ConstructionError::PointInHyperplane);
    }
    let mut out = Vec::new();
    for c in code {
        if h.contains(c) {
            out.push(recoordinatize(h, c)?);
        } else if c.contains_vector(p) {
            out.push(recoordinatize(h, &c.meet(h)?)?);
        }
    }
    Ok(out)
}

/// How `hkk_build` chooses configurations.
#[derive(Clone, Debug)]
pub enum HkkSearch {
    /// The first valid configuration in search order.
    First,
    /// Every valid configuration.
    All,
    Explicit(HkkConfig),
}

#[derive(Clone, Debug)]
pub struct HkkOutput {
    /// Lines are the eight shortened codewords through `P` followed by
    /// `a9 = E ∩ H`; planes are the eight codewords inside `H` followed by
    /// `B9 = E'`.
    pub code: DoublingCode,
    pub config: HkkConfig,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HkkStats {
    /// Configurations satisfying every invariant.
    pub configs: u64,
    pub emitted: u64,
    /// Valid configurations whose shortened code is not a doubling code.
    pub discarded: u64,
}

struct SearchTables {
    points: Vec<Gf2Vector>,
    hyperplanes: Vec<Subspace>,
    planes: Vec<Subspace>,
}

fn search_tables() -> &'static SearchTables {
    static T: OnceLock<SearchTables> = OnceLock::new();
    T.get_or_init(|| SearchTables {
        points: (1..64u8).map(|v| Gf2Vector::new(6, v).expect("6-bit")).collect(),
        hyperplanes: enumerate_subspaces(6, 5).expect("ambient 6"),
        planes: enumerate_subspaces(6, 3).expect("ambient 6"),
    })
}

/// Assembles the doubling code of a valid configuration, or `None` if the
/// shortened code does not split into two spreads.
fn assemble(config: &HkkConfig) -> Result<Option<DoublingCode>, ConstructionError> {
    let g = shared_code();
    let shortened = shorten(&g.codewords, config.p, &config.h)?;
    let mut lines: Vec<Subspace> = shortened.iter().filter(|s| s.dim() == 2).copied().collect();
    let mut planes: Vec<Subspace> = shortened.iter().filter(|s| s.dim() == 3).copied().collect();
    if lines.len() != 8 || planes.len() != 8 {
        return Ok(None);
    }
    lines.push(recoordinatize(&config.h, &config.e.meet(&config.h)?)?);
    planes.push(recoordinatize(&config.h, &config.e_prime)?);
    let Ok(s1) = Spread::new(&lines) else { return Ok(None) };
    let duals: Vec<Subspace> = planes.iter().map(|b| b.dual()).collect();
    let Ok(s2) = Spread::new(&duals) else { return Ok(None) };
    Ok(DoublingCode::new(s1, s2).ok())
}

/// Valid configurations for one shortening point, in search order.
fn configs_for_point(p: Gf2Vector) -> Vec<HkkConfig> {
    let g = shared_code();
    let t = search_tables();
    let s = &g.special_plane;
    let mut out = Vec::new();
    if s.contains_vector(p) {
        return out;
    }
    let es: Vec<&Subspace> = t.planes.iter().filter(|e| e.contains_vector(p) && far_from_code(e, g)).collect();
    for h in &t.hyperplanes {
        if h.contains_vector(p) || h.contains(s) {
            continue;
        }
        let l2 = s.meet(h).expect("ambient 6");
        let e_primes: Vec<&Subspace> = t
            .planes
            .iter()
            .filter(|x| h.contains(x) && x.contains(&l2) && far_from_code(x, g))
            .collect();
        for e in &es {
            for ep in &e_primes {
                if at_most_a_point(e.point_mask(), ep.point_mask()) {
                    out.push(HkkConfig {
                        p,
                        h: *h,
                        e: **e,
                        e_prime: **ep,
                    });
                }
            }
        }
    }
    out
}

/// Streams HKK doubling codes in search order: `P` by point ID, then `H`,
/// `E` and `E'` by their canonical enumeration index.
pub fn hkk_for_each<F>(search: &HkkSearch, mut emit: F) -> Result<HkkStats, ConstructionError>
where
    F: FnMut(HkkOutput) -> ControlFlow<()>,
{
    let mut stats = HkkStats::default();
    if let HkkSearch::Explicit(config) = search {
        config.check()?;
        stats.configs = 1;
        let code = assemble(config)?.ok_or(ConstructionError::NotDoubling)?;
        stats.emitted = 1;
        let _ = emit(HkkOutput { code, config: *config });
        return Ok(stats);
    }
    let first_only = matches!(search, HkkSearch::First);
    let points = &search_tables().points;
    let batch = if first_only { 1 } else { rayon::current_num_threads().max(1) * 2 };
    for chunk in points.chunks(batch) {
        let results: Vec<Vec<(HkkConfig, Option<DoublingCode>)>> = chunk
            .par_iter()
            .map(|&p| {
                let mut found = Vec::new();
                for config in configs_for_point(p) {
                    let code = assemble(&config)?;
                    let done = first_only && code.is_some();
                    found.push((config, code));
                    if done {
                        break;
                    }
                }
                Ok(found)
            })
            .collect::<Result<_, ConstructionError>>()?;
        for (config, code) in results.into_iter().flatten() {
            stats.configs += 1;
            match code {
                None => stats.discarded += 1,
                Some(code) => {
                    stats.emitted += 1;
                    if emit(HkkOutput { code, config }).is_break() || first_only {
                        return Ok(stats);
                    }
                }
            }
        }
    }
    Ok(stats)
}

pub fn hkk_build(search: &HkkSearch) -> Result<(Vec<HkkOutput>, HkkStats), ConstructionError> {
    let mut out = Vec::new();
    let stats = hkk_for_each(search, |o| {
        out.push(o);
        ControlFlow::Continue(())
    })?;
    Ok((out, stats))
}

/// Spread types, patterns and structural checks of one HKK doubling code.
#[derive(Clone, Debug, Serialize)]
pub struct HkkPatternReport {
    pub s1_type: SpreadKind,
    pub s2_type: SpreadKind,
    /// Whether the common line of `S1` is `a9 = E ∩ H`.
    pub a9_is_common_line: bool,
    pub b9: Option<IntersectionPattern>,
    pub others: Vec<IntersectionPattern>,
    pub regulus_free: bool,
    pub planes_avoid_l2: bool,
    pub problems: Vec<String>,
}

impl HkkPatternReport {
    pub fn passed(&self) -> bool {
        self.problems.is_empty()
    }
}

const B9_PATTERNS: [[u8; 4]; 2] = [[3, 3, 1, 1], [2, 2, 2, 2]];
const OTHER_PATTERNS: [[u8; 4]; 4] = [[2, 2, 2, 0], [2, 2, 1, 1], [3, 3, 2, 2], [3, 3, 3, 1]];

/// Checks an `hkk_build` output against the pattern restrictions for the
/// construction. Lines and planes are expected in the order `hkk_build`
/// produces them.
pub fn hkk_pattern_check(code: &DoublingCode, config: &HkkConfig) -> Result<HkkPatternReport, ConstructionError> {
    let mut problems = Vec::new();
    let t1 = code.s1.classify()?;
    let t2 = code.s2.classify()?;
    let a9_is_common_line = matches!(t1, SpreadType::X { common_line: 8 });
    if t1.kind() != SpreadKind::X {
        problems.push(format!("line spread has type {}", t1.kind()));
    }
    if t2.kind() != SpreadKind::X {
        problems.push(format!("dual spread has type {}", t2.kind()));
    }
    if t1.kind() == SpreadKind::X && !a9_is_common_line {
        problems.push("a9 is not the common line".into());
    }
    let mut b9 = None;
    let mut others = Vec::new();
    if t1.kind() == SpreadKind::X {
        for (j, b) in code.planes.iter().enumerate() {
            let p = intersection_pattern(b, &code.s1)?;
            if j == 8 {
                if !B9_PATTERNS.contains(&p.counts) {
                    problems.push(format!("B9 has pattern {}", p.tuple_string()));
                }
                if !p.meets_a9 {
                    problems.push("B9 misses a9".into());
                }
                b9 = Some(p);
            } else {
                if !OTHER_PATTERNS.contains(&p.counts) {
                    problems.push(format!("B{} has pattern {}", j + 1, p.tuple_string()));
                }
                if p.hole_count > 1 {
                    problems.push(format!("B{} contains {} holes", j + 1, p.hole_count));
                }
                others.push(p);
            }
        }
    }
    let alpha9 = recoordinatize(&config.h, &config.alpha9())?;
    let s8: Vec<Subspace> = code.s1.lines().take(8).copied().collect();
    let regulus_free = verify_regulus_free_extension(&s8, &alpha9).unwrap_or(false);
    if !regulus_free {
        problems.push("eight shortened lines fail the regulus-free extension test".into());
    }
    let l2 = recoordinatize(&config.h, &config.l2())?;
    let planes_avoid_l2 = code.planes[..8].iter().all(|b| b.is_disjoint(&l2));
    if !planes_avoid_l2 {
        problems.push("a shortened plane meets L2".into());
    }
    Ok(HkkPatternReport {
        s1_type: t1.kind(),
        s2_type: t2.kind(),
        a9_is_common_line,
        b9,
        others,
        regulus_free,
        planes_avoid_l2,
        problems,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn first() -> HkkOutput {
        let (mut out, stats) = hkk_build(&HkkSearch::First).unwrap();
        assert_eq!(stats.emitted, 1);
        out.remove(0)
    }

    #[test]
    fn recoordinatize_is_injective_on_hyperplane() {
        let h = enumerate_subspaces(6, 5).unwrap()[7];
        let pts: Vec<Subspace> = h.points().iter().map(|&v| Subspace::span(6, &[v]).unwrap()).collect();
        let images: std::collections::HashSet<_> = pts.iter().map(|p| recoordinatize(&h, p).unwrap()).collect();
        assert_eq!(images.len(), 31);
        assert!(recoordinatize(&h, &Subspace::whole(6).unwrap()).is_err());
    }

    #[test]
    fn shortening_branches() {
        let g = build_lifted_gabidulin();
        let o = first();
        let c = o.config;
        let out = shorten(&g.codewords, c.p, &c.h).unwrap();
        assert_eq!(out.iter().filter(|s| s.dim() == 3).count(), 8);
        assert_eq!(out.iter().filter(|s| s.dim() == 2).count(), 8);
        assert!(out.iter().all(|s| s.ambient() == 5));
        let inside_h = g.codewords.iter().filter(|x| c.h.contains(x)).count();
        let through_p = g.codewords.iter().filter(|x| x.contains_vector(c.p)).count();
        assert_eq!(inside_h + through_p, out.len());
        assert_eq!(
            shorten(&g.codewords, c.h.points()[0], &c.h),
            Err(ConstructionError::PointInHyperplane)
        );
        // retained and shortened codewords stay at distance at least 3
        for (i, a) in out.iter().enumerate() {
            for b in &out[i + 1..] {
                assert!(a.distance(b).unwrap() >= 3);
            }
        }
    }

    #[test]
    fn first_config_is_valid_and_checks_pass() {
        let o = first();
        o.config.check().unwrap();
        assert_eq!(o.code.size(), 18);
        assert_eq!(o.code.min_distance(), 3);
        let report = hkk_pattern_check(&o.code, &o.config).unwrap();
        assert!(report.passed(), "{:?}", report.problems);
        assert_eq!(report.others.len(), 8);
    }

    #[test]
    fn record_round_trip_rebuilds_same_code() {
        let o = first();
        let rec = o.config.record();
        let json = serde_json::to_string(&rec).unwrap();
        assert!(json.contains("\"Eprime_basis\""));
        let back = HkkConfig::from_record(&serde_json::from_str(&json).unwrap()).unwrap();
        assert_eq!(back, o.config);
        let (again, _) = hkk_build(&HkkSearch::Explicit(back)).unwrap();
        assert_eq!(again[0].code.codewords(), o.code.codewords());
    }

    #[test]
    fn explicit_mode_rejects_bad_configs() {
        let o = first();
        let mut c = o.config;
        c.e_prime = c.e;
        assert!(matches!(
            hkk_build(&HkkSearch::Explicit(c)),
            Err(ConstructionError::InvalidConfig(_))
        ));
        let mut c = o.config;
        c.p = c.h.points()[0];
        assert!(c.check().is_err());
    }
}
