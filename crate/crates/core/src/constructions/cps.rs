use std::collections::BTreeSet;
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::doubling::DoublingCode;
use crate::gf2geom::{parse_point, pg42, Gf2Vector, Subspace};
use crate::spread::{is_regulus, opposite_regulus, Regulus, Spread, SpreadKind};

use super::matrix::Gf2Matrix;
use super::ConstructionError;

/// `M_{1,b,c,d}` of the order-6 group at q = 2 (a = 1, α = 1).
pub fn cps_matrix(b: u8, c: u8, d: u8) -> Gf2Matrix {
    let (b, c, d) = (b & 1, c & 1, d & 1);
    Gf2Matrix::from_entries([
        [1, 0, 0, 0, 0],
        [0, c, d, b & c, b & d],
        [0, d, c ^ d, b & d, b & (c ^ d)],
        [0, 0, 0, c, d],
        [0, 0, 0, d, c ^ d],
    ])
    .expect("5×5 template")
}

/// Parameter choices `(b, c, d)` with `c² + cd + d² = 1`.
pub const CPS_PARAMETERS: [(u8, u8, u8); 6] = [(0, 1, 0), (0, 0, 1), (0, 1, 1), (1, 1, 0), (1, 0, 1), (1, 1, 1)];

/// The six group elements, after checking invertibility, closure, identity
/// and inverses.
pub fn cps_group() -> Result<Vec<Gf2Matrix>, ConstructionError> {
    let g: Vec<Gf2Matrix> = CPS_PARAMETERS.iter().map(|&(b, c, d)| cps_matrix(b, c, d)).collect();
    verify_group(&g)?;
    Ok(g)
}

pub fn verify_group(g: &[Gf2Matrix]) -> Result<(), ConstructionError> {
    let fail = |m: &str| Err(ConstructionError::NotAGroup(m.into()));
    let distinct: BTreeSet<&Gf2Matrix> = g.iter().collect();
    if distinct.len() != g.len() {
        return fail("repeated element");
    }
    let Some(first) = g.first() else { return fail("empty set") };
    let id = Gf2Matrix::identity(first.order())?;
    if !g.contains(&id) {
        return fail("identity missing");
    }
    for a in g {
        if !a.inverse().is_some_and(|inv| g.contains(&inv)) {
            return fail("inverse missing");
        }
        for b in g {
            if !g.contains(&a.mul(b)) {
                return fail("not closed under multiplication");
            }
        }
    }
    Ok(())
}

fn shared_group() -> &'static [Gf2Matrix] {
    static G: OnceLock<Vec<Gf2Matrix>> = OnceLock::new();
    G.get_or_init(|| cps_group().expect("template defines a group"))
}

/// Orbits of the group on lines and planes of PG(4,2), as sorted lists of
/// canonical IDs, ordered by smallest member.
#[derive(Clone, Debug)]
pub struct CpsOrbits {
    pub line_orbits: Vec<Vec<usize>>,
    pub plane_orbits: Vec<Vec<usize>>,
    /// Indices into `line_orbits` of size-6 orbits of pairwise disjoint lines.
    pub good_line_orbits: Vec<usize>,
    /// Indices into `plane_orbits` of size-6 orbits of planes pairwise
    /// meeting in a point.
    pub good_plane_orbits: Vec<usize>,
}

fn orbits_of(g: &[Gf2Matrix], subs: &[Subspace], id_of: impl Fn(&Subspace) -> Option<usize>) -> Vec<Vec<usize>> {
    let mut seen = vec![false; subs.len()];
    let mut out = Vec::new();
    for (i, s) in subs.iter().enumerate() {
        if seen[i] {
            continue;
        }
        let orbit: BTreeSet<usize> = g
            .iter()
            .map(|m| id_of(&m.apply_subspace(s)).expect("image has same dimension"))
            .collect();
        for &j in &orbit {
            seen[j] = true;
        }
        out.push(orbit.into_iter().collect());
    }
    out
}

fn pairwise(ids: &[usize], table: &[Subspace], ok: impl Fn(&Subspace, &Subspace) -> bool) -> bool {
    ids.iter()
        .enumerate()
        .all(|(i, &a)| ids[i + 1..].iter().all(|&b| ok(&table[a], &table[b])))
}

pub fn cps_orbits() -> &'static CpsOrbits {
    static O: OnceLock<CpsOrbits> = OnceLock::new();
    O.get_or_init(|| {
        let t = pg42();
        let g = shared_group();
        let line_orbits = orbits_of(g, &t.lines, |s| t.line_id(s));
        let plane_orbits = orbits_of(g, &t.planes, |s| t.plane_id(s));
        let good_line_orbits = (0..line_orbits.len())
            .filter(|&i| line_orbits[i].len() == 6 && pairwise(&line_orbits[i], &t.lines, |a, b| a.is_disjoint(b)))
            .collect();
        let good_plane_orbits = (0..plane_orbits.len())
            .filter(|&i| plane_orbits[i].len() == 6 && pairwise(&plane_orbits[i], &t.planes, |a, b| a.meet_dim(b) == 1))
            .collect();
        CpsOrbits {
            line_orbits,
            plane_orbits,
            good_line_orbits,
            good_plane_orbits,
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CpsVariant {
    /// Lines `L1 ∪ R2`, planes `P1 ∪ P2`.
    Basic,
    /// Lines `L1 ∪ R1`, planes `P1 ∪ P3` with `P3` built from `R2` and `N`.
    SwapReguli,
    /// As basic, with one plane of `P2` replaced by another plane through
    /// the same line of `R1` that leaves the solid of `R1`.
    ReplacePlane,
}

impl CpsVariant {
    pub const ALL: [CpsVariant; 3] = [CpsVariant::Basic, CpsVariant::SwapReguli, CpsVariant::ReplacePlane];
}

impl fmt::Display for CpsVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CpsVariant::Basic => "basic",
            CpsVariant::SwapReguli => "swap_reguli",
            CpsVariant::ReplacePlane => "replace_plane",
        })
    }
}

impl FromStr for CpsVariant {
    type Err = ConstructionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "basic" => Ok(CpsVariant::Basic),
            "swap_reguli" | "swap-reguli" => Ok(CpsVariant::SwapReguli),
            "replace_plane" | "replace-plane" => Ok(CpsVariant::ReplacePlane),
            _ => Err(ConstructionError::InvalidConfig(format!("unknown CPS variant {s:?}"))),
        }
    }
}

/// One CPS configuration. The code's lines are `l1` followed by the three
/// regulus lines; its planes are `p1` followed by `p2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CpsConfig {
    pub variant: CpsVariant,
    pub group_elements: Vec<Gf2Matrix>,
    pub line_orbit: usize,
    pub plane_orbit: usize,
    pub l1: Vec<Subspace>,
    pub p1: Vec<Subspace>,
    pub r1: Regulus,
    pub r2: Regulus,
    pub n: Gf2Vector,
    /// The three planes outside the good plane orbit, as used in the code.
    pub p2: Vec<Subspace>,
    /// For `ReplacePlane`: which plane of the regulus-built triple was
    /// replaced (0-based).
    pub replaced: Option<usize>,
}

/// JSON form of a `CpsConfig`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CpsRecord {
    pub variant: CpsVariant,
    /// Line orbit index then plane orbit index, as in `cps_orbits`.
    pub orbit_ids: [usize; 2],
    #[serde(rename = "R1_lines")]
    pub r1_lines: Vec<String>,
    #[serde(rename = "N")]
    pub n: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replaced: Option<ReplacedPlane>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplacedPlane {
    pub index: usize,
    pub plane: String,
}

impl CpsConfig {
    pub fn record(&self) -> CpsRecord {
        CpsRecord {
            variant: self.variant,
            orbit_ids: [self.line_orbit, self.plane_orbit],
            r1_lines: self.r1.lines().iter().map(|l| l.to_compact()).collect(),
            n: self.n.to_compact(),
            replaced: self.replaced.map(|i| ReplacedPlane {
                index: i,
                plane: self.p2[i].to_compact(),
            }),
        }
    }

    pub fn code_lines(&self) -> Vec<Subspace> {
        let r = match self.variant {
            CpsVariant::SwapReguli => &self.r1,
            _ => &self.r2,
        };
        self.l1.iter().chain(r.lines()).copied().collect()
    }

    pub fn code_planes(&self) -> Vec<Subspace> {
        self.p1.iter().chain(&self.p2).copied().collect()
    }
}

fn parse_subspace(text: &str) -> Result<Subspace, ConstructionError> {
    let inner = text.trim().trim_start_matches('{').trim_end_matches('}');
    let pts = inner.split(',').map(|t| parse_point(t.trim(), 5)).collect::<Result<Vec<_>, _>>()?;
    Ok(Subspace::span(5, &pts)?)
}

fn planes_through(lines: &[Subspace], n: Gf2Vector) -> Vec<Subspace> {
    let pn = Subspace::span(5, &[n]).expect("ambient 5");
    lines.iter().map(|l| l.join(&pn).expect("ambient 5")).collect()
}

/// Rebuilds a configuration from its record, checking that the orbits are
/// good and the regulus data is consistent.
pub fn cps_config_from_record(rec: &CpsRecord) -> Result<CpsConfig, ConstructionError> {
    let o = cps_orbits();
    let t = pg42();
    let [li, pi] = rec.orbit_ids;
    if !o.good_line_orbits.contains(&li) || !o.good_plane_orbits.contains(&pi) {
        return Err(ConstructionError::InvalidConfig("orbit ids do not name good orbits".into()));
    }
    let lines: Vec<Subspace> = rec.r1_lines.iter().map(|s| parse_subspace(s)).collect::<Result<_, _>>()?;
    let lines: [Subspace; 3] = lines
        .try_into()
        .map_err(|_| ConstructionError::InvalidConfig("R1 needs three lines".into()))?;
    let r1 = Regulus::new(lines)?;
    let r2 = opposite_regulus(&r1);
    let n = parse_point(&rec.n, 5)?;
    let mut p2 = planes_through(r1.lines(), n);
    if rec.variant == CpsVariant::SwapReguli {
        p2 = planes_through(r2.lines(), n);
    }
    let mut replaced = None;
    match (&rec.replaced, rec.variant) {
        (Some(rp), CpsVariant::ReplacePlane) => {
            let plane = parse_subspace(&rp.plane)?;
            if rp.index >= 3 || plane.dim() != 3 || !plane.contains(&r1.lines()[rp.index]) || r1.carrier().contains(&plane) {
                return Err(ConstructionError::InvalidConfig(
                    "replacement plane must contain its R1 line and leave the solid".into(),
                ));
            }
            p2[rp.index] = plane;
            replaced = Some(rp.index);
        }
        (None, CpsVariant::ReplacePlane) => return Err(ConstructionError::InvalidConfig("replace_plane needs a replacement".into())),
        (Some(_), _) => return Err(ConstructionError::InvalidConfig("only replace_plane takes a replacement".into())),
        (None, _) => {}
    }
    Ok(CpsConfig {
        variant: rec.variant,
        group_elements: shared_group().to_vec(),
        line_orbit: li,
        plane_orbit: pi,
        l1: o.line_orbits[li].iter().map(|&i| t.lines[i]).collect(),
        p1: o.plane_orbits[pi].iter().map(|&i| t.planes[i]).collect(),
        r1,
        r2,
        n,
        p2,
        replaced,
    })
}

/// Doubling code of a configuration, if it is optimal.
pub fn cps_assemble(config: &CpsConfig) -> Option<DoublingCode> {
    let lines = config.code_lines();
    let no_containment = config.l1.iter().all(|l| config.code_planes().iter().all(|b| !b.contains(l)));
    if !no_containment {
        return None;
    }
    let s1 = Spread::new(&lines).ok()?;
    let duals: Vec<Subspace> = config.code_planes().iter().map(|b| b.dual()).collect();
    let s2 = Spread::new(&duals).ok()?;
    DoublingCode::new(s1, s2).ok()
}

/// Reguli `(R2 lines sorted by ID)` made of lines avoiding the points of `l1`.
fn reguli_in_complement(l1: &[Subspace]) -> Vec<Regulus> {
    let t = pg42();
    let covered = l1.iter().fold(0u64, |m, l| m | l.point_mask());
    let free: Vec<&Subspace> = t.lines.iter().filter(|l| l.point_mask() & covered == 0).collect();
    let mut out = Vec::new();
    for i in 0..free.len() {
        for j in i + 1..free.len() {
            for k in j + 1..free.len() {
                if is_regulus(free[i], free[j], free[k]).unwrap_or(false) {
                    out.push(Regulus::new([*free[i], *free[j], *free[k]]).expect("checked"));
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct CpsOutput {
    pub code: DoublingCode,
    pub config: CpsConfig,
}

/// Streams optimal CPS doubling codes of one variant. Search order: good
/// line orbit, good plane orbit, `R2` (by line IDs), `N` (by point value),
/// then for `ReplacePlane` the replaced index and the replacement plane ID.
pub fn cps_for_each<F>(variant: CpsVariant, mut emit: F) -> Result<u64, ConstructionError>
where
    F: FnMut(CpsOutput) -> ControlFlow<()>,
{
    let o = cps_orbits();
    let t = pg42();
    let g = shared_group();
    let mut emitted = 0;
    for &li in &o.good_line_orbits {
        let l1: Vec<Subspace> = o.line_orbits[li].iter().map(|&i| t.lines[i]).collect();
        let reguli = reguli_in_complement(&l1);
        for &pi in &o.good_plane_orbits {
            let p1: Vec<Subspace> = o.plane_orbits[pi].iter().map(|&i| t.planes[i]).collect();
            for found in &reguli {
                let r1 = opposite_regulus(found);
                // re-derived so a record rebuild reproduces the same line order
                let r2 = &opposite_regulus(&r1);
                for nv in 1..32u8 {
                    let n = Gf2Vector::new(5, nv)?;
                    if r1.carrier().contains_vector(n) {
                        continue;
                    }
                    let base = CpsConfig {
                        variant,
                        group_elements: g.to_vec(),
                        line_orbit: li,
                        plane_orbit: pi,
                        l1: l1.clone(),
                        p1: p1.clone(),
                        r1,
                        r2: *r2,
                        n,
                        p2: planes_through(r1.lines(), n),
                        replaced: None,
                    };
                    let mut candidates = Vec::new();
                    match variant {
                        CpsVariant::Basic => candidates.push(base),
                        CpsVariant::SwapReguli => {
                            let mut c = base;
                            c.p2 = planes_through(r2.lines(), n);
                            candidates.push(c);
                        }
                        CpsVariant::ReplacePlane => {
                            if cps_assemble(&CpsConfig {
                                variant: CpsVariant::Basic,
                                ..base.clone()
                            })
                            .is_none()
                            {
                                continue;
                            }
                            for k in 0..3 {
                                let l = r1.lines()[k];
                                for plane in t
                                    .planes
                                    .iter()
                                    .filter(|b| b.contains(&l) && !r1.carrier().contains(b) && **b != base.p2[k])
                                {
                                    let mut c = base.clone();
                                    c.p2[k] = *plane;
                                    c.replaced = Some(k);
                                    candidates.push(c);
                                }
                            }
                        }
                    }
                    for config in candidates {
                        if let Some(code) = cps_assemble(&config) {
                            emitted += 1;
                            if emit(CpsOutput { code, config }).is_break() {
                                return Ok(emitted);
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(emitted)
}

pub fn cps_build(variant: CpsVariant) -> Result<Vec<CpsOutput>, ConstructionError> {
    let mut out = Vec::new();
    cps_for_each(variant, |o| {
        out.push(o);
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Whether the duals of the last three planes (the planes outside the good
/// plane orbit) form a regulus.
pub fn cps_regulus_check(code: &DoublingCode) -> bool {
    let d = [6, 7, 8].map(|j| code.planes[j].dual());
    is_regulus(&d[0], &d[1], &d[2]).unwrap_or(false)
}

/// Spread types and regulus checks of one CPS output.
#[derive(Clone, Debug, Serialize)]
pub struct CpsReport {
    pub variant: CpsVariant,
    pub s1_type: SpreadKind,
    pub s2_type: SpreadKind,
    pub dual_regulus: bool,
    pub opposite_ok: bool,
}

pub fn cps_report(out: &CpsOutput) -> Result<CpsReport, ConstructionError> {
    Ok(CpsReport {
        variant: out.config.variant,
        s1_type: out.code.s1.classify()?.kind(),
        s2_type: out.code.s2.classify()?.kind(),
        dual_regulus: cps_regulus_check(&out.code),
        opposite_ok: opposite_regulus(&out.config.r1).same_lines(&out.config.r2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_has_order_six() {
        let g = cps_group().unwrap();
        assert_eq!(g.len(), 6);
        assert_eq!(cps_matrix(0, 1, 0), Gf2Matrix::identity(5).unwrap());
        assert!(g.iter().all(|m| m.is_invertible()));
        // the template with entry (2,4) = c is not closed
        let bad: Vec<Gf2Matrix> = CPS_PARAMETERS
            .iter()
            .map(|&(b, c, d)| {
                Gf2Matrix::from_entries([
                    [1, 0, 0, 0, 0],
                    [0, c, d, c, b & d],
                    [0, d, c ^ d, b & d, b & (c ^ d)],
                    [0, 0, 0, c, d],
                    [0, 0, 0, d, c ^ d],
                ])
                .unwrap()
            })
            .collect();
        assert!(verify_group(&bad).is_err());
    }

    #[test]
    fn orbits_partition_and_divide_group_order() {
        let o = cps_orbits();
        for (orbits, n) in [(&o.line_orbits, 155), (&o.plane_orbits, 155)] {
            assert_eq!(orbits.iter().map(|x| x.len()).sum::<usize>(), n);
            assert!(orbits.iter().all(|x| 6 % x.len() == 0));
        }
        assert!(!o.good_line_orbits.is_empty());
        assert!(!o.good_plane_orbits.is_empty());
    }

    #[test]
    fn regulus_check_on_synthetic_planes() {
        // three planes through one line: duals lie in one solid but meet
        let t = pg42();
        let l = t.lines[0];
        let planes: Vec<&Subspace> = t.planes.iter().filter(|b| b.contains(&l)).take(3).collect();
        let d: Vec<Subspace> = planes.iter().map(|b| b.dual()).collect();
        assert!(!is_regulus(&d[0], &d[1], &d[2]).unwrap());
    }

    #[test]
    fn basic_outputs_are_optimal_with_dual_regulus() {
        let outs = cps_build(CpsVariant::Basic).unwrap();
        assert_eq!(outs.len(), 8);
        let mut kinds = Vec::new();
        for o in &outs {
            let r = cps_report(o).unwrap();
            assert!(r.dual_regulus && r.opposite_ok);
            assert_eq!(o.code.size(), 18);
            assert_eq!(o.code.min_distance(), 3);
            kinds.push((r.s1_type, r.s2_type));
        }
        // Frozen: good line orbits carry no regulus, so no output is of type IΔ.
        let ex = kinds.iter().filter(|k| **k == (SpreadKind::E, SpreadKind::X)).count();
        let xe = kinds.iter().filter(|k| **k == (SpreadKind::X, SpreadKind::E)).count();
        assert_eq!((ex, xe), (4, 4));
    }

    #[test]
    fn record_round_trip() {
        for v in CpsVariant::ALL {
            let mut first = None;
            cps_for_each(v, |o| {
                first = Some(o);
                ControlFlow::Break(())
            })
            .unwrap();
            let o = first.unwrap();
            let json = serde_json::to_string(&o.config.record()).unwrap();
            let back = cps_config_from_record(&serde_json::from_str(&json).unwrap()).unwrap();
            assert_eq!(back, o.config);
            assert_eq!(cps_assemble(&back).unwrap().codewords(), o.code.codewords());
        }
    }
}
