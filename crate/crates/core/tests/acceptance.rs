//! Acceptance criteria, one PASS/FAIL line each. Every comparison is exact:
//! counts, distances and pattern frequencies are integers and the pinned
//! tolerance for all of them is zero.
//!
//! A criterion listed as a known failure prints FAIL with the reason and does
//! not fail the run; if it ever passes, the run fails so the entry gets
//! revisited.

use std::collections::{BTreeMap, HashSet};
use std::ops::ControlFlow;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pg42::constructions::{
    build_lifted_gabidulin, cps_build, cps_group, cps_orbits, cps_report, hkk_for_each, hkk_pattern_check, verify_group, CpsVariant,
    HkkSearch,
};
use pg42::doubling::{
    format_counts, pattern_census, validate_doubling, xx_census_exhaustive, xx_row_census, PatternCounts, TypeFilter, ELIMINATED_PATTERN,
    OPEN_PATTERN,
};
use pg42::gf2geom::{pg42, Gf2Vector, Subspace};
use pg42::io::read_spread_file;
use pg42::reference::{check_reference_pair, REFERENCE_PAIRS};
use pg42::spread::{all_spreads, SpreadKind, SpreadType};

/// Exact match; pattern counts, distances and sizes admit no slack.
const TOLERANCE: u64 = 0;

#[allow(clippy::absurd_extreme_comparisons)]
fn within(actual: u64, expected: u64) -> bool {
    actual.abs_diff(expected) <= TOLERANCE
}

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn gaussian_binomial_2(n: u32, k: u32) -> u64 {
    let (mut num, mut den) = (1u64, 1u64);
    for i in 0..k {
        num *= (1 << (n - i)) - 1;
        den *= (1 << (i + 1)) - 1;
    }
    num / den
}

/// Point masks of all subspaces of dimension `k`, found by closing every
/// `k`-set of points under addition and keeping closures of size `2^k - 1`.
fn brute_force_masks(k: usize) -> HashSet<u64> {
    fn closure(gens: &[u8]) -> u64 {
        let mut pts = vec![0u8];
        for &g in gens {
            let shifted: Vec<u8> = pts.iter().map(|&p| p ^ g).collect();
            pts.extend(shifted);
        }
        pts.iter().filter(|&&p| p != 0).fold(0u64, |m, &p| m | 1 << (p - 1))
    }
    let mut out = HashSet::new();
    let mut stack: Vec<(u8, Vec<u8>)> = vec![(1, Vec::new())];
    while let Some((next, gens)) = stack.pop() {
        if gens.len() == k {
            let m = closure(&gens);
            if m.count_ones() == (1 << k) - 1 {
                out.insert(m);
            }
            continue;
        }
        for p in next..32 {
            let mut g = gens.clone();
            g.push(p);
            stack.push((p + 1, g));
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let t = pg42();
    let counts = [t.points.len(), t.lines.len(), t.planes.len(), t.solids.len()];
    ensure(counts == [31, 155, 155, 31], || format!("counts {counts:?}"))?;
    for (k, table) in [(1, &t.points), (2, &t.lines), (3, &t.planes), (4, &t.solids)] {
        let formula = gaussian_binomial_2(5, k as u32);
        ensure(within(table.len() as u64, formula), || {
            format!("dim {k}: {} vs formula {formula}", table.len())
        })?;
        let brute = brute_force_masks(k);
        let rref: HashSet<u64> = table.iter().map(Subspace::point_mask).collect();
        ensure(brute == rref, || {
            format!("dim {k}: brute force finds {} subspaces, RREF {}", brute.len(), rref.len())
        })?;
    }
    Ok("31/155/155/31, formula and brute force agree".into())
}

fn criterion_2() -> Outcome {
    let file = read_spread_file(&Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/reference.spreads")).map_err(|e| e.to_string())?;
    ensure(file.spreads.len() == 2 * REFERENCE_PAIRS.len(), || {
        format!("{} spreads in corpus file", file.spreads.len())
    })?;
    let mut summary = Vec::new();
    for (i, p) in REFERENCE_PAIRS.iter().enumerate() {
        let (s1, s2) = p.spreads().map_err(|e| e.to_string())?;
        ensure(s1 == file.spreads[2 * i] && s2 == file.spreads[2 * i + 1], || {
            format!("{}: corpus file disagrees", p.name)
        })?;
        let c = check_reference_pair(p).map_err(|e| e.to_string())?;
        ensure(c.passed(), || format!("{}: {}", p.name, c.problems.join("; ")))?;
        summary.push(format!("{} {}", p.name, c.b9.map(|b| b.tuple_string()).unwrap_or_default()));
    }
    let expected_reguli = [(0, ["R139", "R249", "R579", "R689"]), (4, ["R179", "R289", "R359", "R469"])];
    for (i, want) in expected_reguli {
        let c = check_reference_pair(&REFERENCE_PAIRS[i]).map_err(|e| e.to_string())?;
        ensure(c.s1_reguli == want, || {
            format!("{}: reguli {:?}", REFERENCE_PAIRS[i].name, c.s1_reguli)
        })?;
    }
    Ok(summary.join(", "))
}

const FROZEN_SPREADS: [(SpreadKind, u64); 3] = [
    (SpreadKind::X, 416_640),
    (SpreadKind::E, 1_666_560),
    (SpreadKind::IDelta, 3_333_120),
];

fn criterion_3() -> Outcome {
    let spreads = all_spreads();
    ensure(within(spreads.len() as u64, 5_416_320), || format!("{} spreads", spreads.len()))?;
    let mut by_kind: BTreeMap<SpreadKind, u64> = BTreeMap::new();
    for s in spreads {
        let reguli = s.reguli().map_err(|e| format!("{}: {e}", s.id()))?;
        ensure(reguli.len() == 4, || format!("{}: {} reguli", s.id(), reguli.len()))?;
        let holes = s.holes();
        ensure(holes.len() == 4, || format!("{}: {} holes", s.id(), holes.len()))?;
        let ty = s.classify().map_err(|e| format!("{}: {e}", s.id()))?;
        if let SpreadType::X { common_line } = ty {
            let mask = s.line(common_line).point_mask() | holes.mask();
            let plane = Subspace::from_point_mask_checked(5, mask);
            ensure(plane.is_some_and(|p| p.dim() == 3), || {
                format!("{}: common line and holes do not form a plane", s.id())
            })?;
        }
        *by_kind.entry(ty.kind()).or_default() += 1;
    }
    for (k, n) in FROZEN_SPREADS {
        let got = by_kind.get(&k).copied().unwrap_or(0);
        ensure(within(got, n), || format!("{k}: {got} spreads, frozen {n}"))?;
    }
    Ok(format!(
        "{} spreads: X {} E {} IDelta {}",
        spreads.len(),
        by_kind[&SpreadKind::X],
        by_kind[&SpreadKind::E],
        by_kind[&SpreadKind::IDelta]
    ))
}

/// Frozen exhaustive census: pattern, meets the common line, holes, planes.
const FROZEN_CENSUS: [(PatternCounts, bool, u32, u64); 5] = [
    ([2, 2, 1, 1], false, 1, 4_139_735_040),
    ([2, 2, 2, 0], false, 1, 1_399_910_400),
    ([2, 2, 2, 2], true, 2, 3_509_775_360),
    ([3, 3, 1, 1], true, 2, 1_669_893_120),
    ([3, 3, 2, 2], true, 0, 6_379_591_680),
];
const FROZEN_XX_PAIRS: u64 = 1_899_878_400;

fn criterion_4() -> Outcome {
    let census = xx_census_exhaustive();
    ensure(census.violation_count == 0, || {
        format!("{} violations, first {:?}", census.violation_count, census.violations.first())
    })?;
    ensure(census.eliminated_count() == 0, || {
        format!("{} occurs {} times", format_counts(ELIMINATED_PATTERN), census.eliminated_count())
    })?;
    for k in census.histogram.keys() {
        ensure(k.is_consistent(), || format!("inconsistent key {k:?}"))?;
    }
    ensure(within(census.pairs, FROZEN_XX_PAIRS), || {
        format!("{} pairs, frozen {FROZEN_XX_PAIRS}", census.pairs)
    })?;
    ensure(within(census.planes, 9 * FROZEN_XX_PAIRS), || format!("{} planes", census.planes))?;
    let got: Vec<(PatternCounts, bool, u32, u64)> = census.histogram.iter().map(|(k, &n)| (k.counts, k.meets_a9, k.holes, n)).collect();
    ensure(
        got.len() == FROZEN_CENSUS.len()
            && got
                .iter()
                .zip(&FROZEN_CENSUS)
                .all(|(g, f)| g.0 == f.0 && g.1 == f.1 && g.2 == f.2 && within(g.3, f.3)),
        || format!("histogram {got:?}"),
    )?;

    // Every type X spread is equivalent to every other, so the full census
    // is the row census of any one of them scaled by the number of rows.
    let xs: Vec<_> = all_spreads()
        .iter()
        .filter(|s| matches!(s.classify(), Ok(SpreadType::X { .. })))
        .collect();
    let row = xx_row_census(xs[0]);
    for (k, &n) in &census.histogram {
        let r = row.histogram.get(k).copied().unwrap_or(0);
        ensure(within(n, r * xs.len() as u64), || format!("{k:?}: {n} vs {} x {r}", xs.len()))?;
    }
    // The indexed row census agrees with a direct pair-by-pair census.
    let mut rng = ChaCha8Rng::seed_from_u64(4_431);
    for _ in 0..3 {
        let s1 = xs[rng.gen_range(0..xs.len())];
        let partners: Vec<_> = xs.iter().filter(|s2| validate_doubling(s1, s2).is_optimal()).collect();
        let direct = pattern_census(partners.iter().map(|s2| (s1, **s2)), TypeFilter::XX);
        let indexed = xx_row_census(s1);
        ensure(direct.histogram == indexed.histogram && direct.pairs == indexed.pairs, || {
            format!("row {} disagrees", s1.id())
        })?;
    }
    let open = census.open_pattern_count();
    let status = if open == 0 { "not realized" } else { "realized" };
    Ok(format!(
        "{} pairs, {} planes, all allowed, (3,2,2,1) = 0; {} = {open} ({status})",
        census.pairs,
        census.planes,
        format_counts(OPEN_PATTERN)
    ))
}

fn criterion_5() -> Outcome {
    let g = build_lifted_gabidulin();
    ensure(g.codewords.len() == 64, || format!("{} codewords", g.codewords.len()))?;
    let d = g.min_distance();
    ensure(d == 4, || format!("minimum distance {d}"))?;
    ensure(g.codewords.iter().all(|c| c.meet_dim(&g.special_plane) == 0), || {
        "a codeword meets the special plane".into()
    })?;
    Ok("64 codewords, distance 4, all disjoint from the special plane".into())
}

const FROZEN_HKK_CONFIGS: u64 = 56_448;
const FROZEN_HKK_B9: [(PatternCounts, u64); 2] = [([2, 2, 2, 2], 37_632), ([3, 3, 1, 1], 18_816)];
const FROZEN_HKK_OTHERS: [(PatternCounts, u64); 3] = [([2, 2, 1, 1], 169_344), ([2, 2, 2, 0], 56_448), ([3, 3, 2, 2], 225_792)];

fn criterion_6() -> Outcome {
    let mut b9: BTreeMap<PatternCounts, u64> = BTreeMap::new();
    let mut others: BTreeMap<PatternCounts, u64> = BTreeMap::new();
    let mut failure = None;
    let stats = hkk_for_each(&HkkSearch::All, |o| {
        let mut check = || -> Result<(), String> {
            ensure(o.code.size() == 18 && o.code.min_distance() == 3, || "size or distance".into())?;
            let r = hkk_pattern_check(&o.code, &o.config).map_err(|e| e.to_string())?;
            ensure(r.s1_type == SpreadKind::X && r.s2_type == SpreadKind::X, || {
                format!("types {}/{}", r.s1_type, r.s2_type)
            })?;
            ensure(r.regulus_free, || "Gabidulin-derived lines contain a regulus".into())?;
            ensure(r.passed(), || r.problems.join("; "))?;
            *b9.entry(r.b9.ok_or("no B9 pattern")?.counts).or_default() += 1;
            for p in &r.others {
                *others.entry(p.counts).or_default() += 1;
            }
            Ok(())
        };
        match check() {
            Ok(()) => ControlFlow::Continue(()),
            Err(e) => {
                failure = Some(format!("{:?}: {e}", o.config.record()));
                ControlFlow::Break(())
            }
        }
    })
    .map_err(|e| e.to_string())?;
    if let Some(f) = failure {
        return Err(f);
    }
    ensure(stats.emitted > 0, || "no valid configuration".into())?;
    ensure(within(stats.configs, FROZEN_HKK_CONFIGS) && stats.discarded == 0, || {
        format!("{stats:?}")
    })?;
    ensure(
        b9.len() == 2 && FROZEN_HKK_B9.iter().all(|(p, n)| within(b9.get(p).copied().unwrap_or(0), *n)),
        || format!("B9 {b9:?}"),
    )?;
    ensure(
        others.len() == 3
            && FROZEN_HKK_OTHERS
                .iter()
                .all(|(p, n)| within(others.get(p).copied().unwrap_or(0), *n)),
        || format!("B1..B8 {others:?}"),
    )?;
    let fmt = |m: &BTreeMap<PatternCounts, u64>| {
        m.iter()
            .map(|(p, n)| format!("{} x{n}", format_counts(*p)))
            .collect::<Vec<_>>()
            .join(" ")
    };
    Ok(format!(
        "{} codes, all X/X; B9 {}; B1..B8 {}",
        stats.emitted,
        fmt(&b9),
        fmt(&others)
    ))
}

const FROZEN_CPS_CODES: [(CpsVariant, usize); 3] = [(CpsVariant::Basic, 8), (CpsVariant::SwapReguli, 8), (CpsVariant::ReplacePlane, 12)];

/// Group, orbits, optimality and the dual-regulus property.
fn criterion_7a() -> Outcome {
    let g = cps_group().map_err(|e| e.to_string())?;
    ensure(g.len() == 6, || format!("group order {}", g.len()))?;
    verify_group(&g).map_err(|e| e.to_string())?;
    let o = cps_orbits();
    ensure(!o.good_line_orbits.is_empty() && !o.good_plane_orbits.is_empty(), || {
        "no good orbits".into()
    })?;
    ensure(o.good_line_orbits.iter().all(|&i| o.line_orbits[i].len() == 6), || {
        "good line orbit of wrong size".into()
    })?;
    ensure(o.good_plane_orbits.iter().all(|&i| o.plane_orbits[i].len() == 6), || {
        "good plane orbit of wrong size".into()
    })?;
    let mut counts = Vec::new();
    for (v, frozen) in FROZEN_CPS_CODES {
        let outs = cps_build(v).map_err(|e| e.to_string())?;
        ensure(outs.len() == frozen, || format!("{v}: {} codes, frozen {frozen}", outs.len()))?;
        for out in &outs {
            ensure(
                validate_doubling(&out.code.s1, &out.code.s2).is_optimal() && out.code.min_distance() == 3,
                || format!("{v}: not optimal"),
            )?;
            let r = cps_report(out).map_err(|e| e.to_string())?;
            ensure(r.opposite_ok, || format!("{v}: R2 is not the opposite regulus of R1"))?;
            if v == CpsVariant::Basic {
                ensure(r.dual_regulus, || "basic: non-orbit plane duals are not a regulus".into())?;
            }
        }
        counts.push(format!("{v} {}", outs.len()));
    }
    Ok(format!(
        "order 6, {} good line / {} good plane orbits, optimal codes: {}",
        o.good_line_orbits.len(),
        o.good_plane_orbits.len(),
        counts.join(", ")
    ))
}

/// Spread types of the CPS outputs.
fn criterion_7b() -> Outcome {
    let mut found = Vec::new();
    let mut ok = true;
    for v in CpsVariant::ALL {
        let mut kinds: BTreeMap<String, usize> = BTreeMap::new();
        for out in cps_build(v).map_err(|e| e.to_string())? {
            let r = cps_report(&out).map_err(|e| e.to_string())?;
            ok &= r.s1_type == SpreadKind::IDelta && (v == CpsVariant::ReplacePlane || r.s2_type == SpreadKind::IDelta);
            *kinds.entry(format!("{}/{}", r.s1_type, r.s2_type)).or_default() += 1;
        }
        found.push(format!("{v}: {kinds:?}"));
    }
    let detail = found.join("; ");
    if ok {
        Ok(detail)
    } else {
        Err(format!("expected IDelta line spreads, found {detail}"))
    }
}

fn criterion_8() -> Outcome {
    let t = pg42();
    let all: Vec<&Subspace> = t.points.iter().chain(&t.lines).chain(&t.planes).chain(&t.solids).collect();
    for s in &all {
        ensure(s.dual().dual() == **s && s.dual().dim() == 5 - s.dim(), || {
            format!("duality fails on {s}")
        })?;
    }
    let mut checked = 0u64;
    for a in &t.lines {
        for b in &t.lines {
            let meet = a.meet(b).map_err(|e| e.to_string())?;
            let join = a.join(b).map_err(|e| e.to_string())?;
            ensure(join.dim() + meet.dim() == a.dim() + b.dim(), || {
                format!("modular law fails on {a}, {b}")
            })?;
            ensure(join.dual() == a.dual().meet(&b.dual()).map_err(|e| e.to_string())?, || {
                format!("join dual fails on {a}, {b}")
            })?;
            ensure(meet.dual() == a.dual().join(&b.dual()).map_err(|e| e.to_string())?, || {
                format!("meet dual fails on {a}, {b}")
            })?;
            ensure(a.contains(b) == b.dual().contains(&a.dual()), || {
                format!("order reversal fails on {a}, {b}")
            })?;
            checked += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pick = |rng: &mut ChaCha8Rng| -> Subspace {
        loop {
            let n = rng.gen_range(0..=5);
            let vs: Vec<Gf2Vector> = (0..n).map(|_| Gf2Vector::new(5, rng.gen_range(0..32)).expect("5-bit")).collect();
            if let Ok(s) = Subspace::span(5, &vs) {
                return s;
            }
        }
    };
    const SAMPLES: usize = 20_000;
    for _ in 0..SAMPLES {
        let (u, v, w) = (pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let d = |x: &Subspace, y: &Subspace| x.distance(y).expect("same ambient");
        ensure(d(&u, &v) == d(&v, &u), || format!("asymmetric distance on {u}, {v}"))?;
        ensure(d(&u, &w) <= d(&u, &v) + d(&v, &w), || {
            format!("triangle inequality fails on {u}, {v}, {w}")
        })?;
        ensure((d(&u, &v) == 0) == (u == v), || format!("distance zero on distinct {u}, {v}"))?;
    }
    Ok(format!(
        "{} subspaces dualized, {checked} line pairs, {SAMPLES} random triples",
        all.len()
    ))
}

struct Criterion {
    id: &'static str,
    name: &'static str,
    run: fn() -> Outcome,
    /// Reason this criterion cannot be met, recorded alongside the analysis.
    known_failure: Option<&'static str>,
}

const CRITERIA: [Criterion; 9] = [
    Criterion {
        id: "1",
        name: "enumeration counts",
        run: criterion_1,
        known_failure: None,
    },
    Criterion {
        id: "2",
        name: "reference pair corpus",
        run: criterion_2,
        known_failure: None,
    },
    Criterion {
        id: "3",
        name: "spread structure (exhaustive)",
        run: criterion_3,
        known_failure: None,
    },
    Criterion {
        id: "4",
        name: "XX pattern census (exhaustive)",
        run: criterion_4,
        known_failure: None,
    },
    Criterion {
        id: "5",
        name: "lifted Gabidulin block",
        run: criterion_5,
        known_failure: None,
    },
    Criterion {
        id: "6",
        name: "HKK pipeline",
        run: criterion_6,
        known_failure: None,
    },
    Criterion {
        id: "7a",
        name: "CPS group, orbits, optimality, dual regulus",
        run: criterion_7a,
        known_failure: None,
    },
    Criterion {
        id: "7b",
        name: "CPS spread types IDelta",
        run: criterion_7b,
        known_failure: Some("every good line orbit is regulus-free, so S1 cannot be IDelta"),
    },
    Criterion {
        id: "8",
        name: "algebraic property suite",
        run: criterion_8,
        known_failure: None,
    },
];

fn main() -> ExitCode {
    // libtest-style filtering: `cargo test --test acceptance -- 4` runs criterion 4 only.
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut unexpected = 0;
    let mut ran = 0;
    for c in CRITERIA
        .iter()
        .filter(|c| filters.is_empty() || filters.iter().any(|f| c.id == f || c.name.contains(f.as_str())))
    {
        ran += 1;
        let start = Instant::now();
        let outcome = (c.run)();
        let secs = start.elapsed().as_secs_f64();
        match (&outcome, c.known_failure) {
            (Ok(detail), None) => println!("criterion {} [{}]: PASS ({detail}) [{secs:.1} s]", c.id, c.name),
            (Err(why), None) => {
                unexpected += 1;
                println!("criterion {} [{}]: FAIL ({why}) [{secs:.1} s]", c.id, c.name);
            }
            (Err(why), Some(reason)) => {
                println!("criterion {} [{}]: FAIL ({why}) [known: {reason}] [{secs:.1} s]", c.id, c.name)
            }
            (Ok(detail), Some(_)) => {
                unexpected += 1;
                println!(
                    "criterion {} [{}]: PASS but listed as a known failure ({detail}) [{secs:.1} s]",
                    c.id, c.name
                );
            }
        }
    }
    println!("{ran} criteria run, {unexpected} unexpected outcomes");
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
