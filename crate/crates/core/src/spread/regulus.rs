use std::sync::OnceLock;

use crate::gf2geom::{pg42, GeomError, Subspace};

use super::SpreadError;

/// Three pairwise disjoint lines of PG(4,2) spanning a solid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Regulus {
    lines: [Subspace; 3],
    carrier: Subspace,
}

impl Regulus {
    pub fn new(lines: [Subspace; 3]) -> Result<Self, SpreadError> {
        if !is_regulus(&lines[0], &lines[1], &lines[2])? {
            return Err(SpreadError::Anomaly("lines do not form a regulus".into()));
        }
        Ok(Self::new_unchecked(lines))
    }

    pub(crate) fn new_unchecked(lines: [Subspace; 3]) -> Self {
        let carrier = lines[0].join(&lines[1]).expect("same ambient");
        Self { lines, carrier }
    }

    pub fn lines(&self) -> &[Subspace; 3] {
        &self.lines
    }

    /// The solid spanned by the three lines.
    pub fn carrier(&self) -> &Subspace {
        &self.carrier
    }

    /// Order-independent comparison of the line triples.
    pub fn same_lines(&self, other: &Regulus) -> bool {
        self.lines.iter().all(|l| other.lines.contains(l))
    }
}

fn check_line(l: &Subspace) -> Result<(), SpreadError> {
    if l.ambient() != 5 {
        return Err(GeomError::MixedAmbient(5, l.ambient()).into());
    }
    if l.dim() != 2 {
        return Err(GeomError::WrongDimension { expected: 2, got: l.dim() }.into());
    }
    Ok(())
}

/// Three lines form a regulus iff they are pairwise disjoint and their join
/// is a solid rather than the whole space.
pub fn is_regulus(l1: &Subspace, l2: &Subspace, l3: &Subspace) -> Result<bool, SpreadError> {
    for l in [l1, l2, l3] {
        check_line(l)?;
    }
    if !(l1.is_disjoint(l2) && l1.is_disjoint(l3) && l2.is_disjoint(l3)) {
        return Ok(false);
    }
    Ok(l1.join(l2)?.join(l3)?.dim() == 4)
}

/// The three transversals of a regulus. Writing the regulus as a 3×3 array
/// of points (one row per line), the transversals are the columns: for each
/// point `p` of the first line, the line through `p` and the unique point
/// where the plane `<p, second line>` meets the third line.
pub fn opposite_regulus(r: &Regulus) -> Regulus {
    let [l1, l2, l3] = r.lines;
    let transversals = l1.points().into_iter().map(|p| {
        let p_line = Subspace::span(5, &[p]).expect("ambient 5");
        let plane = p_line.join(&l2).expect("same ambient");
        let q = plane.meet(&l3).expect("same ambient");
        debug_assert_eq!(q.dim(), 1);
        p_line.join(&q).expect("same ambient")
    });
    let lines: Vec<Subspace> = transversals.collect();
    Regulus::new_unchecked([lines[0], lines[1], lines[2]])
}

/// `table[a][b]` is the point mask (as `u32`) of the join of lines `a` and
/// `b`; for disjoint lines this is the solid they span.
pub(crate) fn solid_table() -> &'static Vec<Vec<u32>> {
    static TABLE: OnceLock<Vec<Vec<u32>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let lines = &pg42().lines;
        lines
            .iter()
            .map(|a| lines.iter().map(|b| a.join(b).expect("same ambient").point_mask() as u32).collect())
            .collect()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spread::tests::line;

    #[test]
    fn example_one_regulus() {
        let a1 = line(["1", "25", "125"]);
        let a3 = line(["14", "23", "5u"]);
        let a9 = line(["135", "4", "2u"]);
        assert_eq!(is_regulus(&a1, &a3, &a9), Ok(true));
        let a2 = line(["15", "24", "3u"]);
        assert_eq!(is_regulus(&a1, &a2, &a9), Ok(false));
    }

    #[test]
    fn concurrent_lines_are_not_a_regulus() {
        let a = line(["1", "2", "12"]);
        let b = line(["1", "3", "13"]);
        let c = line(["1", "4", "14"]);
        assert_eq!(is_regulus(&a, &b, &c), Ok(false));
    }

    #[test]
    fn disjoint_triple_spanning_everything_is_not_a_regulus() {
        // search for two disjoint lines plus a third line disjoint from both
        // but outside their solid
        let lines = &pg42().lines;
        let a = lines[0];
        let b = *lines.iter().find(|l| l.is_disjoint(&a)).unwrap();
        let solid = a.join(&b).unwrap();
        let c = lines
            .iter()
            .find(|l| l.is_disjoint(&a) && l.is_disjoint(&b) && !solid.contains(l))
            .unwrap();
        assert_eq!(a.join(&b).unwrap().join(c).unwrap().dim(), 5);
        assert_eq!(is_regulus(&a, &b, c), Ok(false));
    }

    #[test]
    fn non_lines_are_rejected() {
        let a = line(["1", "2", "12"]);
        let plane = a.join(&line(["3", "4", "34"])).unwrap();
        assert!(is_regulus(&a, &a, &plane).is_err());
    }

    #[test]
    fn opposite_is_an_involution_of_transversals() {
        let r = Regulus::new([line(["1", "25", "125"]), line(["14", "23", "5u"]), line(["135", "4", "2u"])]).unwrap();
        let o = opposite_regulus(&r);
        assert_eq!(o.carrier(), r.carrier());
        for t in o.lines() {
            for l in r.lines() {
                assert_eq!(t.meet_dim(l), 1);
            }
        }
        assert!(is_regulus(&o.lines[0], &o.lines[1], &o.lines[2]).unwrap());
        assert!(opposite_regulus(&o).same_lines(&r));
        let covered = |x: &Regulus| x.lines.iter().fold(0, |m, l| m | l.point_mask());
        assert_eq!(covered(&o), covered(&r));
        assert_eq!(covered(&r).count_ones(), 9);
    }
}
