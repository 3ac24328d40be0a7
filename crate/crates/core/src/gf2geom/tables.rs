use std::collections::{BTreeSet, HashMap};
use std::sync::OnceLock;

use super::subspace::Subspace;
use super::vector::check_ambient;
use super::GeomError;

/// Every subspace of the given dimension, each once, sorted by canonical
/// basis (read as a bit string).
pub fn enumerate_subspaces(ambient: u8, dim: u8) -> Result<Vec<Subspace>, GeomError> {
    check_ambient(ambient)?;
    if dim > ambient {
        return Err(GeomError::DimOutOfRange { dim, ambient });
    }
    let mut layer = BTreeSet::from([Subspace::zero(ambient)?]);
    for _ in 0..dim {
        let mut next = BTreeSet::new();
        for s in &layer {
            for v in 1u16..(1 << ambient) {
                let v = v as u8;
                if s.point_mask() >> (v - 1) & 1 == 0 {
                    next.insert(s.join(&Subspace::from_rows(ambient, &[v])?)?);
                }
            }
        }
        layer = next;
    }
    Ok(layer.into_iter().collect())
}

/// Precomputed subspace tables of PG(4,2), with IDs given by position in
/// the canonical enumeration order.
#[derive(Debug)]
pub struct Pg42 {
    pub points: Vec<Subspace>,
    pub lines: Vec<Subspace>,
    pub planes: Vec<Subspace>,
    pub solids: Vec<Subspace>,
    line_ids: HashMap<u64, usize>,
    plane_ids: HashMap<u64, usize>,
}

impl Pg42 {
    fn build() -> Self {
        let e = |d| enumerate_subspaces(5, d).expect("ambient 5 is supported");
        let lines = e(2);
        let planes = e(3);
        let index = |v: &[Subspace]| v.iter().enumerate().map(|(i, s)| (s.point_mask(), i)).collect();
        Self {
            points: e(1),
            line_ids: index(&lines),
            plane_ids: index(&planes),
            lines,
            planes,
            solids: e(4),
        }
    }

    pub fn line_id(&self, line: &Subspace) -> Option<usize> {
        if line.ambient() != 5 || line.dim() != 2 {
            return None;
        }
        self.line_ids.get(&line.point_mask()).copied()
    }

    pub fn plane_id(&self, plane: &Subspace) -> Option<usize> {
        if plane.ambient() != 5 || plane.dim() != 3 {
            return None;
        }
        self.plane_ids.get(&plane.point_mask()).copied()
    }
}

/// Shared tables for PG(4,2), built on first use.
pub fn pg42() -> &'static Pg42 {
    static TABLES: OnceLock<Pg42> = OnceLock::new();
    TABLES.get_or_init(Pg42::build)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_in_pg42() {
        let t = pg42();
        assert_eq!(t.points.len(), 31);
        assert_eq!(t.lines.len(), 155);
        assert_eq!(t.planes.len(), 155);
        assert_eq!(t.solids.len(), 31);
        assert!(t.lines.windows(2).all(|w| w[0] < w[1]));
        for (i, l) in t.lines.iter().enumerate() {
            assert_eq!(t.line_id(l), Some(i));
        }
    }

    #[test]
    fn dim_out_of_range() {
        assert_eq!(enumerate_subspaces(5, 6), Err(GeomError::DimOutOfRange { dim: 6, ambient: 5 }));
        assert_eq!(enumerate_subspaces(5, 0).unwrap().len(), 1);
        assert_eq!(enumerate_subspaces(5, 5).unwrap().len(), 1);
    }
}
