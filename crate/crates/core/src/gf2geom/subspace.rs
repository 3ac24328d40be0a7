use std::fmt;

use super::vector::{check_ambient, Gf2Vector, MAX_AMBIENT};
use super::GeomError;

/// A vector subspace of GF(2)^n, i.e. a projective subspace of PG(n-1, 2).
///
/// The basis is kept in reduced row-echelon form (pivot = leading bit, rows
/// sorted by descending pivot), which makes it a canonical representative:
/// equal subspaces have bit-identical bases. The point set is cached as a
/// mask with bit `v - 1` set for every nonzero vector `v` of the subspace.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    ambient: u8,
    dim: u8,
    basis: [u8; MAX_AMBIENT as usize],
    points: u64,
}

fn leading_bit(v: u8) -> u8 {
    1 << (7 - v.leading_zeros())
}

impl Subspace {
    pub fn zero(ambient: u8) -> Result<Self, GeomError> {
        check_ambient(ambient)?;
        Ok(Self {
            ambient,
            dim: 0,
            basis: [0; MAX_AMBIENT as usize],
            points: 0,
        })
    }

    pub fn whole(ambient: u8) -> Result<Self, GeomError> {
        let rows: Vec<u8> = (1..=ambient).map(|i| 1 << (ambient - i)).collect();
        Self::from_rows(ambient, &rows)
    }

    /// Span of raw row bit patterns.
    pub(crate) fn from_rows(ambient: u8, rows: &[u8]) -> Result<Self, GeomError> {
        let mut s = Self::zero(ambient)?;
        for &r in rows {
            if u16::from(r) >> ambient != 0 {
                return Err(GeomError::VectorOutOfRange { bits: r, ambient });
            }
            s.insert(r);
        }
        s.points = s.compute_points();
        Ok(s)
    }

    /// The subspace whose nonzero vectors are exactly the bits of `mask`.
    /// The caller guarantees the mask is closed under addition.
    pub(crate) fn from_point_mask(ambient: u8, mask: u64) -> Self {
        let mut s = Self {
            ambient,
            dim: 0,
            basis: [0; MAX_AMBIENT as usize],
            points: 0,
        };
        let mut rest = mask;
        while rest != 0 {
            let v = rest.trailing_zeros() as u8 + 1;
            s.insert(v);
            rest &= !s.compute_points();
        }
        s.points = s.compute_points();
        debug_assert_eq!(s.points, mask, "point mask is not a subspace");
        s
    }

    /// The subspace with exactly the points in `mask`, if those points are
    /// closed under addition.
    pub fn from_point_mask_checked(ambient: u8, mask: u64) -> Option<Self> {
        check_ambient(ambient).ok()?;
        if ambient < 64 && mask >> ((1u32 << ambient) - 1) != 0 {
            return None;
        }
        let mut s = Self {
            ambient,
            dim: 0,
            basis: [0; MAX_AMBIENT as usize],
            points: 0,
        };
        for v in iter_mask(mask) {
            s.insert(v);
        }
        s.points = s.compute_points();
        (s.points == mask).then_some(s)
    }

    /// Smallest subspace containing every input vector.
    pub fn span(ambient: u8, vectors: &[Gf2Vector]) -> Result<Self, GeomError> {
        if let Some(v) = vectors.iter().find(|v| v.ambient() != ambient) {
            return Err(GeomError::MixedAmbient(ambient, v.ambient()));
        }
        let rows: Vec<u8> = vectors.iter().map(|v| v.bits()).collect();
        Self::from_rows(ambient, &rows)
    }

    /// Gaussian elimination step: reduce `v` against the basis and, if it is
    /// independent, add it and re-establish reduced row-echelon form.
    fn insert(&mut self, mut v: u8) -> bool {
        let d = self.dim as usize;
        for &b in &self.basis[..d] {
            if v & leading_bit(b) != 0 {
                v ^= b;
            }
        }
        if v == 0 {
            return false;
        }
        let lead = leading_bit(v);
        for b in &mut self.basis[..d] {
            if *b & lead != 0 {
                *b ^= v;
            }
        }
        self.basis[d] = v;
        self.dim += 1;
        self.basis[..=d].sort_unstable_by(|a, b| b.cmp(a));
        true
    }

    fn compute_points(&self) -> u64 {
        let d = self.dim as usize;
        let mut mask = 0u64;
        for combo in 1u32..(1 << d) {
            let mut v = 0u8;
            for (i, &b) in self.basis[..d].iter().enumerate() {
                if combo >> i & 1 == 1 {
                    v ^= b;
                }
            }
            mask |= 1 << (v - 1);
        }
        mask
    }

    pub const fn ambient(&self) -> u8 {
        self.ambient
    }

    /// Vector-space dimension (1 = point, 2 = line, 3 = plane, 4 = solid).
    pub const fn dim(&self) -> u8 {
        self.dim
    }

    pub fn basis(&self) -> Vec<Gf2Vector> {
        self.basis_bits()
            .iter()
            .map(|&b| Gf2Vector::from_bits_unchecked(self.ambient, b))
            .collect()
    }

    pub fn basis_bits(&self) -> &[u8] {
        &self.basis[..self.dim as usize]
    }

    pub const fn point_mask(&self) -> u64 {
        self.points
    }

    /// Nonzero vectors in increasing bit order.
    pub fn points(&self) -> Vec<Gf2Vector> {
        iter_mask(self.points)
            .map(|v| Gf2Vector::from_bits_unchecked(self.ambient, v))
            .collect()
    }

    pub fn point_count(&self) -> u32 {
        self.points.count_ones()
    }

    pub fn contains_vector(&self, v: Gf2Vector) -> bool {
        v.is_zero() || self.points >> (v.bits() - 1) & 1 == 1
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &Self) -> bool {
        other.points & !self.points == 0
    }

    /// Trivial intersection, i.e. no common projective point.
    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.points & other.points == 0
    }

    fn same_ambient(&self, other: &Self) -> Result<(), GeomError> {
        if self.ambient == other.ambient {
            Ok(())
        } else {
            Err(GeomError::MixedAmbient(self.ambient, other.ambient))
        }
    }

    pub fn meet(&self, other: &Self) -> Result<Self, GeomError> {
        self.same_ambient(other)?;
        Ok(Self::from_point_mask(self.ambient, self.points & other.points))
    }

    pub fn join(&self, other: &Self) -> Result<Self, GeomError> {
        self.same_ambient(other)?;
        let mut s = *self;
        for &b in other.basis_bits() {
            s.insert(b);
        }
        s.points = s.compute_points();
        Ok(s)
    }

    /// Dimension of the intersection, read off the shared point count.
    pub fn meet_dim(&self, other: &Self) -> u8 {
        debug_assert_eq!(self.ambient, other.ambient);
        dim_of_mask(self.points & other.points)
    }

    /// Orthogonal complement under the standard dot product.
    pub fn dual(&self) -> Self {
        let ambient = self.ambient;
        let basis = self.basis_bits();
        let mut mask = 0u64;
        for v in 1u16..(1 << ambient) {
            let v = v as u8;
            if basis.iter().all(|&b| (v & b).count_ones().is_multiple_of(2)) {
                mask |= 1 << (v - 1);
            }
        }
        Self::from_point_mask(ambient, mask)
    }

    /// Subspace distance `dim U + dim V - 2 dim(U ∩ V)`.
    pub fn distance(&self, other: &Self) -> Result<u8, GeomError> {
        self.same_ambient(other)?;
        Ok(self.dim + other.dim - 2 * self.meet_dim(other))
    }

    /// Compact listing of the points, e.g. `{1,25,125}` for a line.
    /// Shorter tokens come first.
    pub fn to_compact(&self) -> String {
        let mut toks: Vec<String> = self.points().iter().map(|p| p.to_compact()).collect();
        toks.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        format!("{{{}}}", toks.join(","))
    }

    /// Basis rows as bit strings.
    pub fn basis_strings(&self) -> Vec<String> {
        self.basis().iter().map(|v| v.to_bit_string()).collect()
    }
}

/// Dimension of a subspace given its point mask (`2^d - 1` points).
pub fn dim_of_mask(mask: u64) -> u8 {
    (mask.count_ones() + 1).trailing_zeros() as u8
}

pub(crate) fn iter_mask(mut mask: u64) -> impl Iterator<Item = u8> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let v = mask.trailing_zeros() as u8 + 1;
            mask &= mask - 1;
            Some(v)
        }
    })
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace[{}/{}]", self.dim, self.ambient)?;
        f.debug_list().entries(self.basis()).finish()
    }
}

impl fmt::Display for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_compact())
    }
}

/// Convenience wrapper: `span` of the given points.
pub fn span(ambient: u8, points: &[Gf2Vector]) -> Result<Subspace, GeomError> {
    Subspace::span(ambient, points)
}

pub fn meet(u: &Subspace, v: &Subspace) -> Result<Subspace, GeomError> {
    u.meet(v)
}

pub fn join(u: &Subspace, v: &Subspace) -> Result<Subspace, GeomError> {
    u.join(v)
}

pub fn dual(u: &Subspace) -> Subspace {
    u.dual()
}

pub fn subspace_distance(u: &Subspace, v: &Subspace) -> Result<u8, GeomError> {
    u.distance(v)
}
