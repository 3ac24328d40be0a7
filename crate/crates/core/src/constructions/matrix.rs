use std::fmt;

use crate::gf2geom::{GeomError, Gf2Vector, Subspace};

/// Square matrix over GF(2) of order `n ≤ 6`. Row `i` is stored as a bit
/// pattern in the same layout as vectors: entry `(i, j)` (0-based) is bit
/// `n - 1 - j` of `rows[i]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf2Matrix {
    n: u8,
    rows: [u8; 6],
}

impl Gf2Matrix {
    pub fn from_rows(n: u8, rows: &[u8]) -> Result<Self, GeomError> {
        Gf2Vector::zero(n)?;
        if rows.len() != usize::from(n) {
            return Err(GeomError::WrongDimension {
                expected: n,
                got: rows.len() as u8,
            });
        }
        let mut out = [0u8; 6];
        for (o, &r) in out.iter_mut().zip(rows) {
            *o = Gf2Vector::new(n, r)?.bits();
        }
        Ok(Self { n, rows: out })
    }

    /// Builds a matrix from 0/1 entries given row by row.
    pub fn from_entries<const N: usize>(entries: [[u8; N]; N]) -> Result<Self, GeomError> {
        let rows: Vec<u8> = entries.iter().map(|r| r.iter().fold(0u8, |acc, &e| acc << 1 | (e & 1))).collect();
        Self::from_rows(N as u8, &rows)
    }

    pub fn identity(n: u8) -> Result<Self, GeomError> {
        let rows: Vec<u8> = (0..n).map(|i| 1 << (n - 1 - i)).collect();
        Self::from_rows(n, &rows)
    }

    pub fn order(&self) -> u8 {
        self.n
    }

    pub fn rows(&self) -> &[u8] {
        &self.rows[..usize::from(self.n)]
    }

    pub fn entry(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> (self.n as usize - 1 - j) & 1 == 1
    }

    pub fn transpose(&self) -> Self {
        let n = usize::from(self.n);
        let mut rows = [0u8; 6];
        for (j, r) in rows.iter_mut().take(n).enumerate() {
            for i in 0..n {
                if self.entry(i, j) {
                    *r |= 1 << (n - 1 - i);
                }
            }
        }
        Self { n: self.n, rows }
    }

    /// `M v` with `v` read as a column vector.
    pub fn apply(&self, v: Gf2Vector) -> Gf2Vector {
        assert_eq!(v.ambient(), self.n, "matrix order and vector length differ");
        let n = usize::from(self.n);
        let bits = self
            .rows()
            .iter()
            .enumerate()
            .fold(0u8, |acc, (i, &r)| acc | (((r & v.bits()).count_ones() & 1) as u8) << (n - 1 - i));
        Gf2Vector::new(self.n, bits).expect("length preserved")
    }

    /// Image of a subspace under `v ↦ M v`.
    pub fn apply_subspace(&self, s: &Subspace) -> Subspace {
        let images: Vec<Gf2Vector> = s.basis().into_iter().map(|v| self.apply(v)).collect();
        Subspace::span(self.n, &images).expect("same ambient")
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        // row i of AB is the combination of rows of B selected by row i of A
        let n = usize::from(self.n);
        let mut rows = [0u8; 6];
        for (i, r) in rows.iter_mut().take(n).enumerate() {
            for k in 0..n {
                if self.entry(i, k) {
                    *r ^= other.rows[k];
                }
            }
        }
        Self { n: self.n, rows }
    }

    pub fn rank(&self) -> u8 {
        Subspace::from_rows(self.n, self.rows()).expect("rows in range").dim()
    }

    pub fn is_invertible(&self) -> bool {
        self.rank() == self.n
    }

    /// Gauss-Jordan on `[M | I]`.
    pub fn inverse(&self) -> Option<Self> {
        let n = usize::from(self.n);
        let mut a: Vec<u8> = self.rows().to_vec();
        let mut b: Vec<u8> = Self::identity(self.n).ok()?.rows().to_vec();
        for col in 0..n {
            let bit = 1u8 << (n - 1 - col);
            let pivot = (col..n).find(|&r| a[r] & bit != 0)?;
            a.swap(col, pivot);
            b.swap(col, pivot);
            for r in 0..n {
                if r != col && a[r] & bit != 0 {
                    a[r] ^= a[col];
                    b[r] ^= b[col];
                }
            }
        }
        Self::from_rows(self.n, &b).ok()
    }
}

impl fmt::Debug for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .iter()
            .map(|&r| format!("{:0w$b}", r, w = usize::from(self.n)))
            .collect();
        write!(f, "[{}]", rows.join(" "))
    }
}

impl fmt::Display for Gf2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_inverse() {
        let id = Gf2Matrix::identity(5).unwrap();
        let m = Gf2Matrix::from_entries([[1, 1, 0], [0, 1, 1], [0, 0, 1]]).unwrap();
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Gf2Matrix::identity(3).unwrap());
        assert_eq!(inv.mul(&m), Gf2Matrix::identity(3).unwrap());
        assert_eq!(id.inverse(), Some(id));
        let singular = Gf2Matrix::from_entries([[1, 1], [1, 1]]).unwrap();
        assert_eq!(singular.rank(), 1);
        assert_eq!(singular.inverse(), None);
    }

    #[test]
    fn apply_is_column_action() {
        // first column of M is M e1
        let m = Gf2Matrix::from_entries([[1, 0, 1], [1, 1, 0], [0, 1, 1]]).unwrap();
        let e1 = Gf2Vector::unit(3, 1).unwrap();
        assert_eq!(m.apply(e1).to_bit_string(), "110");
        // (AB)v = A(Bv)
        let b = m.transpose();
        for v in 1..8 {
            let v = Gf2Vector::new(3, v).unwrap();
            assert_eq!(m.mul(&b).apply(v), m.apply(b.apply(v)));
        }
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Gf2Matrix::from_rows(3, &[1, 2]).is_err());
        assert!(Gf2Matrix::from_rows(3, &[1, 2, 8]).is_err());
    }
}
