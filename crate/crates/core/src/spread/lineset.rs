use std::fmt;

/// A set of line IDs of PG(4,2) (0..155) packed into three words.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LineSet([u64; 3]);

impl LineSet {
    pub const EMPTY: Self = Self([0; 3]);

    pub fn full(n: usize) -> Self {
        let mut s = Self::EMPTY;
        for i in 0..n {
            s.insert(i);
        }
        s
    }

    #[inline]
    pub fn insert(&mut self, i: usize) {
        self.0[i >> 6] |= 1 << (i & 63);
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.0[i >> 6] &= !(1 << (i & 63));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.0[i >> 6] >> (i & 63) & 1 == 1
    }

    #[inline]
    pub fn len(&self) -> u32 {
        self.0.iter().map(|w| w.count_ones()).sum()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.0 == [0; 3]
    }

    #[inline]
    pub fn intersects(&self, other: &Self) -> bool {
        (self.0[0] & other.0[0]) | (self.0[1] & other.0[1]) | (self.0[2] & other.0[2]) != 0
    }

    /// Removes and returns the smallest element.
    #[inline]
    pub fn pop_first(&mut self) -> Option<usize> {
        for (k, w) in self.0.iter_mut().enumerate() {
            if *w != 0 {
                let b = w.trailing_zeros() as usize;
                *w &= *w - 1;
                return Some(k * 64 + b);
            }
        }
        None
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        let mut s = *self;
        std::iter::from_fn(move || s.pop_first())
    }

    pub fn words(&self) -> [u64; 3] {
        self.0
    }

    /// Fixed-width hex rendering, most significant word first.
    pub fn to_hex(&self) -> String {
        format!("{:07x}{:016x}{:016x}", self.0[2], self.0[1], self.0[0])
    }
}

impl std::ops::BitAnd for LineSet {
    type Output = Self;

    #[inline]
    fn bitand(self, rhs: Self) -> Self {
        Self([self.0[0] & rhs.0[0], self.0[1] & rhs.0[1], self.0[2] & rhs.0[2]])
    }
}

impl std::ops::BitOr for LineSet {
    type Output = Self;

    #[inline]
    fn bitor(self, rhs: Self) -> Self {
        Self([self.0[0] | rhs.0[0], self.0[1] | rhs.0[1], self.0[2] | rhs.0[2]])
    }
}

impl std::ops::BitOrAssign for LineSet {
    #[inline]
    fn bitor_assign(&mut self, rhs: Self) {
        *self = *self | rhs;
    }
}

impl FromIterator<usize> for LineSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut s = Self::EMPTY;
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl fmt::Debug for LineSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_ops() {
        let a: LineSet = [0, 63, 64, 154].into_iter().collect();
        assert_eq!(a.len(), 4);
        assert!(a.contains(154) && !a.contains(1));
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 63, 64, 154]);
        let b: LineSet = [63, 100].into_iter().collect();
        assert_eq!((a & b).iter().collect::<Vec<_>>(), vec![63]);
        assert_eq!((a | b).len(), 5);
        assert_eq!(LineSet::full(155).len(), 155);
    }
}
