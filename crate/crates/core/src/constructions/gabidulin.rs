use crate::gf2geom::{Gf2Vector, Subspace};

/// Reduction polynomial x³ + x + 1 of the 8-element field.
const GF8_MODULUS: u8 = 0b1011;

/// Product in GF(8); an element is a 3-bit integer with bit `k` holding the
/// coefficient of `x^k`.
pub fn gf8_mul(a: u8, b: u8) -> u8 {
    let mut acc = 0u8;
    for k in 0..3 {
        if b >> k & 1 == 1 {
            acc ^= a << k;
        }
    }
    for k in (3..5).rev() {
        if acc >> k & 1 == 1 {
            acc ^= GF8_MODULUS << (k - 3);
        }
    }
    acc
}

/// Coordinates of a field element in the basis `1, x, x²`, laid out as a
/// length-3 row `(c0, c1, c2)` with `c0` in the most significant position.
fn coords(e: u8) -> u8 {
    (e & 1) << 2 | (e & 2) | (e >> 2 & 1)
}

/// 3×3 GF(2) matrix of `f(y) = a0·y + a1·y²`: row `i` holds the coordinates
/// of `f(x^i)`.
pub fn linearized_matrix(a0: u8, a1: u8) -> [u8; 3] {
    std::array::from_fn(|i| {
        let beta = 1u8 << i;
        coords(gf8_mul(a0, beta) ^ gf8_mul(a1, gf8_mul(beta, beta)))
    })
}

/// Rank of the difference of two 3×3 matrices.
pub fn rank_distance(a: [u8; 3], b: [u8; 3]) -> u8 {
    let diff = [a[0] ^ b[0], a[1] ^ b[1], a[2] ^ b[2]];
    Subspace::from_rows(3, &diff).expect("3-bit rows").dim()
}

/// Lifting of a 3×3 matrix: the row space of `[I₃ | M]` in GF(2)^6.
pub fn lift(m: [u8; 3]) -> Subspace {
    let rows: Vec<u8> = (0..3).map(|i| 1 << (5 - i) | m[i]).collect();
    Subspace::from_rows(6, &rows).expect("6-bit rows")
}

/// The 64 planes of PG(5,2) obtained by lifting the rank-distance-2 code of
/// linearized polynomials `a0·y + a1·y²` over GF(8).
#[derive(Clone, Debug)]
pub struct LiftedGabidulinCode {
    /// Indexed by `8·a0 + a1`.
    pub matrices: Vec<[u8; 3]>,
    pub codewords: Vec<Subspace>,
    /// The plane `x1 = x2 = x3 = 0`, disjoint from every codeword.
    pub special_plane: Subspace,
}

pub fn build_lifted_gabidulin() -> LiftedGabidulinCode {
    let matrices: Vec<[u8; 3]> = (0..8).flat_map(|a0| (0..8).map(move |a1| linearized_matrix(a0, a1))).collect();
    for (i, a) in matrices.iter().enumerate() {
        for b in &matrices[i + 1..] {
            assert!(rank_distance(*a, *b) >= 2, "rank distance below 2");
        }
    }
    let codewords = matrices.iter().map(|&m| lift(m)).collect();
    let special = [4u8, 5, 6].map(|i| Gf2Vector::unit(6, i).expect("coordinate in range"));
    LiftedGabidulinCode {
        matrices,
        codewords,
        special_plane: Subspace::span(6, &special).expect("ambient 6"),
    }
}

impl LiftedGabidulinCode {
    pub fn min_distance(&self) -> u8 {
        let mut best = u8::MAX;
        for (i, a) in self.codewords.iter().enumerate() {
            for b in &self.codewords[i + 1..] {
                best = best.min(a.distance(b).expect("ambient 6"));
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_arithmetic() {
        // x · x² = x³ = x + 1
        assert_eq!(gf8_mul(0b010, 0b100), 0b011);
        for a in 1..8 {
            assert_eq!((1..8).filter(|&b| gf8_mul(a, b) == 1).count(), 1);
            assert_eq!(gf8_mul(a, 1), a);
        }
    }

    #[test]
    fn code_shape() {
        let g = build_lifted_gabidulin();
        assert_eq!(g.codewords.len(), 64);
        let distinct: std::collections::HashSet<_> = g.codewords.iter().collect();
        assert_eq!(distinct.len(), 64);
        assert_eq!(g.min_distance(), 4);
        assert!(g.codewords.iter().all(|c| c.dim() == 3 && c.is_disjoint(&g.special_plane)));
        assert_eq!(g.codewords[0], lift([0, 0, 0]));
        // 2016 pairs, all at rank distance at least 2, and the code is linear
        let mut pairs = 0;
        for (i, a) in g.matrices.iter().enumerate() {
            for b in &g.matrices[i + 1..] {
                assert!(rank_distance(*a, *b) >= 2);
                pairs += 1;
                let sum = [a[0] ^ b[0], a[1] ^ b[1], a[2] ^ b[2]];
                assert!(g.matrices.contains(&sum));
            }
        }
        assert_eq!(pairs, 2016);
    }

    #[test]
    fn points_off_special_plane_are_covered_eight_times() {
        let g = build_lifted_gabidulin();
        for v in 1..64u64 {
            let covering = g.codewords.iter().filter(|c| c.point_mask() >> (v - 1) & 1 == 1).count();
            let on_special = g.special_plane.point_mask() >> (v - 1) & 1 == 1;
            assert_eq!(covering, if on_special { 0 } else { 8 });
        }
    }
}
