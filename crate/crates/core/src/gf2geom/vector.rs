use std::fmt;

use serde::{Deserialize, Serialize};

use super::GeomError;

/// Largest ambient vector-space dimension handled by this crate.
pub const MAX_AMBIENT: u8 = 6;

/// A vector of GF(2)^n for n in {5, 6}.
///
/// Coordinate `i` (1-based, as written in the compact notation) is stored in
/// bit `n - i`, so the bit string `01001` reads as the integer `0b01001`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Gf2Vector {
    ambient: u8,
    bits: u8,
}

impl Gf2Vector {
    pub fn new(ambient: u8, bits: u8) -> Result<Self, GeomError> {
        check_ambient(ambient)?;
        if u16::from(bits) >> ambient != 0 {
            return Err(GeomError::VectorOutOfRange { bits, ambient });
        }
        Ok(Self { ambient, bits })
    }

    pub(crate) const fn from_bits_unchecked(ambient: u8, bits: u8) -> Self {
        Self { ambient, bits }
    }

    pub fn zero(ambient: u8) -> Result<Self, GeomError> {
        Self::new(ambient, 0)
    }

    /// All-ones vector, written `u` in compact notation.
    pub fn ones(ambient: u8) -> Result<Self, GeomError> {
        check_ambient(ambient)?;
        Ok(Self {
            ambient,
            bits: ((1u16 << ambient) - 1) as u8,
        })
    }

    /// Canonical basis vector `e_i`, 1-based.
    pub fn unit(ambient: u8, index: u8) -> Result<Self, GeomError> {
        check_ambient(ambient)?;
        if index == 0 || index > ambient {
            return Err(GeomError::CoordinateOutOfRange { index, ambient });
        }
        Ok(Self {
            ambient,
            bits: 1 << (ambient - index),
        })
    }

    pub const fn ambient(self) -> u8 {
        self.ambient
    }

    pub const fn bits(self) -> u8 {
        self.bits
    }

    pub const fn is_zero(self) -> bool {
        self.bits == 0
    }

    /// A point of the projective space is a nonzero vector.
    pub const fn is_point(self) -> bool {
        self.bits != 0
    }

    /// Coordinate `i` (1-based).
    pub fn coord(self, index: u8) -> bool {
        debug_assert!(index >= 1 && index <= self.ambient);
        (self.bits >> (self.ambient - index)) & 1 == 1
    }

    /// Standard dot product reduced mod 2.
    pub fn dot(self, other: Self) -> bool {
        debug_assert_eq!(self.ambient, other.ambient);
        (self.bits & other.bits).count_ones() % 2 == 1
    }

    pub fn weight(self) -> u32 {
        self.bits.count_ones()
    }

    /// Fixed-width bit string, coordinate 1 first.
    pub fn to_bit_string(self) -> String {
        (1..=self.ambient).map(|i| if self.coord(i) { '1' } else { '0' }).collect()
    }

    /// Compact notation: the support as coordinate indices when it has at
    /// most three entries, otherwise the complement followed by `u`.
    /// The zero vector has no such form and prints as a bit string.
    pub fn to_compact(self) -> String {
        if self.is_zero() {
            return self.to_bit_string();
        }
        let digits =
            |pred: &dyn Fn(u8) -> bool| -> String { (1..=self.ambient).filter(|&i| pred(i)).map(|i| char::from(b'0' + i)).collect() };
        if self.weight() <= 3 {
            digits(&|i| self.coord(i))
        } else {
            let mut s = digits(&|i| !self.coord(i));
            s.push('u');
            s
        }
    }

    /// Parses a compact token: a string over `1..=ambient` and `u`, no
    /// repeated character; the value is the sum of the named generators.
    pub fn parse_compact(token: &str, ambient: u8) -> Result<Self, GeomError> {
        check_ambient(ambient)?;
        if token.is_empty() {
            return Err(GeomError::EmptyToken);
        }
        let mut seen = 0u8;
        let mut bits = 0u8;
        for c in token.chars() {
            let (slot, value) = match c {
                'u' => (0u8, Self::ones(ambient)?.bits),
                '1'..='9' => {
                    let index = c as u8 - b'0';
                    if index > ambient {
                        return Err(GeomError::UnknownTokenChar { token: token.into(), c });
                    }
                    (index, 1 << (ambient - index))
                }
                _ => return Err(GeomError::UnknownTokenChar { token: token.into(), c }),
            };
            if seen & (1 << slot) != 0 {
                return Err(GeomError::RepeatedTokenChar { token: token.into(), c });
            }
            seen |= 1 << slot;
            bits ^= value;
        }
        Ok(Self { ambient, bits })
    }

    /// Parses a fixed-width bit string such as `01001`.
    pub fn parse_bit_string(s: &str) -> Result<Self, GeomError> {
        let ambient = u8::try_from(s.len()).map_err(|_| GeomError::BadBitString(s.into()))?;
        check_ambient(ambient).map_err(|_| GeomError::BadBitString(s.into()))?;
        let mut bits = 0u8;
        for c in s.chars() {
            bits = (bits << 1)
                | match c {
                    '0' => 0,
                    '1' => 1,
                    _ => return Err(GeomError::BadBitString(s.into())),
                };
        }
        Ok(Self { ambient, bits })
    }
}

impl std::ops::Add for Gf2Vector {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.ambient, rhs.ambient);
        Self {
            ambient: self.ambient,
            bits: self.bits ^ rhs.bits,
        }
    }
}

impl fmt::Debug for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_bit_string())
    }
}

impl fmt::Display for Gf2Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_compact())
    }
}

/// Parses one compact token into a point of GF(2)^ambient.
pub fn parse_point(token: &str, ambient: u8) -> Result<Gf2Vector, GeomError> {
    let v = Gf2Vector::parse_compact(token, ambient)?;
    if v.is_zero() {
        return Err(GeomError::ZeroPoint(token.into()));
    }
    Ok(v)
}

pub(crate) fn check_ambient(ambient: u8) -> Result<(), GeomError> {
    if (1..=MAX_AMBIENT).contains(&ambient) {
        Ok(())
    } else {
        Err(GeomError::UnsupportedAmbient(ambient))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compact_token_examples() {
        assert_eq!(parse_point("25", 5).unwrap().to_bit_string(), "01001");
        assert_eq!(parse_point("3u", 5).unwrap().to_bit_string(), "11011");
        assert_eq!(parse_point("1", 5).unwrap().to_bit_string(), "10000");
        assert_eq!(parse_point("u", 5).unwrap().to_bit_string(), "11111");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_point("", 5), Err(GeomError::EmptyToken)));
        assert!(matches!(parse_point("2x", 5), Err(GeomError::UnknownTokenChar { c: 'x', .. })));
        assert!(matches!(parse_point("6", 5), Err(GeomError::UnknownTokenChar { c: '6', .. })));
        assert!(matches!(parse_point("22", 5), Err(GeomError::RepeatedTokenChar { c: '2', .. })));
        assert!(matches!(parse_point("uu", 5), Err(GeomError::RepeatedTokenChar { c: 'u', .. })));
        // 1234 + u = 5 is fine, but 12345u sums to zero
        assert!(matches!(parse_point("12345u", 5), Err(GeomError::ZeroPoint(_))));
    }

    #[test]
    fn compact_printing_prefers_short_form() {
        for (bits, expect) in [("11011", "3u"), ("11100", "123"), ("10111", "2u"), ("11111", "u"), ("10110", "134")] {
            assert_eq!(Gf2Vector::parse_bit_string(bits).unwrap().to_compact(), expect);
        }
    }

    #[test]
    fn compact_round_trip_all_vectors() {
        for ambient in [5u8, 6] {
            for bits in 1..(1u16 << ambient) {
                let v = Gf2Vector::new(ambient, bits as u8).unwrap();
                let s = v.to_compact();
                assert!(s.len() <= 3, "{s}");
                assert_eq!(parse_point(&s, ambient).unwrap(), v);
            }
        }
    }
}
