//! GF(2^8) with the reduction polynomial x^8 + x^4 + x^3 + x + 1 (0x11B).
//!
//! 0x02 is not a generator modulo 0x11B, so the log/exp tables are built
//! from 0x03.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Sub};

use crate::error::{Error, Result};

pub const POLYNOMIAL: u16 = 0x11B;

struct Tables {
    exp: [u8; 512],
    log: [u8; 256],
}

const fn xtime(a: u8) -> u8 {
    let shifted = (a as u16) << 1;
    if shifted & 0x100 != 0 {
        (shifted ^ POLYNOMIAL) as u8
    } else {
        shifted as u8
    }
}

const fn build_tables() -> Tables {
    let mut exp = [0u8; 512];
    let mut log = [0u8; 256];
    let mut x: u8 = 1;
    let mut i = 0;
    while i < 255 {
        exp[i] = x;
        exp[i + 255] = x;
        log[x as usize] = i as u8;
        // x * 0x03
        x = xtime(x) ^ x;
        i += 1;
    }
    exp[510] = exp[0];
    exp[511] = exp[1];
    Tables { exp, log }
}

static TABLES: Tables = build_tables();

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Gf256(pub u8);

impl Gf256 {
    pub const ZERO: Gf256 = Gf256(0);
    pub const ONE: Gf256 = Gf256(1);

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }

    pub fn inverse(self) -> Result<Gf256> {
        if self.0 == 0 {
            return Err(Error::ZeroInverse);
        }
        let l = TABLES.log[self.0 as usize] as usize;
        Ok(Gf256(TABLES.exp[255 - l]))
    }
}

impl fmt::Debug for Gf256 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#04x}", self.0)
    }
}

impl Add for Gf256 {
    type Output = Gf256;
    #[inline]
    fn add(self, rhs: Gf256) -> Gf256 {
        Gf256(self.0 ^ rhs.0)
    }
}

impl AddAssign for Gf256 {
    #[inline]
    fn add_assign(&mut self, rhs: Gf256) {
        self.0 ^= rhs.0;
    }
}

impl Sub for Gf256 {
    type Output = Gf256;
    #[inline]
    fn sub(self, rhs: Gf256) -> Gf256 {
        Gf256(self.0 ^ rhs.0)
    }
}

impl Mul for Gf256 {
    type Output = Gf256;
    #[inline]
    fn mul(self, rhs: Gf256) -> Gf256 {
        if self.0 == 0 || rhs.0 == 0 {
            return Gf256::ZERO;
        }
        let l = TABLES.log[self.0 as usize] as usize + TABLES.log[rhs.0 as usize] as usize;
        Gf256(TABLES.exp[l])
    }
}

impl MulAssign for Gf256 {
    #[inline]
    fn mul_assign(&mut self, rhs: Gf256) {
        *self = *self * rhs;
    }
}

impl Div for Gf256 {
    type Output = Result<Gf256>;
    fn div(self, rhs: Gf256) -> Result<Gf256> {
        Ok(self * rhs.inverse()?)
    }
}

/// `dst += c * src`, element-wise.
pub(crate) fn add_scaled(dst: &mut [Gf256], src: &[Gf256], c: Gf256) {
    if c.is_zero() {
        return;
    }
    let lc = TABLES.log[c.0 as usize] as usize;
    for (d, s) in dst.iter_mut().zip(src) {
        if s.0 != 0 {
            d.0 ^= TABLES.exp[lc + TABLES.log[s.0 as usize] as usize];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Shift-and-add multiplication, independent of the tables.
    fn slow_mul(mut a: u8, mut b: u8) -> u8 {
        let mut p = 0u8;
        while b != 0 {
            if b & 1 != 0 {
                p ^= a;
            }
            a = xtime(a);
            b >>= 1;
        }
        p
    }

    #[test]
    fn addition_is_xor() {
        for a in 0..=255u8 {
            assert_eq!(Gf256(a) + Gf256(a), Gf256::ZERO);
            assert_eq!(Gf256(a) + Gf256(0x5c), Gf256(a ^ 0x5c));
        }
    }

    #[test]
    fn tables_match_shift_and_add() {
        for a in 0..=255u8 {
            for b in 0..=255u8 {
                assert_eq!((Gf256(a) * Gf256(b)).0, slow_mul(a, b), "{a} * {b}");
            }
        }
    }

    #[test]
    fn inverse_of_two() {
        assert_eq!(Gf256(0x02) * Gf256(0x8D), Gf256::ONE);
        assert_eq!(Gf256(0x02).inverse().unwrap(), Gf256(0x8D));
        assert_eq!(Gf256(0x02) * Gf256(0x8E), Gf256(0x07));
        // AES reference pair
        assert_eq!(Gf256(0x53) * Gf256(0xCA), Gf256::ONE);
    }

    #[test]
    fn every_nonzero_element_is_invertible() {
        for a in 1..=255u8 {
            let inv = Gf256(a).inverse().unwrap();
            assert_eq!(Gf256(a) * inv, Gf256::ONE);
        }
        assert!(matches!(Gf256::ZERO.inverse(), Err(Error::ZeroInverse)));
        assert!((Gf256(7) / Gf256::ZERO).is_err());
    }

    #[test]
    fn add_scaled_matches_scalar_ops() {
        let src: Vec<Gf256> = (0..=255u8).map(Gf256).collect();
        let mut dst: Vec<Gf256> = (0..=255u8).rev().map(Gf256).collect();
        let before = dst.clone();
        add_scaled(&mut dst, &src, Gf256(0x1f));
        for i in 0..256 {
            assert_eq!(dst[i], before[i] + Gf256(0x1f) * src[i]);
        }
    }
}
