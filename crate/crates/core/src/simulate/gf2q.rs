//! Arithmetic in `GF(2^q)` for `q ∈ {8, 16}`.
//!
//! Elements are `q`-bit words holding polynomial coefficients over GF(2).
//! Reduction uses `x^8+x^4+x^3+x^2+1` and `x^16+x^12+x^3+x+1`.

use std::ops::{Add, Mul};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gf2q {
    q: u32,
    modulus: u32,
}

impl Gf2q {
    pub fn new(q: u32) -> Result<Self> {
        let modulus = match q {
            8 => 0x11D,
            16 => 0x1100B,
            _ => return Err(Error::InvalidParameter(format!("field size 2^{q} unsupported; use q = 8 or 16"))),
        };
        Ok(Self { q, modulus })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn order(&self) -> u32 {
        1 << self.q
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        a ^ b
    }

    pub fn mul(&self, mut a: u32, mut b: u32) -> u32 {
        let top = 1 << self.q;
        let mut acc = 0;
        while b != 0 {
            if b & 1 != 0 {
                acc ^= a;
            }
            b >>= 1;
            a <<= 1;
            if a & top != 0 {
                a ^= self.modulus;
            }
        }
        acc
    }

    /// Square-and-multiply; `a^0 = 1` for every `a`, including 0.
    pub fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// `a^(2^q − 2)`; `None` for zero.
    pub fn inv(&self, a: u32) -> Option<u32> {
        if a == 0 {
            None
        } else {
            Some(self.pow(a, (self.order() - 2) as u64))
        }
    }

    pub fn element(&self, value: u32) -> Gf2qElement {
        Gf2qElement { field: *self, value: value & (self.order() - 1) }
    }

    /// `Σ_j coeffs[j] · z^j` by Horner's rule.
    pub fn eval_poly(&self, coeffs: &[u32], z: u32) -> u32 {
        coeffs.iter().rev().fold(0, |acc, c| self.mul(acc, z) ^ c)
    }
}

/// A field element bundled with its field.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Gf2qElement {
    field: Gf2q,
    value: u32,
}

impl Gf2qElement {
    pub fn value(&self) -> u32 {
        self.value
    }

    pub fn field(&self) -> Gf2q {
        self.field
    }

    pub fn pow(&self, e: u64) -> Self {
        self.field.element(self.field.pow(self.value, e))
    }

    pub fn inv(&self) -> Option<Self> {
        self.field.inv(self.value).map(|v| self.field.element(v))
    }
}

impl Add for Gf2qElement {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        assert_eq!(self.field, rhs.field, "elements of different fields");
        self.field.element(self.value ^ rhs.value)
    }
}

impl Mul for Gf2qElement {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        assert_eq!(self.field, rhs.field, "elements of different fields");
        self.field.element(self.field.mul(self.value, rhs.value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_products() {
        let f = Gf2q::new(8).unwrap();
        // x · x^7 = x^8 = x^4 + x^3 + x^2 + 1
        assert_eq!(f.mul(0x02, 0x80), 0x1D);
        assert_eq!(f.pow(0, 0), 1);
        assert_eq!(f.pow(5, 0), 1);
        assert!(Gf2q::new(12).is_err());
    }

    #[test]
    fn inverses_q8_exhaustive() {
        let f = Gf2q::new(8).unwrap();
        for a in 1..256 {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
        assert_eq!(f.inv(0), None);
    }

    #[test]
    fn generator_has_full_order_q16() {
        // x generates the multiplicative group iff its order is 2^16 − 1 = 3·5·17·257.
        let f = Gf2q::new(16).unwrap();
        for p in [3u64, 5, 17, 257] {
            assert_ne!(f.pow(2, 65535 / p), 1);
        }
        assert_eq!(f.pow(2, 65535), 1);
    }
}
