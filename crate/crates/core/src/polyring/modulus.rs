use serde::{Deserialize, Serialize};

use super::PolyError;

/// The coefficient ring `Z/p^e`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawModulus", into = "RawModulus")]
pub struct Modulus {
    p: u64,
    e: u32,
    pe: u64,
}

#[derive(Serialize, Deserialize)]
struct RawModulus {
    p: u64,
    e: u32,
}

impl TryFrom<RawModulus> for Modulus {
    type Error = PolyError;
    fn try_from(raw: RawModulus) -> Result<Self, PolyError> {
        Modulus::new(raw.p, raw.e)
    }
}

impl From<Modulus> for RawModulus {
    fn from(m: Modulus) -> Self {
        RawModulus { p: m.p, e: m.e }
    }
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

const MAX_PRIME: u64 = 1 << 31;
const MAX_ORDER: u64 = 1 << 62;

impl Modulus {
    pub fn new(p: u64, e: u32) -> Result<Self, PolyError> {
        if p > MAX_PRIME || !is_prime(p) {
            return Err(PolyError::NotPrime(p));
        }
        if e == 0 {
            return Err(PolyError::Precision { p, e });
        }
        let mut pe: u64 = 1;
        for _ in 0..e {
            pe = match pe.checked_mul(p) {
                Some(v) if v <= MAX_ORDER => v,
                _ => return Err(PolyError::Precision { p, e }),
            };
        }
        Ok(Modulus { p, e, pe })
    }

    /// The prime field `F_p`.
    pub fn field(p: u64) -> Result<Self, PolyError> {
        Self::new(p, 1)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    /// Number of elements, `p^e`.
    pub fn order(&self) -> u64 {
        self.pe
    }

    pub fn is_field(&self) -> bool {
        self.e == 1
    }

    /// The same prime with a different precision.
    pub fn with_precision(&self, e: u32) -> Result<Self, PolyError> {
        Self::new(self.p, e)
    }

    #[inline]
    pub fn reduce(&self, v: u64) -> u64 {
        v % self.pe
    }

    #[inline]
    pub fn reduce_i64(&self, v: i64) -> u64 {
        v.rem_euclid(self.pe as i64) as u64
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.pe {
            s - self.pe
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.pe - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.pe - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.pe as u128) as u64
    }

    pub fn pow(&self, mut a: u64, mut k: u64) -> u64 {
        let mut r = 1 % self.pe;
        a %= self.pe;
        while k > 0 {
            if k & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            k >>= 1;
        }
        r
    }

    /// Multiplicative inverse, if `a` is a unit.
    pub fn inv(&self, a: u64) -> Option<u64> {
        if a.is_multiple_of(self.p) {
            return None;
        }
        // Euler: the unit group has order p^{e-1}(p-1).
        let phi = self.pe / self.p * (self.p - 1);
        Some(self.pow(a, phi - 1))
    }

    /// Reduce a decimal digit string without overflowing.
    pub fn reduce_decimal(&self, digits: &str) -> u64 {
        digits.bytes().fold(0u64, |acc, b| self.add(self.mul(acc, 10 % self.pe), (b - b'0') as u64 % self.pe))
    }

    /// p-adic valuation of a residue, `e` for zero.
    pub fn valuation(&self, mut a: u64) -> u32 {
        if a == 0 {
            return self.e;
        }
        let mut v = 0;
        while a.is_multiple_of(self.p) {
            a /= self.p;
            v += 1;
        }
        v
    }
}
