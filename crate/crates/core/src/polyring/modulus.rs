use std::fmt;

use super::PolyError;

/// A prime p < 2^16, the characteristic of every field in this crate.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimeModulus(u32);

impl PrimeModulus {
    pub const MAX: u32 = 1 << 16;

    pub fn new(p: u32) -> Result<Self, PolyError> {
        if !(2..Self::MAX).contains(&p) || !is_prime(p) {
            return Err(PolyError::NonPrimeModulus(p));
        }
        Ok(PrimeModulus(p))
    }

    #[inline]
    pub fn get(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn add(self, a: u32, b: u32) -> u32 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    #[inline]
    pub fn neg(self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.0 - a
        }
    }

    #[inline]
    pub fn mul(self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.0 as u64) as u32
    }

    pub fn pow(self, mut a: u32, mut e: u64) -> u32 {
        let mut r = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    /// Inverse of a nonzero residue (Fermat).
    pub fn inv(self, a: u32) -> u32 {
        debug_assert!(!a.is_multiple_of(self.0), "inverse of zero residue");
        self.pow(a, (self.0 - 2) as u64)
    }

    /// Reduce a signed integer literal into [0, p).
    pub fn reduce(self, v: i64) -> u32 {
        v.rem_euclid(self.0 as i64) as u32
    }
}

impl fmt::Debug for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.0)
    }
}

impl fmt::Display for PrimeModulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accepts_primes_rejects_composites() {
        for p in [2, 3, 5, 7, 65521] {
            assert!(PrimeModulus::new(p).is_ok(), "{p}");
        }
        for n in [0, 1, 4, 9, 65535, 1 << 16, 70001] {
            assert!(PrimeModulus::new(n).is_err(), "{n}");
        }
    }

    #[test]
    fn inverse_roundtrip() {
        let p = PrimeModulus::new(7).unwrap();
        for a in 1..7 {
            assert_eq!(p.mul(a, p.inv(a)), 1);
        }
    }
}
