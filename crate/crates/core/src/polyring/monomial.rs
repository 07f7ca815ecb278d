use std::cmp::Ordering;

use smallvec::SmallVec;

/// Power product over variable ids. Dense exponent vector indexed by variable
/// creation order, with trailing zeros trimmed so equality is structural.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Monomial {
    exps: SmallVec<[u32; 6]>,
    degree: u32,
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn var(id: usize) -> Self {
        Self::var_pow(id, 1)
    }

    pub fn var_pow(id: usize, e: u32) -> Self {
        if e == 0 {
            return Self::one();
        }
        let mut exps = SmallVec::from_elem(0, id + 1);
        exps[id] = e;
        Monomial { exps, degree: e }
    }

    pub fn from_exponents(exps: &[u32]) -> Self {
        let mut v: SmallVec<[u32; 6]> = SmallVec::from_slice(exps);
        while v.last() == Some(&0) {
            v.pop();
        }
        let degree = v.iter().sum();
        Monomial { exps: v, degree }
    }

    #[inline]
    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    #[inline]
    pub fn degree(&self) -> u32 {
        self.degree
    }

    #[inline]
    pub fn exponent(&self, var: usize) -> u32 {
        self.exps.get(var).copied().unwrap_or(0)
    }

    /// Exponent vector (trailing zeros trimmed).
    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    /// Number of variable slots in use (one past the highest variable present).
    pub fn width(&self) -> usize {
        self.exps.len()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (long, short) = if self.exps.len() >= other.exps.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut exps = long.exps.clone();
        for (e, s) in exps.iter_mut().zip(short.exps.iter()) {
            *e += *s;
        }
        Monomial {
            exps,
            degree: self.degree + other.degree,
        }
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.exps.len() <= other.exps.len() && self.exps.iter().zip(other.exps.iter()).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self.divides(other)`.
    pub fn div(&self, divisor: &Monomial) -> Monomial {
        debug_assert!(divisor.divides(self));
        let mut exps = self.exps.clone();
        for (e, d) in exps.iter_mut().zip(divisor.exps.iter()) {
            *e -= *d;
        }
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial {
            exps,
            degree: self.degree - divisor.degree,
        }
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let n = self.exps.len().min(other.exps.len());
        let exps: SmallVec<[u32; 6]> = (0..n).map(|i| self.exps[i].min(other.exps[i])).collect();
        Monomial::from_exponents(&exps)
    }

    pub fn pow(&self, k: u32) -> Monomial {
        if k == 0 {
            return Monomial::one();
        }
        Monomial {
            exps: self.exps.iter().map(|e| e * k).collect(),
            degree: self.degree * k,
        }
    }

    /// Split into (residue class mod p, quotient) with `self = class * quotient^p`.
    pub fn split_mod(&self, p: u32) -> (Monomial, Monomial) {
        let class: SmallVec<[u32; 6]> = self.exps.iter().map(|e| e % p).collect();
        let quot: SmallVec<[u32; 6]> = self.exps.iter().map(|e| e / p).collect();
        (Monomial::from_exponents(&class), Monomial::from_exponents(&quot))
    }

    /// Exact p-th root when every exponent is divisible by p.
    pub fn pth_root(&self, p: u32) -> Option<Monomial> {
        if self.exps.iter().all(|e| e % p == 0) {
            Some(Monomial {
                exps: self.exps.iter().map(|e| e / p).collect(),
                degree: self.degree / p,
            })
        } else {
            None
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.exps
            .iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(i, _)| i)
    }

    /// Remove variable `var`, returning (exponent of var, rest).
    pub fn extract(&self, var: usize) -> (u32, Monomial) {
        let e = self.exponent(var);
        if e == 0 {
            return (0, self.clone());
        }
        let mut exps = self.exps.clone();
        exps[var] = 0;
        while exps.last() == Some(&0) {
            exps.pop();
        }
        (
            e,
            Monomial {
                exps,
                degree: self.degree - e,
            },
        )
    }
}

/// Graded lexicographic order: total degree first, then the exponent of the
/// lowest-indexed variable decides.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree.cmp(&other.degree) {
            Ordering::Equal => {}
            o => return o,
        }
        let n = self.exps.len().max(other.exps.len());
        for i in 0..n {
            let a = self.exponent(i);
            let b = other.exponent(i);
            match a.cmp(&b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grlex_order() {
        let t = Monomial::var(0);
        let u = Monomial::var(1);
        let t2 = Monomial::var_pow(0, 2);
        assert!(t > u);
        assert!(u.mul(&u) > t);
        assert!(t2 > t.mul(&u));
        assert!(Monomial::one() < u);
    }

    #[test]
    fn trimmed_equality() {
        let a = Monomial::from_exponents(&[1, 0, 0]);
        assert_eq!(a, Monomial::var(0));
        let t2u = Monomial::from_exponents(&[2, 1]);
        assert_eq!(t2u.div(&Monomial::var(1)), Monomial::var_pow(0, 2));
    }

    #[test]
    fn split_mod_reassembles() {
        let m = Monomial::from_exponents(&[5, 2, 3]);
        let (c, q) = m.split_mod(2);
        assert_eq!(c, Monomial::from_exponents(&[1, 0, 1]));
        assert_eq!(c.mul(&q.pow(2)), m);
    }
}
