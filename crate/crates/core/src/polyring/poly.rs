use std::collections::BTreeSet;
use std::fmt;

use super::{Monomial, PolyError, PrimeModulus};

/// Sparse polynomial over F_p. Terms are kept sorted by descending monomial
/// (graded-lex) with nonzero coefficients, so derived equality and hashing are
/// structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    modulus: PrimeModulus,
    terms: Vec<(Monomial, u32)>,
}

impl Polynomial {
    pub fn zero(modulus: PrimeModulus) -> Self {
        Polynomial {
            modulus,
            terms: Vec::new(),
        }
    }

    pub fn one(modulus: PrimeModulus) -> Self {
        Self::constant(modulus, 1)
    }

    pub fn constant(modulus: PrimeModulus, c: u32) -> Self {
        let c = c % modulus.get();
        if c == 0 {
            return Self::zero(modulus);
        }
        Polynomial {
            modulus,
            terms: vec![(Monomial::one(), c)],
        }
    }

    pub fn var(modulus: PrimeModulus, id: usize) -> Self {
        Self::term(modulus, Monomial::var(id), 1)
    }

    pub fn term(modulus: PrimeModulus, m: Monomial, c: u32) -> Self {
        let c = c % modulus.get();
        if c == 0 {
            return Self::zero(modulus);
        }
        Polynomial {
            modulus,
            terms: vec![(m, c)],
        }
    }

    /// Build from arbitrary (monomial, coefficient) pairs; duplicates are summed.
    pub fn from_terms(modulus: PrimeModulus, mut terms: Vec<(Monomial, u32)>) -> Self {
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        let mut out: Vec<(Monomial, u32)> = Vec::with_capacity(terms.len());
        for (m, c) in terms {
            let c = c % modulus.get();
            match out.last_mut() {
                Some((lm, lc)) if *lm == m => *lc = modulus.add(*lc, c),
                _ => out.push((m, c)),
            }
        }
        out.retain(|(_, c)| *c != 0);
        Polynomial { modulus, terms: out }
    }

    /// Caller guarantees terms are strictly descending with nonzero coefficients.
    fn from_sorted(modulus: PrimeModulus, terms: Vec<(Monomial, u32)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 > w[1].0));
        debug_assert!(terms.iter().all(|(_, c)| *c != 0));
        Polynomial { modulus, terms }
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1 == 1
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    /// Value of a constant polynomial (0 for zero), `None` otherwise.
    pub fn constant_value(&self) -> Option<u32> {
        match self.terms.as_slice() {
            [] => Some(0),
            [(m, c)] if m.is_one() => Some(*c),
            _ => None,
        }
    }

    pub fn terms(&self) -> &[(Monomial, u32)] {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn leading_term(&self) -> Option<&(Monomial, u32)> {
        self.terms.first()
    }

    /// Leading coefficient; 0 for the zero polynomial.
    pub fn leading_coeff(&self) -> u32 {
        self.terms.first().map_or(0, |t| t.1)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map_or(0, |t| t.0.degree())
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.iter().map(|(m, _)| m.exponent(var)).max().unwrap_or(0)
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        let mut s = BTreeSet::new();
        for (m, _) in &self.terms {
            s.extend(m.vars());
        }
        s
    }

    /// One past the highest variable id occurring.
    pub fn width(&self) -> usize {
        self.terms.iter().map(|(m, _)| m.width()).max().unwrap_or(0)
    }

    fn check(&self, other: &Polynomial) {
        assert_eq!(
            self.modulus, other.modulus,
            "polynomials over different prime fields"
        );
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial, PolyError> {
        if self.modulus != other.modulus {
            return Err(PolyError::ModulusMismatch(
                self.modulus.get(),
                other.modulus.get(),
            ));
        }
        Ok(self.add(other))
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        self.check(other);
        self.merge(other, 1)
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.check(other);
        self.merge(other, self.modulus.neg(1))
    }

    /// self + k * other.
    fn merge(&self, other: &Polynomial, k: u32) -> Polynomial {
        let p = self.modulus;
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    out.push((b[j].0.clone(), p.mul(k, b[j].1)));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = p.add(a[i].1, p.mul(k, b[j].1));
                    if c != 0 {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| (m.clone(), p.mul(k, *c))));
        Polynomial::from_sorted(p, out)
    }

    pub fn neg(&self) -> Polynomial {
        let p = self.modulus;
        Polynomial::from_sorted(
            p,
            self.terms.iter().map(|(m, c)| (m.clone(), p.neg(*c))).collect(),
        )
    }

    pub fn scale(&self, c: u32) -> Polynomial {
        let p = self.modulus;
        let c = c % p.get();
        if c == 0 {
            return Polynomial::zero(p);
        }
        Polynomial::from_sorted(
            p,
            self.terms
                .iter()
                .map(|(m, a)| (m.clone(), p.mul(*a, c)))
                .collect(),
        )
    }

    pub fn mul_term(&self, m: &Monomial, c: u32) -> Polynomial {
        let p = self.modulus;
        let c = c % p.get();
        if c == 0 {
            return Polynomial::zero(p);
        }
        // Multiplication by a monomial preserves the term order.
        Polynomial::from_sorted(
            p,
            self.terms.iter().map(|(a, x)| (a.mul(m), p.mul(*x, c))).collect(),
        )
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        self.check(other);
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero(self.modulus);
        }
        if let Some(c) = self.constant_value() {
            return other.scale(c);
        }
        if let Some(c) = other.constant_value() {
            return self.scale(c);
        }
        let (small, big) = if self.terms.len() <= other.terms.len() {
            (self, other)
        } else {
            (other, self)
        };
        if small.terms.len() == 1 {
            return big.mul_term(&small.terms[0].0, small.terms[0].1);
        }
        let p = self.modulus;
        let mut prods = Vec::with_capacity(small.terms.len() * big.terms.len());
        for (ma, ca) in &small.terms {
            for (mb, cb) in &big.terms {
                prods.push((ma.mul(mb), p.mul(*ca, *cb)));
            }
        }
        Polynomial::from_terms(p, prods)
    }

    pub fn pow(&self, mut k: u32) -> Polynomial {
        let mut base = self.clone();
        let mut acc = Polynomial::one(self.modulus);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Polynomial) -> Option<Polynomial> {
        self.check(d);
        assert!(!d.is_zero(), "division by the zero polynomial");
        if self.is_zero() {
            return Some(Polynomial::zero(self.modulus));
        }
        let p = self.modulus;
        if let Some(c) = d.constant_value() {
            return Some(self.scale(p.inv(c)));
        }
        let (dm, dc) = d.terms[0].clone();
        if self.total_degree() < d.total_degree() {
            return None;
        }
        let dc_inv = p.inv(dc);
        if d.terms.len() == 1 {
            let mut out = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                if !dm.divides(m) {
                    return None;
                }
                out.push((m.div(&dm), p.mul(*c, dc_inv)));
            }
            return Some(Polynomial::from_sorted(p, out));
        }
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((rm, rc)) = rem.terms.first().cloned() {
            if !dm.divides(&rm) {
                return None;
            }
            let qm = rm.div(&dm);
            let qc = p.mul(rc, dc_inv);
            rem = rem.merge(&d.mul_term(&qm, qc), p.neg(1));
            quot.push((qm, qc));
        }
        Some(Polynomial::from_sorted(p, quot))
    }

    pub fn divides(&self, other: &Polynomial) -> bool {
        other.div_exact(self).is_some()
    }

    /// Scale so the leading coefficient is 1 (zero stays zero).
    pub fn monic(&self) -> Polynomial {
        match self.terms.first() {
            None => self.clone(),
            Some((_, 1)) => self.clone(),
            Some((_, c)) => self.scale(self.modulus.inv(*c)),
        }
    }

    /// f^p: exponents multiplied by p, coefficients fixed.
    pub fn frobenius(&self) -> Polynomial {
        let p = self.modulus.get();
        Polynomial::from_sorted(
            self.modulus,
            self.terms.iter().map(|(m, c)| (m.pow(p), *c)).collect(),
        )
    }

    /// The g with g^p = self, if every exponent is divisible by p.
    pub fn pth_root(&self) -> Result<Polynomial, PolyError> {
        let p = self.modulus.get();
        let mut out = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            match m.pth_root(p) {
                Some(r) => out.push((r, *c)),
                None => {
                    return Err(PolyError::NotAPthPower {
                        exponents: m.exponents().to_vec(),
                    })
                }
            }
        }
        Ok(Polynomial::from_sorted(self.modulus, out))
    }

    /// Monomial gcd of all terms (1 for zero).
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else {
            return Monomial::one();
        };
        let mut g = first.clone();
        for (m, _) in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    /// Divide every term by a monomial that divides all of them.
    pub fn div_monomial(&self, m: &Monomial) -> Polynomial {
        if m.is_one() {
            return self.clone();
        }
        Polynomial::from_sorted(
            self.modulus,
            self.terms.iter().map(|(a, c)| (a.div(m), *c)).collect(),
        )
    }

    /// Coefficients as a polynomial in `var`: entry e holds the coefficient of var^e.
    pub fn to_univariate(&self, var: usize) -> Vec<Polynomial> {
        let deg = self.degree_in(var) as usize;
        let mut buckets: Vec<Vec<(Monomial, u32)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let (e, rest) = m.extract(var);
            buckets[e as usize].push((rest, *c));
        }
        buckets
            .into_iter()
            .map(|t| Polynomial::from_terms(self.modulus, t))
            .collect()
    }

    pub fn from_univariate(modulus: PrimeModulus, var: usize, coeffs: &[Polynomial]) -> Polynomial {
        let mut terms = Vec::new();
        for (e, c) in coeffs.iter().enumerate() {
            let xe = Monomial::var_pow(var, e as u32);
            for (m, a) in &c.terms {
                terms.push((m.mul(&xe), *a));
            }
        }
        Polynomial::from_terms(modulus, terms)
    }

    /// Render with `*` and `^`, e.g. `2*t^2*u + t + 1`.
    pub fn render<S: AsRef<str>>(&self, names: &[S]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut parts = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            let mut factors = Vec::new();
            if *c != 1 || m.is_one() {
                factors.push(c.to_string());
            }
            for (v, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let name = names
                    .get(v)
                    .map(|s| s.as_ref().to_string())
                    .unwrap_or_else(|| format!("x{v}"));
                if e == 1 {
                    factors.push(name);
                } else {
                    factors.push(format!("{name}^{e}"));
                }
            }
            parts.push(factors.join("*"));
        }
        parts.join(" + ")
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: [&str; 0] = [];
        write!(f, "{}", self.render(&names))
    }
}
