//! Arithmetic in GF(p^k) for p^k ≥ 2^24, used to evaluate polynomials at
//! random points (gcd degree bounds, sampled ranks).

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use rand::Rng;

use super::gcd::dense_rem;
use super::{Polynomial, PrimeModulus};

pub(crate) const MAX_DEGREE: usize = 24;

pub(crate) type Elem = [u32; MAX_DEGREE];

pub(crate) struct ExtField {
    p: PrimeModulus,
    k: usize,
    /// Monic irreducible modulus, low degree first, length k + 1.
    modulus_poly: Vec<u32>,
}

pub(crate) const ZERO: Elem = [0; MAX_DEGREE];

impl ExtField {
    /// The cached field for this prime.
    pub(crate) fn for_prime(p: PrimeModulus) -> &'static ExtField {
        static FIELDS: OnceLock<Mutex<HashMap<u32, &'static ExtField>>> = OnceLock::new();
        let map = FIELDS.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = map.lock().unwrap_or_else(|e| e.into_inner());
        guard
            .entry(p.get())
            .or_insert_with(|| Box::leak(Box::new(ExtField::build(p))))
    }

    fn build(p: PrimeModulus) -> ExtField {
        let mut k = 1;
        while (p.get() as u64).pow(k as u32) < 1 << 24 {
            k += 1;
        }
        let modulus_poly = find_irreducible(p, k);
        ExtField { p, k, modulus_poly }
    }

    pub(crate) fn one(&self) -> Elem {
        let mut e = ZERO;
        e[0] = 1;
        e
    }

    pub(crate) fn constant(&self, c: u32) -> Elem {
        let mut e = ZERO;
        e[0] = c;
        e
    }

    pub(crate) fn add(&self, a: &Elem, b: &Elem) -> Elem {
        let mut out = ZERO;
        for i in 0..self.k {
            out[i] = self.p.add(a[i], b[i]);
        }
        out
    }

    pub(crate) fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        let mut out = ZERO;
        for i in 0..self.k {
            out[i] = self.p.sub(a[i], b[i]);
        }
        out
    }

    pub(crate) fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        // Entries are < 2^16, so up to 2^30 products fit before reducing.
        let k = self.k;
        let q = self.p.get() as u64;
        let mut wide = [0u64; 2 * MAX_DEGREE];
        for i in 0..k {
            if a[i] == 0 {
                continue;
            }
            let ai = a[i] as u64;
            for j in 0..k {
                wide[i + j] += ai * b[j] as u64;
            }
        }
        for d in (k..2 * k - 1).rev() {
            let c = wide[d] % q;
            if c == 0 {
                continue;
            }
            // Subtract c·x^{d-k}·f by adding c·(q − f_i), keeping values nonnegative.
            for (i, &m) in self.modulus_poly[..k].iter().enumerate() {
                wide[d - k + i] += c * (q - m as u64);
            }
        }
        let mut out = ZERO;
        for i in 0..k {
            out[i] = (wide[i] % q) as u32;
        }
        out
    }

    /// Inverse by the extended Euclidean algorithm on F_p[z]; a must be nonzero.
    pub(crate) fn inv(&self, a: &Elem) -> Elem {
        let p = self.p;
        let strip = |mut v: Vec<u32>| {
            while v.last() == Some(&0) {
                v.pop();
            }
            v
        };
        // Invariant: s_i · a ≡ r_i (mod f).
        let (mut r0, mut r1) = (self.modulus_poly.clone(), strip(a[..self.k].to_vec()));
        let (mut s0, mut s1): (Vec<u32>, Vec<u32>) = (Vec::new(), vec![1]);
        while r1.len() > 1 {
            let inv_lead = p.inv(*r1.last().unwrap());
            let mut q = vec![0u32; r0.len() - r1.len() + 1];
            let mut r = r0.clone();
            while r.len() >= r1.len() {
                let c = p.mul(*r.last().unwrap(), inv_lead);
                let shift = r.len() - r1.len();
                q[shift] = c;
                for (i, &b) in r1.iter().enumerate() {
                    r[i + shift] = p.sub(r[i + shift], p.mul(c, b));
                }
                r = strip(r);
            }
            let mut s = s0.clone();
            s.resize(s.len().max(q.len() + s1.len()), 0);
            for (i, &qi) in q.iter().enumerate() {
                for (j, &sj) in s1.iter().enumerate() {
                    s[i + j] = p.sub(s[i + j], p.mul(qi, sj));
                }
            }
            (r0, r1) = (r1, r);
            (s0, s1) = (s1, strip(s));
        }
        let c = p.inv(r1[0]);
        let mut out = ZERO;
        for (i, &x) in s1.iter().enumerate() {
            out[i] = p.mul(x, c);
        }
        out
    }

    pub(crate) fn random<R: Rng>(&self, rng: &mut R) -> Elem {
        let mut e = ZERO;
        for c in e.iter_mut().take(self.k) {
            *c = rng.gen_range(0..self.p.get());
        }
        e
    }

    /// For each variable x in `vars`: coefficients in x of f with every other
    /// variable substituted from `point`, lowest degree first.
    pub(crate) fn images(&self, f: &Polynomial, vars: &[usize], point: &[Elem]) -> Vec<Vec<Elem>> {
        let mut out: Vec<Vec<Elem>> = vars
            .iter()
            .map(|&x| vec![ZERO; f.degree_in(x) as usize + 1])
            .collect();
        let mut powers: Vec<Vec<Elem>> = vec![vec![self.one()]; point.len()];
        let mut factors: Vec<(usize, Elem)> = Vec::new();
        let mut prefix: Vec<Elem> = Vec::new();
        for (m, c) in f.terms() {
            factors.clear();
            for (v, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let table = &mut powers[v];
                while table.len() <= e as usize {
                    let next = self.mul(table.last().unwrap(), &point[v]);
                    table.push(next);
                }
                factors.push((v, table[e as usize]));
            }
            prefix.clear();
            prefix.push(self.constant(*c));
            for (_, val) in &factors {
                let next = self.mul(prefix.last().unwrap(), val);
                prefix.push(next);
            }
            let full = *prefix.last().unwrap();
            let mut suffix = self.one();
            let mut without: Vec<(usize, Elem)> = Vec::with_capacity(factors.len());
            for (j, (v, val)) in factors.iter().enumerate().rev() {
                without.push((*v, self.mul(&prefix[j], &suffix)));
                suffix = self.mul(&suffix, val);
            }
            for (slot, &x) in out.iter_mut().zip(vars) {
                let e = m.exponent(x) as usize;
                let val = if e == 0 {
                    full
                } else {
                    without.iter().find(|(v, _)| *v == x).unwrap().1
                };
                slot[e] = self.add(&slot[e], &val);
            }
        }
        out
    }

    /// Coefficients in `x` of f with every other variable substituted from
    /// `point`, lowest degree first.
    pub(crate) fn eval_except(&self, f: &Polynomial, x: usize, point: &[Elem]) -> Vec<Elem> {
        let mut out = vec![ZERO; f.degree_in(x) as usize + 1];
        let mut powers: Vec<Vec<Elem>> = vec![vec![self.one()]; point.len()];
        for (m, c) in f.terms() {
            let mut term = self.constant(*c);
            for (v, &e) in m.exponents().iter().enumerate() {
                if v == x || e == 0 {
                    continue;
                }
                let table = &mut powers[v];
                while table.len() <= e as usize {
                    let next = self.mul(table.last().unwrap(), &point[v]);
                    table.push(next);
                }
                term = self.mul(&term, &table[e as usize]);
            }
            let d = m.exponent(x) as usize;
            out[d] = self.add(&out[d], &term);
        }
        out
    }

    /// Degree of gcd of two dense univariate polynomials, lowest degree first.
    pub(crate) fn gcd_degree(&self, a: Vec<Elem>, b: Vec<Elem>) -> usize {
        self.gcd_poly(a, b).len().saturating_sub(1)
    }

    /// A (non-normalized) gcd of dense univariate polynomials.
    pub(crate) fn gcd_poly(&self, mut a: Vec<Elem>, mut b: Vec<Elem>) -> Vec<Elem> {
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = self.rem(&a, &b);
            a = b;
            b = r;
        }
        a
    }

    fn rem(&self, a: &[Elem], b: &[Elem]) -> Vec<Elem> {
        let mut r = a.to_vec();
        let db = b.len() - 1;
        let inv = self.inv(&b[db]);
        while r.len() > db {
            let dr = r.len() - 1;
            let q = self.mul(&r[dr], &inv);
            let shift = dr - db;
            for (i, bc) in b.iter().enumerate() {
                r[i + shift] = self.sub(&r[i + shift], &self.mul(&q, bc));
            }
            trim(&mut r);
        }
        r
    }
}

/// Evaluates many polynomials at one point, sharing power tables.
pub(crate) struct PointEvaluator<'a> {
    field: &'a ExtField,
    point: Vec<Elem>,
    powers: Vec<Vec<Elem>>,
}

impl<'a> PointEvaluator<'a> {
    pub(crate) fn new(field: &'a ExtField, point: Vec<Elem>) -> Self {
        let powers = vec![vec![field.one()]; point.len()];
        PointEvaluator { field, point, powers }
    }

    pub(crate) fn field(&self) -> &'a ExtField {
        self.field
    }

    pub(crate) fn eval(&mut self, f: &Polynomial) -> Elem {
        let field = self.field;
        let mut acc = ZERO;
        for (m, c) in f.terms() {
            let mut term = field.constant(*c);
            for (v, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let table = &mut self.powers[v];
                while table.len() <= e as usize {
                    let next = field.mul(table.last().unwrap(), &self.point[v]);
                    table.push(next);
                }
                term = field.mul(&term, &table[e as usize]);
            }
            acc = field.add(&acc, &term);
        }
        acc
    }
}

fn trim(v: &mut Vec<Elem>) {
    while v.last().is_some_and(|c| c.iter().all(|&x| x == 0)) {
        v.pop();
    }
}

/// Deterministic search for a monic irreducible of degree k over F_p (Rabin's test).
fn find_irreducible(p: PrimeModulus, k: usize) -> Vec<u32> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x5eed_0000 ^ p.get() as u64);
    loop {
        let mut f: Vec<u32> = (0..k).map(|_| rng.gen_range(0..p.get())).collect();
        f.push(1);
        if f[0] != 0 && is_irreducible(p, &f) {
            return f;
        }
    }
}

fn poly_mulmod(p: PrimeModulus, a: &[u32], b: &[u32], f: &[u32]) -> Vec<u32> {
    let mut prod = vec![0u32; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = p.add(prod[i + j], p.mul(x, y));
        }
    }
    dense_rem(p, &prod, f)
}

fn poly_powmod(p: PrimeModulus, a: &[u32], mut e: u64, f: &[u32]) -> Vec<u32> {
    let mut base = a.to_vec();
    let mut acc = vec![1u32];
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(p, &acc, &base, f);
        }
        base = poly_mulmod(p, &base, &base, f);
        e >>= 1;
    }
    acc
}

fn is_irreducible(p: PrimeModulus, f: &[u32]) -> bool {
    let k = f.len() - 1;
    let x = vec![0, 1];
    // frob[i] = x^{p^i} mod f
    let mut frob = vec![dense_rem(p, &x, f)];
    for _ in 0..k {
        let next = poly_powmod(p, frob.last().unwrap(), p.get() as u64, f);
        frob.push(next);
    }
    let minus_x = |g: &[u32]| -> Vec<u32> {
        let mut h = g.to_vec();
        h.resize(h.len().max(2), 0);
        h[1] = p.sub(h[1], 1);
        while h.last() == Some(&0) {
            h.pop();
        }
        h
    };
    if !minus_x(&frob[k]).is_empty() {
        return false;
    }
    let mut n = k;
    let mut r = 2;
    let mut prime_factors = Vec::new();
    while n > 1 {
        if n.is_multiple_of(r) {
            prime_factors.push(r);
            while n.is_multiple_of(r) {
                n /= r;
            }
        }
        r += 1;
    }
    prime_factors.into_iter().all(|r| {
        let h = minus_x(&frob[k / r]);
        if h.is_empty() {
            return false;
        }
        let (mut a, mut b) = (f.to_vec(), h);
        while !b.is_empty() {
            let rem = dense_rem(p, &a, &b);
            a = b;
            b = rem;
        }
        a.len() == 1
    })
}

/// Upper bound on deg_x gcd(a, b) from one evaluation of the other variables,
/// or None when both leading coefficients in x vanish at the point.
pub(crate) fn gcd_degree_bound<R: Rng>(
    a: &Polynomial,
    b: &Polynomial,
    x: usize,
    width: usize,
    rng: &mut R,
) -> Option<usize> {
    let field = ExtField::for_prime(a.modulus());
    let point: Vec<Elem> = (0..width).map(|_| field.random(rng)).collect();
    let ea = field.eval_except(a, x, &point);
    let eb = field.eval_except(b, x, &point);
    let nonzero = |v: &[Elem]| v.last().is_some_and(|c| c.iter().any(|&t| t != 0));
    if !nonzero(&ea) && !nonzero(&eb) {
        return None;
    }
    Some(field.gcd_degree(ea, eb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn field_axioms_spot_checks() {
        for p in [2u32, 3, 5, 65521] {
            let m = PrimeModulus::new(p).unwrap();
            let f = ExtField::for_prime(m);
            assert!((p as u64).pow(f.k as u32) >= 1 << 24);
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(p as u64);
            for _ in 0..20 {
                let a = f.random(&mut rng);
                let b = f.random(&mut rng);
                let c = f.random(&mut rng);
                assert_eq!(f.mul(&a, &f.add(&b, &c)), f.add(&f.mul(&a, &b), &f.mul(&a, &c)));
                if a != ZERO {
                    assert_eq!(f.mul(&a, &f.inv(&a)), f.one());
                }
            }
        }
    }
}
