//! Multivariate gcd over F_p: cheap structural shortcuts first, then a
//! dense modular interpolation, and a recursive subresultant PRS in one main
//! variable as the fallback.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::extfield::{gcd_degree_bound, ExtField};
use super::modgcd::modular_gcd;
use super::{Monomial, PolyError, Polynomial, PrimeModulus};

/// Monic greatest common divisor; gcd(0, 0) = 0.
pub fn poly_gcd(a: &Polynomial, b: &Polynomial) -> Result<Polynomial, PolyError> {
    if a.modulus() != b.modulus() {
        return Err(PolyError::ModulusMismatch(a.modulus().get(), b.modulus().get()));
    }
    Ok(gcd(a, b))
}

pub(crate) fn gcd(a: &Polynomial, b: &Polynomial) -> Polynomial {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    let p = a.modulus();
    if a.is_constant() || b.is_constant() {
        return Polynomial::one(p);
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let g = ma.gcd(&mb);
    let (a, b) = (a.div_monomial(&ma), b.div_monomial(&mb));
    let strides = exponent_strides(&a, &b);
    let core = if strides.iter().any(|&s| s > 1) {
        let core = gcd_core(&rescale(&a, &strides, false), &rescale(&b, &strides, false));
        rescale(&core, &strides, true)
    } else {
        gcd_core(&a, &b)
    };
    core.mul_term(&g, 1).monic()
}

/// Per variable, the gcd of its exponents over both inputs (1 if absent).
/// Substituting x^k for x commutes with gcd, so common strides can be
/// divided out first.
fn exponent_strides(a: &Polynomial, b: &Polynomial) -> Vec<u32> {
    fn gcd_u32(mut x: u32, mut y: u32) -> u32 {
        while y != 0 {
            (x, y) = (y, x % y);
        }
        x
    }
    let width = a.width().max(b.width());
    let mut strides = vec![0u32; width];
    for (m, _) in a.terms().iter().chain(b.terms()) {
        for (s, &e) in strides.iter_mut().zip(m.exponents()) {
            *s = gcd_u32(*s, e);
        }
    }
    strides.iter().map(|&s| s.max(1)).collect()
}

/// Divide (or multiply, when `inflate`) each variable's exponents by its stride.
fn rescale(f: &Polynomial, strides: &[u32], inflate: bool) -> Polynomial {
    let terms = f
        .terms()
        .iter()
        .map(|(m, c)| {
            let exps: Vec<u32> = m
                .exponents()
                .iter()
                .zip(strides)
                .map(|(&e, &s)| if inflate { e * s } else { e / s })
                .collect();
            (Monomial::from_exponents(&exps), *c)
        })
        .collect();
    Polynomial::from_terms(f.modulus(), terms)
}

/// Fold gcd over a list, stopping early once it reaches 1.
pub(crate) fn gcd_many<'a, I: IntoIterator<Item = &'a Polynomial>>(
    modulus: PrimeModulus,
    items: I,
) -> Polynomial {
    let mut g = Polynomial::zero(modulus);
    for x in items {
        if x.is_zero() {
            continue;
        }
        g = gcd(&g, x);
        if g.is_one() {
            break;
        }
    }
    g
}

fn gcd_core(a: &Polynomial, b: &Polynomial) -> Polynomial {
    let p = a.modulus();
    if a.is_constant() || b.is_constant() {
        return Polynomial::one(p);
    }
    let va = a.vars();
    let vb = b.vars();
    if va.is_disjoint(&vb) {
        return Polynomial::one(p);
    }
    if let Some(&x) = va.difference(&vb).next() {
        return gcd(&content_in(a, x), b);
    }
    if let Some(&x) = vb.difference(&va).next() {
        return gcd(a, &content_in(b, x));
    }
    let bounds = if va.len() > 1 {
        match evaluation_probe(a, b, &va) {
            Probe::Coprime => return Polynomial::one(p),
            Probe::FreeOf(x) => return gcd(&content_in(a, x), b),
            Probe::Bounds(bounds) => bounds,
        }
    } else {
        Vec::new()
    };
    let (small, big) = if a.total_degree() <= b.total_degree() {
        (a, b)
    } else {
        (b, a)
    };
    if small.divides(big) {
        return small.monic();
    }
    if va.len() == 1 {
        let x = *va.iter().next().unwrap();
        return univariate_gcd(a, b, x);
    }
    match modular_gcd(a, b, &bounds) {
        Some(g) => g.monic(),
        None => prs_gcd(a, b, &va),
    }
}

/// Content in the lowest-degree variable, then a subresultant PRS on the
/// primitive parts.
fn prs_gcd(a: &Polynomial, b: &Polynomial, vars: &std::collections::BTreeSet<usize>) -> Polynomial {
    let p = a.modulus();
    let x = *vars
        .iter()
        .min_by_key(|&&v| (a.degree_in(v).max(b.degree_in(v)), v))
        .unwrap();
    let ua = a.to_univariate(x);
    let ub = b.to_univariate(x);
    let ca = gcd_many(p, ua.iter());
    let cb = gcd_many(p, ub.iter());
    let c = gcd(&ca, &cb);
    let ua = div_coeffs(&ua, &ca);
    let ub = div_coeffs(&ub, &cb);
    let g = subresultant(ua, ub);
    let cg = gcd_many(p, g.iter());
    let g = div_coeffs(&g, &cg);
    Polynomial::from_univariate(p, x, &g).mul(&c).monic()
}

enum Probe {
    Coprime,
    FreeOf(usize),
    /// (variable, upper bound on the gcd's degree in it).
    Bounds(Vec<(usize, usize)>),
}

/// Per-variable degree bounds on the gcd from evaluations over GF(p^k). A
/// bound of 0 is exact information: the gcd does not involve that variable.
fn evaluation_probe(a: &Polynomial, b: &Polynomial, vars: &std::collections::BTreeSet<usize>) -> Probe {
    let width = a.width().max(b.width());
    let seed = (a.num_terms() as u64) << 32 ^ b.num_terms() as u64 ^ (width as u64) << 48;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bounds = Vec::with_capacity(vars.len());
    for &x in vars {
        let bound = (0..3)
            .find_map(|_| gcd_degree_bound(a, b, x, width, &mut rng))
            .unwrap_or_else(|| a.degree_in(x).min(b.degree_in(x)) as usize);
        bounds.push((x, bound));
    }
    if bounds.iter().all(|&(_, d)| d == 0) {
        return Probe::Coprime;
    }
    match bounds.iter().find(|&&(_, d)| d == 0) {
        Some(&(x, _)) => Probe::FreeOf(x),
        None => Probe::Bounds(bounds),
    }
}

/// Whether the polynomials certainly share no nonconstant factor, decided by
/// evaluation probes; false means "unknown or shared".
pub(crate) fn certainly_coprime(polys: &[&Polynomial]) -> bool {
    let Some(first) = polys.first() else {
        return true;
    };
    if polys.iter().any(|f| f.is_constant()) {
        return true;
    }
    let mut common = first.vars();
    for f in &polys[1..] {
        let v = f.vars();
        common.retain(|x| v.contains(x));
        if common.is_empty() {
            return true;
        }
    }
    let width = polys.iter().map(|f| f.width()).max().unwrap_or(0);
    let field = ExtField::for_prime(first.modulus());
    let mut rng = ChaCha8Rng::seed_from_u64(polys.len() as u64 ^ (width as u64) << 40);
    let mut pending: Vec<usize> = common.into_iter().collect();
    for _ in 0..3 {
        let point: Vec<_> = (0..width).map(|_| field.random(&mut rng)).collect();
        let images: Vec<Vec<Vec<_>>> = polys.iter().map(|f| field.images(f, &pending, &point)).collect();
        let mut still = Vec::new();
        for (slot, &x) in pending.iter().enumerate() {
            // A leading coefficient must survive for the bound to be valid.
            let lead_ok = images
                .iter()
                .any(|im| im[slot].last().is_some_and(|c| c.iter().any(|&t| t != 0)));
            let mut trivial = false;
            if lead_ok {
                let mut g = images[0][slot].clone();
                for im in &images[1..] {
                    g = field.gcd_poly(g, im[slot].clone());
                    if g.len() <= 1 {
                        break;
                    }
                }
                trivial = g.len() <= 1;
            }
            if !trivial {
                still.push(x);
            }
        }
        pending = still;
        if pending.is_empty() {
            return true;
        }
    }
    false
}

fn content_in(a: &Polynomial, x: usize) -> Polynomial {
    let coeffs = a.to_univariate(x);
    gcd_many(a.modulus(), coeffs.iter())
}

pub(super) fn div_coeffs(v: &[Polynomial], d: &Polynomial) -> Vec<Polynomial> {
    if d.is_one() {
        return v.to_vec();
    }
    v.iter()
        .map(|c| c.div_exact(d).expect("content divides every coefficient"))
        .collect()
}

fn degree(v: &[Polynomial]) -> Option<usize> {
    v.iter().rposition(|c| !c.is_zero())
}

fn trim(v: &mut Vec<Polynomial>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

/// Pseudo-remainder lc(B)^(deg A - deg B + 1) * A mod B.
fn prem(a: &[Polynomial], b: &[Polynomial]) -> Vec<Polynomial> {
    let n = degree(b).expect("nonzero divisor");
    let lcb = &b[n];
    let mut r = a.to_vec();
    trim(&mut r);
    let mut e = (degree(&r).unwrap_or(0) + 1).saturating_sub(n) as u32;
    while let Some(dr) = degree(&r) {
        if dr < n {
            break;
        }
        let lead = r[dr].clone();
        let shift = dr - n;
        for c in r.iter_mut() {
            *c = c.mul(lcb);
        }
        for (i, bc) in b.iter().enumerate() {
            if !bc.is_zero() {
                r[i + shift] = r[i + shift].sub(&lead.mul(bc));
            }
        }
        trim(&mut r);
        e = e.saturating_sub(1);
    }
    if e > 0 && !r.is_empty() {
        let s = lcb.pow(e);
        for c in r.iter_mut() {
            *c = c.mul(&s);
        }
    }
    r
}

/// Last nonzero subresultant of two primitive univariate polynomials.
fn subresultant(mut a: Vec<Polynomial>, mut b: Vec<Polynomial>) -> Vec<Polynomial> {
    trim(&mut a);
    trim(&mut b);
    if degree(&a) < degree(&b) {
        std::mem::swap(&mut a, &mut b);
    }
    let p = a[0].modulus();
    let mut g = Polynomial::one(p);
    let mut h = Polynomial::one(p);
    loop {
        let da = degree(&a).unwrap();
        let db = degree(&b).unwrap();
        if db == 0 {
            return vec![Polynomial::one(p)];
        }
        let d = (da - db) as u32;
        let r = prem(&a, &b);
        if r.is_empty() {
            return b;
        }
        if degree(&r) == Some(0) {
            return vec![Polynomial::one(p)];
        }
        let divisor = g.mul(&h.pow(d));
        a = b;
        b = div_coeffs(&r, &divisor);
        g = a[degree(&a).unwrap()].clone();
        h = if d == 0 {
            h
        } else {
            g.pow(d)
                .div_exact(&h.pow(d - 1))
                .expect("subresultant h update is exact")
        };
    }
}

fn univariate_gcd(a: &Polynomial, b: &Polynomial, x: usize) -> Polynomial {
    let p = a.modulus();
    let dense = |f: &Polynomial| -> Vec<u32> {
        let mut v = vec![0u32; f.degree_in(x) as usize + 1];
        for (m, c) in f.terms() {
            v[m.exponent(x) as usize] = *c;
        }
        v
    };
    let mut r0 = dense(a);
    let mut r1 = dense(b);
    while r1.iter().any(|&c| c != 0) {
        let r = dense_rem(p, &r0, &r1);
        r0 = r1;
        r1 = r;
    }
    let coeffs: Vec<Polynomial> = r0.iter().map(|&c| Polynomial::constant(p, c)).collect();
    Polynomial::from_univariate(p, x, &coeffs).monic()
}

pub(crate) fn dense_rem(p: PrimeModulus, a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut r = a.to_vec();
    let db = b.iter().rposition(|&c| c != 0).unwrap();
    let inv = p.inv(b[db]);
    while let Some(dr) = r.iter().rposition(|&c| c != 0) {
        if dr < db {
            break;
        }
        let q = p.mul(r[dr], inv);
        let shift = dr - db;
        for (i, &bc) in b[..=db].iter().enumerate() {
            r[i + shift] = p.sub(r[i + shift], p.mul(q, bc));
        }
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}
