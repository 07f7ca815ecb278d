//! Dense modular gcd: images at a grid of points in GF(p^k) for every
//! variable but one, univariate gcds there, then interpolation back.
//!
//! Images are normalized to lc_x = γ(point), γ = gcd(lc_x a, lc_x b), so the
//! interpolant is (γ / lc_x g) · g for the true gcd g. Any failure (unlucky
//! points, a coefficient outside F_p, a candidate that does not divide) is
//! retried with fresh points and finally reported as None.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::extfield::{Elem, ExtField, ZERO};
use super::gcd::{div_coeffs, gcd, gcd_many};
use super::{Monomial, Polynomial};

/// Largest interpolation grid attempted.
const MAX_IMAGES: usize = 1 << 14;
const ATTEMPTS: usize = 4;

/// gcd of `a` and `b` given upper bounds on deg_v gcd for each variable v
/// they share. None when the grid is too large or every attempt failed.
pub(crate) fn modular_gcd(a: &Polynomial, b: &Polynomial, bounds: &[(usize, usize)]) -> Option<Polynomial> {
    let p = a.modulus();
    let &(x, bound_x) = bounds.iter().max_by_key(|&&(v, d)| (d, std::cmp::Reverse(v)))?;
    let ua = a.to_univariate(x);
    let ub = b.to_univariate(x);
    let ca = gcd_many(p, ua.iter());
    let cb = gcd_many(p, ub.iter());
    let content = gcd(&ca, &cb);
    let ua = div_coeffs(&ua, &ca);
    let ub = div_coeffs(&ub, &cb);
    let gamma = gcd(ua.last()?, ub.last()?);
    let pa = Polynomial::from_univariate(p, x, &ua);
    let pb = Polynomial::from_univariate(p, x, &ub);

    let others: Vec<(usize, usize)> = bounds
        .iter()
        .filter(|&&(v, _)| v != x)
        .map(|&(v, d)| (v, d + gamma.degree_in(v) as usize))
        .collect();
    let grid = others
        .iter()
        .try_fold(1usize, |acc, &(_, d)| acc.checked_mul(d + 1))
        .filter(|&n| n <= MAX_IMAGES)?;

    let field = ExtField::for_prime(p);
    let width = a.width().max(b.width());
    let seed = (pa.num_terms() as u64) << 32 ^ pb.num_terms() as u64 ^ (grid as u64) << 48;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dx = bound_x;
    for _ in 0..ATTEMPTS {
        let points: Vec<Vec<Elem>> = others
            .iter()
            .map(|&(_, d)| distinct_points(field, d + 1, &mut rng))
            .collect();
        let Some(images) = grid_images(field, &pa, &pb, &gamma, x, &others, &points, width, &mut dx) else {
            continue;
        };
        let Some(h) = interpolate(field, &images, &points, &others, x, dx, p) else {
            continue;
        };
        let hc = gcd_many(p, h.to_univariate(x).iter());
        let g = h.div_exact(&hc)?;
        if g.divides(&pa) && g.divides(&pb) {
            return Some(g.mul(&content));
        }
    }
    None
}

fn distinct_points(field: &ExtField, n: usize, rng: &mut ChaCha8Rng) -> Vec<Elem> {
    let mut out: Vec<Elem> = Vec::with_capacity(n);
    while out.len() < n {
        let z = field.random(rng);
        if !out.contains(&z) {
            out.push(z);
        }
    }
    out
}

/// γ-normalized univariate gcd images, last variable varying fastest.
/// Lowers `dx` and gives up when an image proves the bound too high.
#[allow(clippy::too_many_arguments)]
fn grid_images(
    field: &ExtField,
    a: &Polynomial,
    b: &Polynomial,
    gamma: &Polynomial,
    x: usize,
    others: &[(usize, usize)],
    points: &[Vec<Elem>],
    width: usize,
    dx: &mut usize,
) -> Option<Vec<Vec<Elem>>> {
    let grid: usize = others.iter().map(|&(_, d)| d + 1).product();
    let mut point = vec![ZERO; width];
    let mut images = Vec::with_capacity(grid);
    let nonzero = |e: &Elem| e.iter().any(|&c| c != 0);
    for idx in 0..grid {
        let mut r = idx;
        for (j, &(y, d)) in others.iter().enumerate().rev() {
            point[y] = points[j][r % (d + 1)];
            r /= d + 1;
        }
        let ea = field.eval_except(a, x, &point);
        let eb = field.eval_except(b, x, &point);
        if !ea.last().is_some_and(nonzero) || !eb.last().is_some_and(nonzero) {
            return None;
        }
        let g = field.gcd_poly(ea, eb);
        let dg = g.len() - 1;
        if dg < *dx {
            *dx = dg;
            return None;
        }
        if dg > *dx {
            return None;
        }
        let gv = field.eval_except(gamma, x, &point)[0];
        if !nonzero(&gv) {
            return None;
        }
        let scale = field.mul(&gv, &field.inv(&g[dg]));
        images.push(g.iter().map(|c| field.mul(c, &scale)).collect());
    }
    Some(images)
}

/// Tensor-product interpolation of each x-coefficient; None if a
/// coefficient falls outside F_p.
fn interpolate(
    field: &ExtField,
    images: &[Vec<Elem>],
    points: &[Vec<Elem>],
    others: &[(usize, usize)],
    x: usize,
    dx: usize,
    p: super::PrimeModulus,
) -> Option<Polynomial> {
    let dims: Vec<usize> = others.iter().map(|&(_, d)| d + 1).collect();
    let width = others.iter().map(|&(v, _)| v + 1).max().unwrap_or(0).max(x + 1);
    let inverses: Vec<Vec<Vec<Elem>>> = points.iter().map(|z| difference_inverses(field, z)).collect();
    let mut terms = Vec::new();
    let mut exps = vec![0u32; width];
    for j in 0..=dx {
        let mut values: Vec<Elem> = images.iter().map(|im| im[j]).collect();
        let mut stride = 1;
        for axis in (0..dims.len()).rev() {
            let n = dims[axis];
            let outer = values.len() / (n * stride);
            for o in 0..outer {
                for s in 0..stride {
                    let base = o * n * stride + s;
                    let fiber: Vec<Elem> = (0..n).map(|i| values[base + i * stride]).collect();
                    for (i, c) in newton_to_monomial(field, &points[axis], &inverses[axis], &fiber)
                        .into_iter()
                        .enumerate()
                    {
                        values[base + i * stride] = c;
                    }
                }
            }
            stride *= n;
        }
        for (idx, c) in values.iter().enumerate() {
            if c.iter().all(|&t| t == 0) {
                continue;
            }
            if c[1..].iter().any(|&t| t != 0) {
                return None;
            }
            exps.iter_mut().for_each(|e| *e = 0);
            exps[x] = j as u32;
            let mut r = idx;
            for (axis, &(y, _)) in others.iter().enumerate().rev() {
                exps[y] = (r % dims[axis]) as u32;
                r /= dims[axis];
            }
            terms.push((Monomial::from_exponents(&exps), c[0]));
        }
    }
    Some(Polynomial::from_terms(p, terms))
}

/// inv[k][i] = 1 / (z_i − z_{i−k}) for 1 ≤ k ≤ i.
fn difference_inverses(field: &ExtField, z: &[Elem]) -> Vec<Vec<Elem>> {
    (0..z.len())
        .map(|k| {
            (0..z.len())
                .map(|i| {
                    if k == 0 || i < k {
                        ZERO
                    } else {
                        field.inv(&field.sub(&z[i], &z[i - k]))
                    }
                })
                .collect()
        })
        .collect()
}

/// Monomial coefficients of the polynomial of degree < n through (z_i, v_i).
fn newton_to_monomial(field: &ExtField, z: &[Elem], inv: &[Vec<Elem>], v: &[Elem]) -> Vec<Elem> {
    let n = z.len();
    let mut dd = v.to_vec();
    for (k, inv_k) in inv.iter().enumerate().skip(1) {
        for i in (k..n).rev() {
            let num = field.sub(&dd[i], &dd[i - 1]);
            dd[i] = field.mul(&num, &inv_k[i]);
        }
    }
    // Horner on the Newton form: c = dd[n-1]; c = c·(y − z_i) + dd[i].
    let mut c = vec![ZERO; n];
    c[0] = dd[n - 1];
    for i in (0..n - 1).rev() {
        let mut next = vec![ZERO; n];
        for k in 0..n - 1 - i {
            next[k + 1] = field.add(&next[k + 1], &c[k]);
            next[k] = field.sub(&next[k], &field.mul(&c[k], &z[i]));
        }
        next[0] = field.add(&next[0], &dd[i]);
        c = next;
    }
    c
}
