//! Frobenius-semilinear linear algebra: solution spaces of Σ x_i^p v_i = 0.
//!
//! The system is pushed down the tower one root at a time (x = Σ d_e r^e gives
//! x^p = Σ d_e^p u^e), so over a tower of height k with n unknowns we end with
//! n·p^k unknowns over F_p(vars). There every equation is cleared of
//! denominators and split by monomial residue class mod p, which turns
//! Σ y^p w = 0 into ordinary linear equations Σ y g = 0 over F_p[vars].
//!
//! Unknown i owns the contiguous column block [i·p^k, (i+1)·p^k). The kernel is
//! a K-subspace, so column-ordered elimination marks whole blocks as pivot or
//! free, which gives the greedy selections and a reduced K-basis directly.
//!
//! Kernel bases are always computed exactly. Ranks and greedy selections over
//! towers first try exact elimination under a work limit; past it, the pivot
//! blocks are read off evaluations of the polynomial matrix at random points
//! of GF(p^k). Each sample can only under-estimate prefix ranks, and does so
//! with probability at most (matrix degree)/p^k, so samples are combined by
//! taking the larger prefix rank.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::polyring::{
    certainly_coprime, gcd, Elem, ExtField, Monomial, PointEvaluator, Polynomial, PrimeModulus,
    RationalFunction, ZERO,
};

use super::element::common_tower;
use super::{FieldTower, TowerElement, TowerError, Value};

pub type ElementVector = Vec<TowerElement>;

type PolyRow = Vec<(usize, Polynomial)>;

/// Echelon form of the flattened system.
pub(crate) struct Reduction {
    n: usize,
    block: usize,
    ncols: usize,
    /// (pivot column, row) in increasing pivot order.
    pivots: Vec<(usize, PolyRow)>,
    modulus: PrimeModulus,
}

impl Reduction {
    /// Unknown indices whose column block carries no pivot.
    pub(crate) fn free_unknowns(&self) -> Vec<usize> {
        let mut pivot = vec![false; self.n];
        for (c, _) in &self.pivots {
            pivot[c / self.block] = true;
        }
        (0..self.n).filter(|i| !pivot[*i]).collect()
    }

    /// The reduced kernel vector for free unknown `i`.
    pub(crate) fn kernel_vector(&self, tower: &FieldTower, i: usize) -> Vec<Value> {
        reassemble(tower, self.back_substitute(i * self.block))
    }

    /// Base-field solution with the given free column set to 1 and every other
    /// free column 0.
    fn back_substitute(&self, free_col: usize) -> Vec<RationalFunction> {
        let p = self.modulus;
        let mut y = vec![RationalFunction::zero(p); self.ncols];
        y[free_col] = RationalFunction::one(p);
        for (pc, row) in self.pivots.iter().rev() {
            let mut acc = RationalFunction::zero(p);
            let mut lead = None;
            for (j, a) in row {
                if j == pc {
                    lead = Some(a);
                    continue;
                }
                if !y[*j].is_zero() {
                    acc = acc.add(&y[*j].mul(&RationalFunction::from_poly(a.clone())));
                }
            }
            if acc.is_zero() {
                continue;
            }
            let lead = RationalFunction::from_poly(lead.expect("pivot entry").clone());
            y[*pc] = acc.neg().div(&lead).expect("nonzero pivot");
        }
        y
    }
}

/// Flatten and eliminate the system with unknown columns `columns[i]` (each of
/// length N, one entry per equation).
pub(crate) fn reduce(tower: &FieldTower, columns: &[Vec<Value>]) -> Reduction {
    let (block, poly_rows) = flatten(tower, columns);
    let pivots = eliminate(poly_rows, None).expect("unbounded elimination completes");
    Reduction {
        n: columns.len(),
        block,
        ncols: columns.len() * block,
        pivots,
        modulus: tower.modulus(),
    }
}

/// Column block size and the polynomial rows of the flattened system.
fn flatten(tower: &FieldTower, columns: &[Vec<Value>]) -> (usize, Vec<PolyRow>) {
    let p = tower.modulus();
    let pu = p.get() as usize;
    let neq = columns.first().map_or(0, Vec::len);
    let mut rows: Vec<Vec<(usize, Value)>> = (0..neq)
        .map(|j| {
            columns
                .iter()
                .enumerate()
                .filter(|(_, c)| !c[j].is_zero())
                .map(|(i, c)| (i, c[j].clone()))
                .collect()
        })
        .filter(|r: &Vec<(usize, Value)>| !r.is_empty())
        .collect();
    let k = tower.height();
    for s in (1..=k).rev() {
        rows = expand_level(tower, s, &rows);
    }
    (pu.pow(k as u32), to_polynomial_rows(p, &rows))
}

/// Work limit (term products and normalization passes) for exact rank
/// computations over towers before falling back to sampling.
const EXACT_RANK_WORK: usize = 50_000;

/// For each value, whether it lies outside the K^p-span of the values before it.
pub(crate) fn pivot_profile(tower: &FieldTower, values: &[Value]) -> Vec<bool> {
    let columns: Vec<Vec<Value>> = values.iter().map(|v| vec![v.clone()]).collect();
    let n = columns.len();
    let (block, poly_rows) = flatten(tower, &columns);
    let limit = (tower.height() > 0).then_some(EXACT_RANK_WORK);
    let mut out = vec![false; n];
    match eliminate(poly_rows.clone(), limit) {
        Some(pivots) => {
            for (c, _) in pivots {
                out[c / block] = true;
            }
        }
        None => {
            let prefix = sampled_prefix_ranks(tower.modulus(), &poly_rows, n, block);
            let mut prev = 0;
            for (slot, r) in out.iter_mut().zip(prefix) {
                *slot = r > prev;
                prev = r;
            }
        }
    }
    out
}

/// Rank of the first j+1 column blocks, for each j, combined over samples.
fn sampled_prefix_ranks(p: PrimeModulus, rows: &[PolyRow], n: usize, block: usize) -> Vec<usize> {
    let field = ExtField::for_prime(p);
    let width = rows
        .iter()
        .flat_map(|r| r.iter().map(|(_, f)| f.width()))
        .max()
        .unwrap_or(0);
    let mut best = vec![0usize; n];
    let mut previous: Option<Vec<usize>> = None;
    for sample in 0..4u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(0x7a4b_0000 ^ (sample << 32) ^ (n * block) as u64);
        let point: Vec<Elem> = (0..width).map(|_| field.random(&mut rng)).collect();
        let pivots = evaluated_pivots(&mut PointEvaluator::new(field, point), rows, n * block);
        let mut prefix = vec![0usize; n];
        for c in pivots {
            prefix[c / block] += 1;
        }
        for j in 1..n {
            prefix[j] += prefix[j - 1];
        }
        for (b, r) in best.iter_mut().zip(&prefix) {
            *b = (*b).max(*r);
        }
        if previous.as_ref() == Some(&prefix) {
            break;
        }
        previous = Some(prefix);
    }
    best
}

/// Pivot columns of column-ordered elimination of the rows evaluated at a point.
fn evaluated_pivots(eval: &mut PointEvaluator, rows: &[PolyRow], ncols: usize) -> Vec<usize> {
    let field = eval.field();
    let mut dense: Vec<Vec<Elem>> = rows
        .iter()
        .map(|r| {
            let mut v = vec![ZERO; ncols];
            for (c, f) in r {
                v[*c] = eval.eval(f);
            }
            v
        })
        .collect();
    let mut pivots = Vec::new();
    let mut top = 0;
    for col in 0..ncols {
        let Some(found) = (top..dense.len()).find(|&i| dense[i][col] != ZERO) else {
            continue;
        };
        dense.swap(top, found);
        let inv = field.inv(&dense[top][col]);
        let (head, tail) = dense.split_at_mut(top + 1);
        let pivot = &head[top];
        for row in tail.iter_mut() {
            if row[col] == ZERO {
                continue;
            }
            let f = field.mul(&row[col], &inv);
            for j in col..ncols {
                if pivot[j] != ZERO {
                    row[j] = field.sub(&row[j], &field.mul(&f, &pivot[j]));
                }
            }
        }
        pivots.push(col);
        top += 1;
        if top == dense.len() {
            break;
        }
    }
    pivots
}

fn expand_level(tower: &FieldTower, s: usize, rows: &[Vec<(usize, Value)>]) -> Vec<Vec<(usize, Value)>> {
    let p = tower.modulus();
    let pu = p.get() as usize;
    let powers = &tower.roots()[s - 1].powers;
    let mut out = Vec::with_capacity(rows.len() * pu);
    for row in rows {
        let mut split: Vec<Vec<(usize, Value)>> = vec![Vec::new(); pu];
        for (i, v) in row {
            for (e, ue) in powers.iter().enumerate() {
                let w = tower.v_mul(ue, v);
                if w.is_zero() {
                    continue;
                }
                for (f, dst) in split.iter_mut().enumerate() {
                    let c = w.coeff(s, f, p);
                    if !c.is_zero() {
                        dst.push((i * pu + e, c));
                    }
                }
            }
        }
        out.extend(split.into_iter().filter(|r| !r.is_empty()));
    }
    out
}

/// Clear denominators per equation and split by monomial class mod p, taking
/// p-th roots of each class part.
fn to_polynomial_rows(p: PrimeModulus, rows: &[Vec<(usize, Value)>]) -> Vec<PolyRow> {
    let pu = p.get();
    let mut out = Vec::new();
    for row in rows {
        let base: Vec<(usize, &RationalFunction)> = row
            .iter()
            .map(|(c, v)| (*c, v.as_base().expect("fully expanded entry")))
            .collect();
        let mut lcm = Polynomial::one(p);
        for (_, r) in &base {
            let d = r.denominator();
            if d.is_one() || d == &lcm {
                continue;
            }
            let g = gcd(&lcm, d);
            lcm = lcm.mul(&d.div_exact(&g).expect("gcd divides"));
        }
        type Terms = Vec<(Monomial, u32)>;
        let mut classes: BTreeMap<Monomial, Vec<(usize, Terms)>> = BTreeMap::new();
        for (c, r) in &base {
            let cleared = if lcm.is_one() {
                r.numerator().clone()
            } else {
                r.numerator()
                    .mul(&lcm.div_exact(r.denominator()).expect("lcm is a multiple"))
            };
            for (m, coef) in cleared.terms() {
                let (class, quot) = m.split_mod(pu);
                let entry = classes.entry(class).or_default();
                match entry.last_mut() {
                    Some((col, terms)) if col == c => terms.push((quot, *coef)),
                    _ => entry.push((*c, vec![(quot, *coef)])),
                }
            }
        }
        for (_, entries) in classes {
            let prow: PolyRow = entries
                .into_iter()
                .map(|(c, t)| (c, Polynomial::from_terms(p, t)))
                .filter(|(_, f)| !f.is_zero())
                .collect();
            if !prow.is_empty() {
                out.push(normalize_row(prow, &[]));
            }
        }
    }
    out
}

/// Remove the polynomial content of a row and make its leading entry monic.
/// `candidates` are likely factors of the content (earlier pivot entries),
/// tried by exact division before any gcd is computed.
fn normalize_row(mut row: PolyRow, candidates: &[Polynomial]) -> PolyRow {
    let p = row[0].1.modulus();
    let mut mono = row[0].1.monomial_content();
    for (_, f) in &row[1..] {
        if mono.is_one() {
            break;
        }
        mono = mono.gcd(&f.monomial_content());
    }
    if !mono.is_one() {
        for (_, f) in row.iter_mut() {
            *f = f.div_monomial(&mono);
        }
    }
    if !coprime_row(&row) {
        for c in candidates.iter().rev() {
            while let Some(divided) = divide_row(&row, c) {
                row = divided;
            }
        }
    }
    let lc = row[0].1.leading_coeff();
    if lc != 1 {
        let inv = p.inv(lc);
        for (_, f) in row.iter_mut() {
            *f = f.scale(inv);
        }
    }
    row
}

fn coprime_row(row: &PolyRow) -> bool {
    let entries: Vec<&Polynomial> = row.iter().map(|(_, f)| f).collect();
    certainly_coprime(&entries)
}

fn divide_row(row: &PolyRow, d: &Polynomial) -> Option<PolyRow> {
    row.iter().map(|(c, f)| f.div_exact(d).map(|q| (*c, q))).collect()
}

fn pivot_key(row: &PolyRow) -> (u32, usize, usize) {
    let f = &row[0].1;
    (f.total_degree(), f.num_terms(), row.len())
}

/// Fraction-free elimination, column by column from the left; the pivot in
/// each column is the entry of lowest total degree. Gives up (None) once the
/// work estimate passes `limit`.
fn eliminate(mut active: Vec<PolyRow>, limit: Option<usize>) -> Option<Vec<(usize, PolyRow)>> {
    let mut work = 0usize;
    let mut pivots = Vec::new();
    let mut candidates: Vec<Polynomial> = Vec::new();
    while !active.is_empty() {
        let col = active.iter().map(|r| r[0].0).min().unwrap();
        let best = active
            .iter()
            .enumerate()
            .filter(|(_, r)| r[0].0 == col)
            .min_by_key(|(_, r)| pivot_key(r))
            .map(|(i, _)| i)
            .unwrap();
        let pivot = active.swap_remove(best);
        let mut next = Vec::with_capacity(active.len());
        for row in active {
            if row[0].0 != col {
                next.push(row);
                continue;
            }
            let piv = &pivot[0].1;
            let e = &row[0].1;
            let g = gcd(piv, e);
            let a = piv.div_exact(&g).expect("gcd divides");
            let b = e.div_exact(&g).expect("gcd divides");
            let combined = combine(&row, &a, &pivot, &b);
            work += product_work(&row, &a) + product_work(&pivot, &b);
            if limit.is_some_and(|l| work > l) {
                return None;
            }
            if !combined.is_empty() {
                let terms: usize = combined.iter().map(|(_, f)| f.num_terms()).sum();
                work += terms * (candidates.len() + combined[0].1.width());
                next.push(normalize_row(combined, &candidates));
            }
        }
        if !pivot[0].1.is_constant() && pivot[0].1.num_terms() > 1 {
            candidates.push(pivot[0].1.clone());
        }
        active = next;
        pivots.push((col, pivot));
    }
    Some(pivots)
}

/// Term products needed for a·x.
fn product_work(x: &PolyRow, a: &Polynomial) -> usize {
    a.num_terms() * x.iter().map(|(_, f)| f.num_terms()).sum::<usize>()
}

/// a·x − b·y, dropping the (cancelling) leading column.
fn combine(x: &PolyRow, a: &Polynomial, y: &PolyRow, b: &Polynomial) -> PolyRow {
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (1, 1);
    while i < x.len() || j < y.len() {
        let cx = x.get(i).map(|t| t.0);
        let cy = y.get(j).map(|t| t.0);
        match (cx, cy) {
            (Some(c1), Some(c2)) if c1 == c2 => {
                let v = x[i].1.mul(a).sub(&y[j].1.mul(b));
                if !v.is_zero() {
                    out.push((c1, v));
                }
                i += 1;
                j += 1;
            }
            (Some(c1), Some(c2)) if c1 < c2 => {
                out.push((c1, x[i].1.mul(a)));
                i += 1;
            }
            (Some(c1), None) => {
                out.push((c1, x[i].1.mul(a)));
                i += 1;
            }
            (_, Some(c2)) => {
                out.push((c2, y[j].1.mul(b).neg()));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Rebuild tower elements from base-field digits, lowest root first.
fn reassemble(tower: &FieldTower, digits: Vec<RationalFunction>) -> Vec<Value> {
    let pu = tower.p() as usize;
    let mut vals: Vec<Value> = digits.into_iter().map(Value::Base).collect();
    for s in 1..=tower.height() {
        vals = vals.chunks(pu).map(|c| Value::assemble(s, c.to_vec())).collect();
    }
    vals
}

/// Reduced K-basis of {x : Σ x_i^p columns_i = 0}: one vector per free unknown,
/// equal to 1 there and 0 at the other free unknowns.
pub(crate) fn kernel_values(tower: &FieldTower, columns: &[Vec<Value>]) -> Vec<Vec<Value>> {
    let red = reduce(tower, columns);
    red.free_unknowns()
        .into_iter()
        .map(|i| red.kernel_vector(tower, i))
        .collect()
}

pub(crate) fn ppower_span_rank_values(tower: &FieldTower, values: &[Value]) -> usize {
    pivot_profile(tower, values).into_iter().filter(|k| *k).count()
}

/// Indices kept by a left-to-right scan retaining an element iff it is outside
/// the K^p-span of those already kept.
pub(crate) fn greedy_independent(tower: &FieldTower, values: &[Value]) -> Vec<usize> {
    pivot_profile(tower, values)
        .into_iter()
        .enumerate()
        .filter(|(_, k)| *k)
        .map(|(i, _)| i)
        .collect()
}

fn shared_tower(elements: impl IntoIterator<Item = Arc<FieldTower>>) -> Result<Arc<FieldTower>, TowerError> {
    let mut it = elements.into_iter();
    let mut t = it.next().ok_or(TowerError::EmptyInput)?;
    for u in it {
        t = Arc::clone(common_tower(&t, &u)?);
    }
    Ok(t)
}

/// Basis of {x ∈ K^n : Σ_i x_i^p · v_i = 0} for input vectors v_1..v_n.
pub fn semilinear_kernel(vectors: &[ElementVector]) -> Result<Vec<ElementVector>, TowerError> {
    let first = vectors.first().ok_or(TowerError::EmptyInput)?;
    let len = first.len();
    if len == 0 {
        return Err(TowerError::EmptyInput);
    }
    if vectors.iter().any(|v| v.len() != len) {
        return Err(TowerError::LengthMismatch);
    }
    let tower = shared_tower(vectors.iter().flatten().map(|e| Arc::clone(e.tower())))?;
    let columns: Vec<Vec<Value>> = vectors
        .iter()
        .map(|v| v.iter().map(|e| e.value().clone()).collect())
        .collect();
    Ok(kernel_values(&tower, &columns)
        .into_iter()
        .map(|x| {
            x.into_iter()
                .map(|v| TowerElement::from_value(&tower, v))
                .collect()
        })
        .collect())
}

/// dim over K^p of the K^p-span of the elements.
pub fn ppower_span_rank(elements: &[TowerElement]) -> Result<usize, TowerError> {
    let tower = shared_tower(elements.iter().map(|e| Arc::clone(e.tower())))?;
    let values: Vec<Value> = elements.iter().map(|e| e.value().clone()).collect();
    Ok(ppower_span_rank_values(&tower, &values))
}
