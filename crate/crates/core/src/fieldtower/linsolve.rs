//! Ordinary (K-linear) elimination with tower arithmetic, for small systems.

use super::{FieldTower, Value};

/// Indices of a maximal K-linearly independent subset of `vectors`, chosen
/// greedily in input order.
pub(crate) fn independent_subset(tower: &FieldTower, vectors: &[Vec<Value>]) -> Vec<usize> {
    // Rows already reduced, each with its pivot column and normalized to 1 there.
    let mut basis: Vec<(usize, Vec<Value>)> = Vec::new();
    let mut kept = Vec::new();
    for (idx, v) in vectors.iter().enumerate() {
        let mut w = v.clone();
        for (pc, row) in &basis {
            if w[*pc].is_zero() {
                continue;
            }
            let f = w[*pc].clone();
            for (x, r) in w.iter_mut().zip(row) {
                if !r.is_zero() {
                    *x = tower.v_sub(x, &tower.v_mul(&f, r));
                }
            }
        }
        if let Some(pc) = w.iter().position(|x| !x.is_zero()) {
            let inv = tower.v_inv(&w[pc]).expect("nonzero pivot");
            let w: Vec<Value> = w.iter().map(|x| tower.v_mul(x, &inv)).collect();
            basis.push((pc, w));
            kept.push(idx);
        }
    }
    kept
}
