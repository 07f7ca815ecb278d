use std::sync::Arc;

use super::kernel::{greedy_independent, pivot_profile, reduce};
use super::{FieldTower, TowerElement, TowerError, Value};

fn tower_of(items: &[&TowerElement]) -> Result<Arc<FieldTower>, TowerError> {
    let mut it = items.iter();
    let mut t = Arc::clone(it.next().ok_or(TowerError::EmptyInput)?.tower());
    for e in it {
        t = Arc::clone(super::element::common_tower(&t, e.tower())?);
    }
    Ok(t)
}

/// Witness coefficients c with Σ c_i^p · gens_i = x, or `None` when x is
/// outside the K^p-span of `gens`.
pub fn span_membership(
    x: &TowerElement,
    gens: &[TowerElement],
) -> Result<Option<Vec<TowerElement>>, TowerError> {
    let mut all: Vec<&TowerElement> = gens.iter().collect();
    all.push(x);
    let tower = tower_of(&all)?;
    let values: Vec<Value> = all.iter().map(|e| e.value().clone()).collect();
    Ok(
        membership_values(&tower, &values[..gens.len()], &values[gens.len()]).map(|w| {
            w.into_iter()
                .map(|v| TowerElement::from_value(&tower, v))
                .collect()
        }),
    )
}

pub(crate) fn membership_values(tower: &FieldTower, gens: &[Value], x: &Value) -> Option<Vec<Value>> {
    if x.is_zero() {
        return Some(vec![tower.zero_value(); gens.len()]);
    }
    let mut columns: Vec<Vec<Value>> = gens.iter().map(|g| vec![g.clone()]).collect();
    columns.push(vec![x.clone()]);
    let m = gens.len();
    let red = reduce(tower, &columns);
    if !red.free_unknowns().contains(&m) {
        return None;
    }
    // The reduced kernel vector for the free unknown x has x-coordinate 1,
    // so x = Σ (−y_i)^p g_i.
    let y = red.kernel_vector(tower, m);
    Some(y[..m].iter().map(|c| tower.v_neg(c)).collect())
}

/// Fast membership test without a witness.
pub(crate) fn in_span(tower: &FieldTower, gens: &[Value], x: &Value) -> bool {
    if x.is_zero() {
        return true;
    }
    let mut values = gens.to_vec();
    values.push(x.clone());
    !pivot_profile(tower, &values)[gens.len()]
}

/// K^p-basis of span(A) ∩ span(B).
pub fn span_intersection(a: &[TowerElement], b: &[TowerElement]) -> Result<Vec<TowerElement>, TowerError> {
    if a.is_empty() || b.is_empty() {
        return Err(TowerError::EmptyInput);
    }
    let all: Vec<&TowerElement> = a.iter().chain(b).collect();
    let tower = tower_of(&all)?;
    let av: Vec<Value> = a.iter().map(|e| e.value().clone()).collect();
    let bv: Vec<Value> = b.iter().map(|e| e.value().clone()).collect();
    Ok(intersection_values(&tower, &av, &bv)
        .into_iter()
        .map(|v| TowerElement::from_value(&tower, v))
        .collect())
}

pub(crate) fn intersection_values(tower: &FieldTower, a: &[Value], b: &[Value]) -> Vec<Value> {
    // B first, so the free unknowns (with coordinate 1) fall on the A side and
    // the images come out as simple combinations of A.
    let columns: Vec<Vec<Value>> = b.iter().chain(a).map(|g| vec![g.clone()]).collect();
    let basis = super::kernel::kernel_values(tower, &columns);
    let images: Vec<Value> = basis
        .iter()
        .map(|y| {
            y[b.len()..]
                .iter()
                .zip(a)
                .fold(tower.zero_value(), |acc, (c, g)| {
                    if c.is_zero() {
                        acc
                    } else {
                        tower.v_add(&acc, &tower.v_mul(&tower.v_frobenius(c), g))
                    }
                })
        })
        .filter(|v| !v.is_zero())
        .collect();
    if images.is_empty() {
        return images;
    }
    greedy_independent(tower, &images)
        .into_iter()
        .map(|i| images[i].clone())
        .collect()
}
