use std::fmt;
use std::sync::Arc;

use super::kernel::ppower_span_rank_values;
use super::{FieldTower, TowerError, Value};

/// An element of a tower, carrying the tower handle it belongs to.
#[derive(Clone)]
pub struct TowerElement {
    tower: Arc<FieldTower>,
    value: Value,
}

impl TowerElement {
    pub(crate) fn from_value(tower: &Arc<FieldTower>, value: Value) -> Self {
        TowerElement {
            tower: Arc::clone(tower),
            value,
        }
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn value(&self) -> &Value {
        &self.value
    }

    pub fn into_value(self) -> Value {
        self.value
    }

    pub fn stage(&self) -> usize {
        self.value.stage()
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.value.is_one()
    }

    /// View this element in a tower extending its own.
    pub fn lift_to(&self, tower: &Arc<FieldTower>) -> Result<TowerElement, TowerError> {
        if Arc::ptr_eq(&self.tower, tower) || self.tower.embeds_in(tower) {
            Ok(TowerElement::from_value(tower, self.value.clone()))
        } else {
            Err(TowerError::TowerMismatch)
        }
    }

    /// The larger of the two towers, when one extends the other.
    fn common<'a>(&'a self, other: &'a TowerElement) -> Result<&'a Arc<FieldTower>, TowerError> {
        common_tower(&self.tower, &other.tower)
    }

    pub fn add(&self, other: &TowerElement) -> Result<TowerElement, TowerError> {
        let t = self.common(other)?;
        Ok(TowerElement::from_value(t, t.v_add(&self.value, &other.value)))
    }

    pub fn sub(&self, other: &TowerElement) -> Result<TowerElement, TowerError> {
        let t = self.common(other)?;
        Ok(TowerElement::from_value(t, t.v_sub(&self.value, &other.value)))
    }

    pub fn mul(&self, other: &TowerElement) -> Result<TowerElement, TowerError> {
        let t = self.common(other)?;
        Ok(TowerElement::from_value(t, t.v_mul(&self.value, &other.value)))
    }

    pub fn div(&self, other: &TowerElement) -> Result<TowerElement, TowerError> {
        let t = self.common(other)?;
        let inv = t.v_inv(&other.value)?;
        Ok(TowerElement::from_value(t, t.v_mul(&self.value, &inv)))
    }

    pub fn neg(&self) -> TowerElement {
        TowerElement::from_value(&self.tower, self.tower.v_neg(&self.value))
    }

    pub fn inv(&self) -> Result<TowerElement, TowerError> {
        Ok(TowerElement::from_value(
            &self.tower,
            self.tower.v_inv(&self.value)?,
        ))
    }

    pub fn pow(&self, k: u64) -> TowerElement {
        TowerElement::from_value(&self.tower, self.tower.v_pow(&self.value, k))
    }

    pub fn scale(&self, c: i64) -> TowerElement {
        let c = self.tower.modulus().reduce(c);
        TowerElement::from_value(&self.tower, self.tower.v_scale(&self.value, c))
    }

    /// x^p, which lies one stage below x.
    pub fn frobenius(&self) -> TowerElement {
        TowerElement::from_value(&self.tower, self.tower.v_frobenius(&self.value))
    }

    /// Whether x ∈ K^p for K the full tower of this element.
    pub fn is_pth_power(&self) -> bool {
        if self.value.is_zero() {
            return true;
        }
        let t = &self.tower;
        if t.height() == 0 {
            if let Value::Base(r) = &self.value {
                return r.pth_root().is_ok();
            }
        }
        ppower_span_rank_values(t, &[Value::one(t.modulus()), self.value.clone()]) == 1
    }

    pub fn render(&self) -> String {
        self.tower.render_value(&self.value)
    }
}

pub(crate) fn common_tower<'a>(
    a: &'a Arc<FieldTower>,
    b: &'a Arc<FieldTower>,
) -> Result<&'a Arc<FieldTower>, TowerError> {
    if Arc::ptr_eq(a, b) {
        return Ok(a);
    }
    if a.embeds_in(b) {
        Ok(b)
    } else if b.embeds_in(a) {
        Ok(a)
    } else {
        Err(TowerError::TowerMismatch)
    }
}

impl PartialEq for TowerElement {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value && common_tower(&self.tower, &other.tower).is_ok()
    }
}

impl Eq for TowerElement {}

impl fmt::Debug for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl fmt::Display for TowerElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render())
    }
}
