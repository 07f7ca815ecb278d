use crate::polyring::{PolyError, Polynomial, PrimeModulus, RationalFunction};

use super::FieldTower;

/// Raw element of a tower stage. `Ext` holds the p coefficients of
/// 1, r_s, …, r_s^{p-1} over lower stages and always has a nonzero
/// coefficient at some index ≥ 1; otherwise it collapses to its constant part.
/// With that normalization equality is structural, and an element keeps its
/// meaning in every tower that extends the one it was built in.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Value {
    Base(RationalFunction),
    Ext { stage: usize, coeffs: Vec<Value> },
}

impl Value {
    pub fn zero(p: PrimeModulus) -> Self {
        Value::Base(RationalFunction::zero(p))
    }

    pub fn one(p: PrimeModulus) -> Self {
        Value::Base(RationalFunction::one(p))
    }

    pub fn constant(p: PrimeModulus, c: u32) -> Self {
        Value::Base(RationalFunction::constant(p, c))
    }

    pub fn from_poly(f: Polynomial) -> Self {
        Value::Base(RationalFunction::from_poly(f))
    }

    pub fn stage(&self) -> usize {
        match self {
            Value::Base(_) => 0,
            Value::Ext { stage, .. } => *stage,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Value::Base(r) if r.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Value::Base(r) if r.is_one())
    }

    pub fn as_base(&self) -> Option<&RationalFunction> {
        match self {
            Value::Base(r) => Some(r),
            Value::Ext { .. } => None,
        }
    }

    /// Coefficient of r_s^f when viewing self as an element of stage s ≥ self.stage().
    pub fn coeff(&self, s: usize, f: usize, p: PrimeModulus) -> Value {
        match self {
            Value::Ext { stage, coeffs } if *stage == s => coeffs[f].clone(),
            _ => {
                debug_assert!(self.stage() < s || s == 0);
                if f == 0 {
                    self.clone()
                } else {
                    Value::zero(p)
                }
            }
        }
    }

    pub(crate) fn assemble(stage: usize, mut coeffs: Vec<Value>) -> Value {
        debug_assert!(stage > 0);
        if coeffs[1..].iter().all(Value::is_zero) {
            coeffs.swap_remove(0)
        } else {
            Value::Ext { stage, coeffs }
        }
    }

    /// Highest base variable id + 1 appearing anywhere.
    pub fn width(&self) -> usize {
        match self {
            Value::Base(r) => r.numerator().width().max(r.denominator().width()),
            Value::Ext { coeffs, .. } => coeffs.iter().map(Value::width).max().unwrap_or(0),
        }
    }

    /// Visit every base-field leaf.
    pub fn for_each_leaf(&self, f: &mut impl FnMut(&RationalFunction)) {
        match self {
            Value::Base(r) => f(r),
            Value::Ext { coeffs, .. } => coeffs.iter().for_each(|c| c.for_each_leaf(f)),
        }
    }
}

impl std::fmt::Debug for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Base(r) => write!(f, "{r:?}"),
            Value::Ext { stage, coeffs } => write!(f, "E{stage}{coeffs:?}"),
        }
    }
}

/// Arithmetic on raw values. Operands must belong to `self` (or a prefix of it).
impl FieldTower {
    pub(crate) fn zero_value(&self) -> Value {
        Value::zero(self.modulus())
    }

    pub(crate) fn v_add(&self, a: &Value, b: &Value) -> Value {
        match (a, b) {
            (Value::Base(x), Value::Base(y)) => Value::Base(x.add(y)),
            _ => {
                let (sa, sb) = (a.stage(), b.stage());
                if sa > sb {
                    self.add_low(a, b)
                } else if sb > sa {
                    self.add_low(b, a)
                } else {
                    let (Value::Ext { coeffs: ca, .. }, Value::Ext { coeffs: cb, .. }) = (a, b) else {
                        unreachable!()
                    };
                    let coeffs = ca.iter().zip(cb).map(|(x, y)| self.v_add(x, y)).collect();
                    Value::assemble(sa, coeffs)
                }
            }
        }
    }

    /// `hi + lo` where lo lives strictly below hi's stage.
    fn add_low(&self, hi: &Value, lo: &Value) -> Value {
        let Value::Ext { stage, coeffs } = hi else {
            unreachable!()
        };
        let mut coeffs = coeffs.clone();
        coeffs[0] = self.v_add(&coeffs[0], lo);
        Value::Ext {
            stage: *stage,
            coeffs,
        }
    }

    pub(crate) fn v_neg(&self, a: &Value) -> Value {
        match a {
            Value::Base(x) => Value::Base(x.neg()),
            Value::Ext { stage, coeffs } => Value::Ext {
                stage: *stage,
                coeffs: coeffs.iter().map(|c| self.v_neg(c)).collect(),
            },
        }
    }

    pub(crate) fn v_sub(&self, a: &Value, b: &Value) -> Value {
        self.v_add(a, &self.v_neg(b))
    }

    pub(crate) fn v_scale(&self, a: &Value, c: u32) -> Value {
        if c.is_multiple_of(self.modulus().get()) {
            return self.zero_value();
        }
        match a {
            Value::Base(x) => Value::Base(x.scale(c)),
            Value::Ext { stage, coeffs } => Value::Ext {
                stage: *stage,
                coeffs: coeffs.iter().map(|x| self.v_scale(x, c)).collect(),
            },
        }
    }

    pub(crate) fn v_mul(&self, a: &Value, b: &Value) -> Value {
        if a.is_zero() || b.is_zero() {
            return self.zero_value();
        }
        match (a, b) {
            (Value::Base(x), Value::Base(y)) => Value::Base(x.mul(y)),
            _ => {
                let (sa, sb) = (a.stage(), b.stage());
                if sa != sb {
                    let (hi, lo) = if sa > sb { (a, b) } else { (b, a) };
                    let Value::Ext { stage, coeffs } = hi else {
                        unreachable!()
                    };
                    return Value::Ext {
                        stage: *stage,
                        coeffs: coeffs.iter().map(|c| self.v_mul(c, lo)).collect(),
                    };
                }
                let (Value::Ext { coeffs: ca, .. }, Value::Ext { coeffs: cb, .. }) = (a, b) else {
                    unreachable!()
                };
                let p = ca.len();
                let mut prod = vec![self.zero_value(); 2 * p - 1];
                for (i, x) in ca.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (j, y) in cb.iter().enumerate() {
                        if y.is_zero() {
                            continue;
                        }
                        prod[i + j] = self.v_add(&prod[i + j], &self.v_mul(x, y));
                    }
                }
                let u = &self.roots()[sa - 1].radicand;
                let high: Vec<Value> = prod.drain(p..).collect();
                for (j, h) in high.iter().enumerate() {
                    if !h.is_zero() {
                        prod[j] = self.v_add(&prod[j], &self.v_mul(u, h));
                    }
                }
                Value::assemble(sa, prod)
            }
        }
    }

    pub(crate) fn v_pow(&self, a: &Value, mut k: u64) -> Value {
        let mut base = a.clone();
        let mut acc = Value::one(self.modulus());
        while k > 0 {
            if k & 1 == 1 {
                acc = self.v_mul(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.v_mul(&base, &base);
            }
        }
        acc
    }

    /// x^p = Σ c_e^p u^e, one stage lower than x.
    pub(crate) fn v_frobenius(&self, a: &Value) -> Value {
        match a {
            Value::Base(x) => Value::Base(x.frobenius()),
            Value::Ext { stage, coeffs } => {
                let powers = &self.roots()[stage - 1].powers;
                let mut acc = self.zero_value();
                for (e, c) in coeffs.iter().enumerate() {
                    if !c.is_zero() {
                        acc = self.v_add(&acc, &self.v_mul(&self.v_frobenius(c), &powers[e]));
                    }
                }
                acc
            }
        }
    }

    /// x^{-1} = x^{p-1} · (x^p)^{-1}, recursing down the tower.
    pub(crate) fn v_inv(&self, a: &Value) -> Result<Value, PolyError> {
        match a {
            Value::Base(x) => Ok(Value::Base(x.inv()?)),
            Value::Ext { .. } => {
                let p = self.modulus().get() as u64;
                let f = self.v_frobenius(a);
                let fi = self.v_inv(&f)?;
                Ok(self.v_mul(&self.v_pow(a, p - 1), &fi))
            }
        }
    }

    /// r_s^e as a value.
    pub(crate) fn root_power(&self, s: usize, e: usize) -> Value {
        let p = self.modulus();
        let pu = p.get() as usize;
        let mut coeffs = vec![Value::zero(p); pu];
        coeffs[1 % pu] = Value::one(p);
        let r = Value::assemble(s, coeffs);
        self.v_pow(&r, e as u64)
    }
}
