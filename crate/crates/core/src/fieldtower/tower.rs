use std::sync::Arc;

use crate::polyring::{Polynomial, PrimeModulus, RationalFunction};

use super::{TowerElement, TowerError, Value};

/// r^p = radicand, with the radicand's powers u^0..u^{p-1} cached for Frobenius.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RootSpec {
    pub name: String,
    pub radicand: Value,
    pub(crate) powers: Vec<Value>,
}

/// F_p(t_1..t_m) followed by a chain of degree-p purely inseparable root
/// adjunctions. Stage 0 is the rational function field, stage s adds the
/// s-th root.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FieldTower {
    modulus: PrimeModulus,
    vars: Vec<String>,
    roots: Vec<RootSpec>,
}

impl FieldTower {
    pub fn new<S: AsRef<str>>(modulus: PrimeModulus, vars: &[S]) -> Result<Arc<Self>, TowerError> {
        let mut tower = FieldTower {
            modulus,
            vars: Vec::new(),
            roots: Vec::new(),
        };
        for v in vars {
            tower.check_fresh(v.as_ref())?;
            tower.vars.push(v.as_ref().to_string());
        }
        Ok(Arc::new(tower))
    }

    #[inline]
    pub fn modulus(&self) -> PrimeModulus {
        self.modulus
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.modulus.get()
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn roots(&self) -> &[RootSpec] {
        &self.roots
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    /// Number of root adjunctions, i.e. the top stage.
    pub fn height(&self) -> usize {
        self.roots.len()
    }

    /// [K : F_p(vars)] = p^height.
    pub fn degree(&self) -> usize {
        (self.p() as usize).pow(self.roots.len() as u32)
    }

    pub fn has_name(&self, name: &str) -> bool {
        self.vars.iter().any(|v| v == name) || self.roots.iter().any(|r| r.name == name)
    }

    fn check_fresh(&self, name: &str) -> Result<(), TowerError> {
        if !is_identifier(name) {
            return Err(TowerError::InvalidName(name.to_string()));
        }
        if self.has_name(name) {
            return Err(TowerError::DuplicateName(name.to_string()));
        }
        Ok(())
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    /// Stage (1-based) of the named root.
    pub fn root_stage(&self, name: &str) -> Option<usize> {
        self.roots.iter().position(|r| r.name == name).map(|i| i + 1)
    }

    /// Every element of `self` is, unchanged, an element of `other`.
    pub fn embeds_in(&self, other: &FieldTower) -> bool {
        self.modulus == other.modulus
            && self.vars.len() <= other.vars.len()
            && self.roots.len() <= other.roots.len()
            && self.vars.iter().zip(&other.vars).all(|(a, b)| a == b)
            && self.roots.iter().zip(&other.roots).all(|(a, b)| a == b)
    }

    pub fn adjoin_transcendental(self: &Arc<Self>, name: &str) -> Result<Arc<Self>, TowerError> {
        self.check_fresh(name)?;
        let mut t = (**self).clone();
        t.vars.push(name.to_string());
        Ok(Arc::new(t))
    }

    /// K(r) with r^p = u. Rejects u ∈ K^p, which would not give a degree-p extension.
    pub fn adjoin_pth_root(self: &Arc<Self>, u: &TowerElement, name: &str) -> Result<Arc<Self>, TowerError> {
        self.check_fresh(name)?;
        let u = u.lift_to(self)?;
        if u.is_zero() {
            return Err(TowerError::ZeroRadicand);
        }
        if u.is_pth_power() {
            return Err(TowerError::AlreadyPthPower(u.render()));
        }
        Ok(self.push_root(name, u.into_value()))
    }

    /// Adjoin without the p-th power check; the caller has proved u ∉ K^p.
    pub(crate) fn push_root(self: &Arc<Self>, name: &str, radicand: Value) -> Arc<Self> {
        let mut powers = vec![Value::one(self.modulus)];
        for _ in 1..self.p() {
            let next = self.v_mul(powers.last().unwrap(), &radicand);
            powers.push(next);
        }
        let mut t = (**self).clone();
        t.roots.push(RootSpec {
            name: name.to_string(),
            radicand,
            powers,
        });
        Arc::new(t)
    }

    pub fn var(self: &Arc<Self>, name: &str) -> Result<TowerElement, TowerError> {
        if let Some(i) = self.var_index(name) {
            return Ok(TowerElement::from_value(
                self,
                Value::from_poly(Polynomial::var(self.modulus, i)),
            ));
        }
        if let Some(s) = self.root_stage(name) {
            return Ok(TowerElement::from_value(self, self.root_power(s, 1)));
        }
        Err(TowerError::UnknownName(name.to_string()))
    }

    pub fn constant(self: &Arc<Self>, c: i64) -> TowerElement {
        let c = self.modulus.reduce(c);
        TowerElement::from_value(self, Value::constant(self.modulus, c))
    }

    pub fn zero(self: &Arc<Self>) -> TowerElement {
        self.constant(0)
    }

    pub fn one(self: &Arc<Self>) -> TowerElement {
        self.constant(1)
    }

    pub fn from_rational(self: &Arc<Self>, r: RationalFunction) -> TowerElement {
        TowerElement::from_value(self, Value::Base(r))
    }

    /// Names usable when rendering base-field polynomials.
    pub fn var_names(&self) -> &[String] {
        &self.vars
    }

    /// Render a raw value as `c0 + c1*r + c2*r^2`, compound coefficients parenthesized.
    pub fn render_value(&self, v: &Value) -> String {
        match v {
            Value::Base(r) => r.render(&self.vars),
            Value::Ext { stage, coeffs } => {
                let name = &self.roots[stage - 1].name;
                let mut parts = Vec::new();
                for (e, c) in coeffs.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    let cs = self.render_value(c);
                    let rp = match e {
                        0 => {
                            parts.push(cs);
                            continue;
                        }
                        1 => name.clone(),
                        _ => format!("{name}^{e}"),
                    };
                    if c.is_one() {
                        parts.push(rp);
                    } else if cs.contains(' ') || cs.contains('/') {
                        parts.push(format!("({cs})*{rp}"));
                    } else {
                        parts.push(format!("{cs}*{rp}"));
                    }
                }
                parts.join(" + ")
            }
        }
    }

    /// Canonical text presentation, one declaration per line.
    pub fn to_text(&self) -> String {
        let mut out = format!("p = {}\nvars = {}\n", self.p(), self.vars.join(", "));
        for r in &self.roots {
            out.push_str(&format!(
                "root {} = ({})^(1/{})\n",
                r.name,
                self.render_value(&r.radicand),
                self.p()
            ));
        }
        out
    }
}

pub(crate) fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
