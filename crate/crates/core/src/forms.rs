//! Quasilinear p-forms ⟨a_1,…,a_n⟩ : x ↦ Σ a_i x_i^p and their invariants.

use std::sync::Arc;

use crate::fieldtower::{
    greedy_independent, in_span, independent_subset, intersection_values, kernel_values, pivot_profile,
    ppower_span_rank_values, FieldTower, TowerElement, TowerError, Value,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormError {
    #[error("the zero form has no norm form")]
    ZeroForm,
    #[error("input form is isotropic")]
    IsotropicInput,
    #[error("{0} is a p-th power, so adjoining its root is trivial")]
    PthPowerRadicand(String),
    #[error("cannot scale by zero")]
    ZeroScalar,
    #[error("form has no coefficients")]
    Empty,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("internal consistency check failed: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// Coefficients over one tower. Zero coefficients are allowed and only
/// contribute to the defect index.
#[derive(Clone)]
pub struct QuasilinearForm {
    tower: Arc<FieldTower>,
    coeffs: Vec<Value>,
}

impl PartialEq for QuasilinearForm {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs
            && (Arc::ptr_eq(&self.tower, &other.tower)
                || self.tower.embeds_in(&other.tower)
                || other.tower.embeds_in(&self.tower))
    }
}

impl std::fmt::Debug for QuasilinearForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.render())
    }
}

impl QuasilinearForm {
    pub fn new(coeffs: &[TowerElement]) -> Result<Self, FormError> {
        let first = coeffs.first().ok_or(FormError::Empty)?;
        let mut tower = Arc::clone(first.tower());
        for c in &coeffs[1..] {
            tower = Arc::clone(crate::fieldtower::common_tower_of(&tower, c.tower())?);
        }
        Ok(QuasilinearForm {
            coeffs: coeffs.iter().map(|c| c.value().clone()).collect(),
            tower,
        })
    }

    /// The dimension-0 form over `tower`.
    pub fn empty(tower: &Arc<FieldTower>) -> Self {
        QuasilinearForm {
            tower: Arc::clone(tower),
            coeffs: Vec::new(),
        }
    }

    pub(crate) fn from_values(tower: &Arc<FieldTower>, coeffs: Vec<Value>) -> Self {
        QuasilinearForm {
            tower: Arc::clone(tower),
            coeffs,
        }
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        &self.tower
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn values(&self) -> &[Value] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> TowerElement {
        TowerElement::from_value(&self.tower, self.coeffs[i].clone())
    }

    pub fn coeffs(&self) -> Vec<TowerElement> {
        (0..self.dim()).map(|i| self.coeff(i)).collect()
    }

    pub fn is_zero_form(&self) -> bool {
        self.coeffs.iter().all(Value::is_zero)
    }

    /// Same coefficients, viewed over an extension tower.
    pub fn lift_to(&self, tower: &Arc<FieldTower>) -> Result<Self, FormError> {
        if Arc::ptr_eq(&self.tower, tower) || self.tower.embeds_in(tower) {
            Ok(QuasilinearForm::from_values(tower, self.coeffs.clone()))
        } else {
            Err(TowerError::TowerMismatch.into())
        }
    }

    /// Bring two forms over a common tower.
    fn align(&self, other: &Self) -> Result<Arc<FieldTower>, FormError> {
        Ok(Arc::clone(crate::fieldtower::common_tower_of(
            &self.tower,
            &other.tower,
        )?))
    }

    fn nonzero(&self) -> Vec<Value> {
        self.coeffs.iter().filter(|c| !c.is_zero()).cloned().collect()
    }

    /// i_0: zeros count once each, the rest contribute n − rank over K^p.
    pub fn defect_index(&self) -> usize {
        defect_values(&self.tower, &self.coeffs)
    }

    pub fn is_anisotropic(&self) -> bool {
        self.defect_index() == 0
    }

    /// Left-to-right greedy: keep a coefficient iff it leaves the K^p-span of
    /// those already kept.
    pub fn anisotropic_part(&self) -> Self {
        let nz = self.nonzero();
        if nz.is_empty() {
            return QuasilinearForm::empty(&self.tower);
        }
        let kept = greedy_independent(&self.tower, &nz);
        QuasilinearForm::from_values(&self.tower, kept.into_iter().map(|i| nz[i].clone()).collect())
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self, FormError> {
        let t = self.align(other)?;
        let mut coeffs = self.coeffs.clone();
        coeffs.extend(other.coeffs.iter().cloned());
        Ok(QuasilinearForm::from_values(&t, coeffs))
    }

    /// All pairwise products, row-major in (self, other).
    pub fn tensor(&self, other: &Self) -> Result<Self, FormError> {
        let t = self.align(other)?;
        let mut coeffs = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.coeffs {
            for b in &other.coeffs {
                coeffs.push(t.v_mul(a, b));
            }
        }
        Ok(QuasilinearForm::from_values(&t, coeffs))
    }

    pub fn scale(&self, a: &TowerElement) -> Result<Self, FormError> {
        if a.is_zero() {
            return Err(FormError::ZeroScalar);
        }
        let t = Arc::clone(crate::fieldtower::common_tower_of(&self.tower, a.tower())?);
        let coeffs = self.coeffs.iter().map(|c| t.v_mul(c, a.value())).collect();
        Ok(QuasilinearForm::from_values(&t, coeffs))
    }

    /// Remove the coefficient at `index`.
    pub fn drop_coeff(&self, index: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.remove(index);
        QuasilinearForm::from_values(&self.tower, coeffs)
    }

    /// First `k` coefficients.
    pub fn truncate(&self, k: usize) -> Self {
        QuasilinearForm::from_values(&self.tower, self.coeffs[..k.min(self.dim())].to_vec())
    }

    /// Generators S of the norm field: ratios a_i/a_1 kept greedily when outside
    /// F^p(S so far).
    pub fn norm_generators(&self) -> Result<Vec<Value>, FormError> {
        let t = &self.tower;
        let nz = self.nonzero();
        let first = nz.first().ok_or(FormError::ZeroForm)?;
        let inv = t.v_inv(first).map_err(TowerError::from)?;
        let mut gens = Vec::new();
        let mut monomials = vec![Value::one(t.modulus())];
        for a in &nz[1..] {
            let g = t.v_mul(a, &inv);
            if in_span(t, &monomials, &g) {
                continue;
            }
            monomials = expand_monomials(t, &monomials, &g);
            gens.push(g);
        }
        Ok(gens)
    }

    /// φ_qp = ⟨⟨S⟩⟩ for the greedy generator set S.
    pub fn norm_form(&self) -> Result<Self, FormError> {
        let gens = self.norm_generators()?;
        Ok(quasi_pfister_values(&self.tower, &gens))
    }

    pub fn norm_degree(&self) -> Result<usize, FormError> {
        let k = self.norm_generators()?.len();
        Ok((self.tower.p() as usize).pow(k as u32))
    }

    /// Containment of value sets D(ψ) ⊂ D(φ); both must be anisotropic.
    pub fn is_subform_of(&self, phi: &Self) -> Result<bool, FormError> {
        let t = self.align(phi)?;
        if !self.is_anisotropic() || !phi.is_anisotropic() {
            return Err(FormError::IsotropicInput);
        }
        Ok(span_contains(&t, &phi.coeffs, &self.coeffs))
    }

    pub fn is_isomorphic(&self, phi: &Self) -> Result<bool, FormError> {
        Ok(self.dim() == phi.dim() && self.is_subform_of(phi)?)
    }

    fn check_radicand(&self, a: &TowerElement) -> Result<Arc<FieldTower>, FormError> {
        let t = Arc::clone(crate::fieldtower::common_tower_of(&self.tower, a.tower())?);
        let a = a.lift_to(&t)?;
        if a.is_pth_power() {
            return Err(FormError::PthPowerRadicand(a.render()));
        }
        Ok(t)
    }

    /// i_0 of this form over K(a^{1/p}), computed in K as i_0(⟨⟨a⟩⟩ ⊗ φ)/p.
    pub fn pinsep_index(&self, a: &TowerElement) -> Result<usize, FormError> {
        let t = self.check_radicand(a)?;
        pinsep_index_values(&t, &self.coeffs, a.value())
    }

    /// A subform ψ ⊂ φ of dimension ≤ p·m whose index over K(a^{1/p}) is ≥ m.
    pub fn pinsep_small_subform(&self, a: &TowerElement, m: usize) -> Result<Self, FormError> {
        let t = self.check_radicand(a)?;
        if m == 0 {
            return Err(FormError::Precondition("m must be positive".into()));
        }
        if !self.is_anisotropic() {
            return Err(FormError::IsotropicInput);
        }
        let idx = pinsep_index_values(&t, &self.coeffs, a.value())?;
        if idx < m {
            return Err(FormError::Precondition(format!(
                "index over the root extension is {idx} < {m}"
            )));
        }
        let psi = small_subform(&t, self.coeffs.clone(), a.value(), m as isize)?;
        let got = pinsep_index_values(&t, &psi, a.value())?;
        if psi.len() > t.p() as usize * m || got < m || !span_contains(&t, &self.coeffs, &psi) {
            return Err(FormError::InvariantViolation(format!(
                "small subform of dim {} has index {got}, wanted {m}",
                psi.len()
            )));
        }
        Ok(QuasilinearForm::from_values(&t, psi))
    }

    /// τ with ⟨⟨a⟩⟩ ⊗ τ ⊂ φ, built from D(τ) = ∩_i D(ψ) ∩ a^{p−i} D(φ) where ψ
    /// is the part of φ staying anisotropic over K(a^{1/p}).
    pub fn divisibility_extract(&self, a: &TowerElement) -> Result<Self, FormError> {
        let t = self.check_radicand(a)?;
        if !self.is_anisotropic() {
            return Err(FormError::IsotropicInput);
        }
        let p = t.p() as usize;
        let av = a.value();
        let psi = root_greedy(&t, &self.coeffs, av);
        let mut tau: Option<Vec<Value>> = None;
        for i in 1..p {
            let api = t.v_pow(av, (p - i) as u64);
            let shifted: Vec<Value> = self.coeffs.iter().map(|c| t.v_mul(c, &api)).collect();
            let vi = intersection_values(&t, &psi, &shifted);
            let next = match tau {
                None => vi,
                Some(prev) if prev.is_empty() || vi.is_empty() => Vec::new(),
                Some(prev) => intersection_values(&t, &prev, &vi),
            };
            tau = Some(next);
        }
        let tau = tau.unwrap_or_default();
        let pf = pfister_values(&t, std::slice::from_ref(av));
        let mut multiples = Vec::new();
        for b in &tau {
            for e in &pf {
                multiples.push(t.v_mul(e, b));
            }
        }
        if !span_contains(&t, &self.coeffs, &multiples) {
            return Err(FormError::InvariantViolation("⟨⟨a⟩⟩ ⊗ τ is not a subform".into()));
        }
        let i0 = pinsep_index_values(&t, &self.coeffs, av)?;
        if p == 2 {
            if tau.len() != i0 {
                return Err(FormError::InvariantViolation(format!(
                    "dim τ = {} but index over the root extension is {i0}",
                    tau.len()
                )));
            }
        } else {
            let pp = p as isize;
            let bound = (pp * pp - pp - 1) * i0 as isize - (pp * pp - 2 * pp) * self.dim() as isize;
            if bound >= 1 && (tau.len() as isize) < bound {
                return Err(FormError::InvariantViolation(format!(
                    "dim τ = {} below the guaranteed {bound}",
                    tau.len()
                )));
            }
        }
        Ok(QuasilinearForm::from_values(&t, tau))
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self.coeffs.iter().map(|c| self.tower.render_value(c)).collect();
        format!("<{}>", parts.join(", "))
    }
}

pub(crate) fn defect_values(t: &FieldTower, coeffs: &[Value]) -> usize {
    let nz: Vec<Value> = coeffs.iter().filter(|v| !v.is_zero()).cloned().collect();
    if nz.is_empty() {
        return coeffs.len();
    }
    coeffs.len() - ppower_span_rank_values(t, &nz)
}

/// All products m·g^e for m in `monomials`, e in 0..p, ordered by e then m.
fn expand_monomials(t: &FieldTower, monomials: &[Value], g: &Value) -> Vec<Value> {
    let mut out = monomials.to_vec();
    let mut ge = Value::one(t.modulus());
    for _ in 1..t.p() {
        ge = t.v_mul(&ge, g);
        out.extend(monomials.iter().map(|m| t.v_mul(m, &ge)));
    }
    out
}

/// Coefficients of ⟨⟨g_1,…,g_n⟩⟩ = ⊗ ⟨1, g_i, …, g_i^{p−1}⟩ in tensor order.
pub(crate) fn pfister_values(t: &FieldTower, gens: &[Value]) -> Vec<Value> {
    let mut coeffs = vec![Value::one(t.modulus())];
    for g in gens {
        let mut powers = vec![Value::one(t.modulus())];
        for _ in 1..t.p() {
            powers.push(t.v_mul(powers.last().unwrap(), g));
        }
        let mut next = Vec::with_capacity(coeffs.len() * powers.len());
        for c in &coeffs {
            for e in &powers {
                next.push(t.v_mul(c, e));
            }
        }
        coeffs = next;
    }
    coeffs
}

fn quasi_pfister_values(t: &Arc<FieldTower>, gens: &[Value]) -> QuasilinearForm {
    QuasilinearForm::from_values(t, pfister_values(t, gens))
}

/// ⟨⟨a_1,…,a_n⟩⟩; the empty list gives ⟨1⟩.
pub fn quasi_pfister(tower: &Arc<FieldTower>, gens: &[TowerElement]) -> Result<QuasilinearForm, FormError> {
    let mut t = Arc::clone(tower);
    for g in gens {
        t = Arc::clone(crate::fieldtower::common_tower_of(&t, g.tower())?);
    }
    let values: Vec<Value> = gens.iter().map(|g| g.value().clone()).collect();
    Ok(quasi_pfister_values(&t, &values))
}

/// Whether every element of `sub` lies in the K^p-span of `gens`.
pub(crate) fn span_contains(t: &FieldTower, gens: &[Value], sub: &[Value]) -> bool {
    let nz: Vec<Value> = gens.iter().filter(|v| !v.is_zero()).cloned().collect();
    let extra: Vec<Value> = sub.iter().filter(|v| !v.is_zero()).cloned().collect();
    if extra.is_empty() {
        return true;
    }
    if nz.is_empty() {
        return false;
    }
    let mut all = nz.clone();
    all.extend(extra);
    let profile = pivot_profile(t, &all);
    !profile[nz.len()..].iter().any(|k| *k)
}

/// ⟨⟨a⟩⟩ ⊗ φ with coefficient order i·p + e (a block per coefficient of φ).
fn root_tensor(t: &FieldTower, coeffs: &[Value], a: &Value) -> Vec<Value> {
    let pf = pfister_values(t, std::slice::from_ref(a));
    let mut out = Vec::with_capacity(coeffs.len() * pf.len());
    for c in coeffs {
        for e in &pf {
            out.push(t.v_mul(c, e));
        }
    }
    out
}

pub(crate) fn pinsep_index_values(t: &FieldTower, coeffs: &[Value], a: &Value) -> Result<usize, FormError> {
    let i0 = defect_values(t, &root_tensor(t, coeffs, a));
    let p = t.p() as usize;
    if !i0.is_multiple_of(p) {
        return Err(FormError::InvariantViolation(format!(
            "defect index {i0} of ⟨⟨a⟩⟩ ⊗ φ is not divisible by p"
        )));
    }
    Ok(i0 / p)
}

/// Coefficients of φ kept by the greedy over K(a^{1/p})^p = K^p(a): a_i is kept
/// iff the block a_i·⟨1, a, …, a^{p−1}⟩ raises the rank.
pub(crate) fn root_greedy(t: &FieldTower, coeffs: &[Value], a: &Value) -> Vec<Value> {
    let nz: Vec<Value> = coeffs.iter().filter(|v| !v.is_zero()).cloned().collect();
    if nz.is_empty() {
        return nz;
    }
    let tens = root_tensor(t, &nz, a);
    pivot_profile(t, &tens)
        .chunks(t.p() as usize)
        .map(|g| g.iter().any(|k| *k))
        .collect::<Vec<_>>()
        .into_iter()
        .zip(nz)
        .filter(|(k, _)| *k)
        .map(|(_, v)| v)
        .collect()
}

/// The inductive construction: split off the support σ of one isotropic vector
/// over K(a^{1/p}), then recurse on the part of φ still relevant.
fn small_subform(t: &FieldTower, phi: Vec<Value>, a: &Value, m: isize) -> Result<Vec<Value>, FormError> {
    let p = t.p() as usize;
    if m <= 0 {
        return Ok(Vec::new());
    }
    if phi.len() <= p * m as usize {
        return Ok(phi);
    }
    let n = phi.len();
    // Columns ordered e·n + i: kernel vector x gives w_i = Σ_e x_{e,i} a^{e/p}.
    let pf = pfister_values(t, std::slice::from_ref(a));
    let mut cols = Vec::with_capacity(n * p);
    for e in &pf {
        for c in &phi {
            cols.push(vec![t.v_mul(e, c)]);
        }
    }
    let kernel = kernel_values(t, &cols);
    let x = kernel
        .first()
        .ok_or_else(|| FormError::InvariantViolation("no isotropic vector over the root extension".into()))?;
    let vs: Vec<Vec<Value>> = (0..p).map(|e| x[e * n..(e + 1) * n].to_vec()).collect();
    let u_idx = independent_subset(t, &vs);
    let u_basis: Vec<Vec<Value>> = u_idx.iter().map(|&i| vs[i].clone()).collect();
    let eval = |u: &[Value]| -> Value {
        u.iter().zip(&phi).fold(t.zero_value(), |acc, (ui, ai)| {
            if ui.is_zero() {
                acc
            } else {
                t.v_add(&acc, &t.v_mul(ai, &t.v_frobenius(ui)))
            }
        })
    };
    let sigma: Vec<Value> = u_basis.iter().map(|u| eval(u)).collect();
    if m == 1 {
        return Ok(sigma);
    }
    // Complement of U spanned by standard basis vectors.
    let mut vecs = u_basis.clone();
    let mut tau = Vec::new();
    for i in 0..n {
        let mut e = vec![t.zero_value(); n];
        e[i] = Value::one(t.modulus());
        vecs.push(e);
        if independent_subset(t, &vecs).len() == vecs.len() {
            tau.push(phi[i].clone());
        } else {
            vecs.pop();
        }
    }
    let eta = root_greedy(t, &sigma, a);
    let rho_dim = sigma.len() - eta.len();
    let mut gamma = eta;
    gamma.extend(tau);
    let psi_prime = small_subform(t, gamma, a, m - rho_dim as isize)?;
    let mut both = psi_prime;
    both.extend(sigma);
    let kept = greedy_independent(t, &both);
    Ok(kept.into_iter().map(|i| both[i].clone()).collect())
}
