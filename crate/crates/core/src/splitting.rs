//! Standard splitting towers and patterns, quasi-Pfister neighbours, h_qp.

use std::sync::Arc;

use serde::Serialize;

use crate::fieldtower::{FieldTower, TowerError};
use crate::forms::{FormError, QuasilinearForm};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SplittingError {
    #[error("form is completely split (norm degree 1)")]
    CompletelySplit,
    #[error("anisotropic part has dimension one")]
    DimensionOne,
    #[error("resource cap {cap} exceeded: limit {limit}, needed {needed}")]
    ResourceCap {
        cap: &'static str,
        limit: usize,
        needed: usize,
    },
    #[error("splitting self-check failed: {0}")]
    SelfCheck(String),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

/// Limits on the presentation size of a splitting tower.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TowerCaps {
    pub max_vars: usize,
    pub max_roots: usize,
}

impl Default for TowerCaps {
    fn default() -> Self {
        TowerCaps {
            max_vars: 24,
            max_roots: 8,
        }
    }
}

/// One level F_r of the tower with the anisotropic kernel φ_r over it.
#[derive(Debug, Clone)]
pub struct TowerLevel {
    pub field: Arc<FieldTower>,
    pub form: QuasilinearForm,
}

/// Invariants read off a standard splitting tower. Optional fields are absent
/// for completely split forms (height 0).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplittingReport {
    pub dim: usize,
    pub i0: usize,
    pub pattern: Vec<usize>,
    pub indices: Vec<usize>,
    pub height: usize,
    pub ndeg: usize,
    pub hqp: Option<usize>,
    pub qpn: Option<bool>,
    pub izh_dim: Option<usize>,
    pub maximal: Option<bool>,
    /// QPN flag of φ_r for r < height.
    #[serde(skip)]
    pub qpn_flags: Vec<bool>,
}

impl SplittingReport {
    pub fn i1(&self) -> Option<usize> {
        self.indices.first().copied()
    }

    /// s̃p: the pattern with the first entry dropped.
    pub fn reduced_pattern(&self) -> &[usize] {
        &self.pattern[1.min(self.pattern.len())..]
    }
}

/// Exponent k with p^k = n, when n is a power of p.
pub fn log_p(n: usize, p: usize) -> Option<usize> {
    let mut k = 0;
    let mut q = 1;
    while q < n {
        q *= p;
        k += 1;
    }
    (q == n).then_some(k)
}

/// The unique n with p^n < d ≤ p^{n+1}, for d ≥ 2.
pub fn neighbour_exponent(d: usize, p: usize) -> usize {
    let mut n = 0;
    let mut q = p;
    while q < d {
        q *= p;
        n += 1;
    }
    n
}

/// h(φ) = log_p ndeg φ.
pub fn height(phi: &QuasilinearForm) -> Result<usize, SplittingError> {
    let ndeg = phi.norm_degree()?;
    log_p(ndeg, phi.tower().p() as usize)
        .ok_or_else(|| SplittingError::SelfCheck(format!("norm degree {ndeg} is not a power of p")))
}

/// Whether φ_an is similar to a subform of a quasi-Pfister form of dimension
/// p^{n+1} where p^n < dim φ_an ≤ p^{n+1}.
pub fn qpn_test(phi: &QuasilinearForm) -> Result<bool, SplittingError> {
    let an = phi.anisotropic_part();
    if an.dim() < 2 {
        return Err(SplittingError::DimensionOne);
    }
    let p = phi.tower().p() as usize;
    Ok(height(&an)? == neighbour_exponent(an.dim(), p) + 1)
}

pub fn hqp(phi: &QuasilinearForm, caps: TowerCaps) -> Result<usize, SplittingError> {
    if phi.anisotropic_part().dim() < 2 {
        return Err(SplittingError::DimensionOne);
    }
    let (_, report) = splitting_tower(phi, caps)?;
    report.hqp.ok_or(SplittingError::DimensionOne)
}

pub fn max_splitting_test(phi: &QuasilinearForm, caps: TowerCaps) -> Result<bool, SplittingError> {
    if phi.anisotropic_part().dim() < 2 {
        return Err(SplittingError::DimensionOne);
    }
    let (_, report) = splitting_tower(phi, caps)?;
    report.maximal.ok_or(SplittingError::DimensionOne)
}

pub(crate) fn fresh_name(tower: &FieldTower, base: String) -> String {
    let mut name = base;
    while tower.has_name(&name) {
        name.push('_');
    }
    name
}

/// F(φ): adjoin x_2..x_n and a p-th root of (Σ_{i≥2} a_i x_i^p)/a_1, where
/// ⟨a_1..a_n⟩ = φ_an. Returns the new tower and φ over it.
pub fn function_field(phi: &QuasilinearForm) -> Result<(Arc<FieldTower>, QuasilinearForm), SplittingError> {
    if phi.is_zero_form() {
        return Err(FormError::ZeroForm.into());
    }
    if phi.dim() < 2 {
        return Err(SplittingError::DimensionOne);
    }
    let an = phi.anisotropic_part();
    if an.dim() < 2 {
        return Err(SplittingError::CompletelySplit);
    }
    let tower = generic_point(&an)?;
    let lifted = phi.lift_to(&tower)?;
    Ok((tower, lifted))
}

fn generic_point(an: &QuasilinearForm) -> Result<Arc<FieldTower>, SplittingError> {
    let level = an.tower().height() + 1;
    let mut tower = Arc::clone(an.tower());
    let mut xs = Vec::new();
    for i in 2..=an.dim() {
        let name = fresh_name(&tower, format!("x{level}_{i}"));
        tower = tower.adjoin_transcendental(&name)?;
        xs.push(name);
    }
    let p = tower.p() as u64;
    let coeffs = an.values();
    let mut sum = tower.zero_value();
    for (a, x) in coeffs[1..].iter().zip(&xs) {
        let xv = tower.var(x)?.into_value();
        sum = tower.v_add(&sum, &tower.v_mul(a, &tower.v_pow(&xv, p)));
    }
    let inv = tower.v_inv(&coeffs[0]).map_err(TowerError::from)?;
    let radicand = tower.v_mul(&sum, &inv);
    let root = fresh_name(&tower, format!("r{level}"));
    Ok(tower.push_root(&root, radicand))
}

pub(crate) fn check_caps(
    tower: &FieldTower,
    extra_vars: usize,
    caps: TowerCaps,
) -> Result<(), SplittingError> {
    let vars = tower.num_vars() + extra_vars;
    if vars > caps.max_vars {
        return Err(SplittingError::ResourceCap {
            cap: "max-vars",
            limit: caps.max_vars,
            needed: vars,
        });
    }
    let roots = tower.height() + 1;
    if roots > caps.max_roots {
        return Err(SplittingError::ResourceCap {
            cap: "max-roots",
            limit: caps.max_roots,
            needed: roots,
        });
    }
    Ok(())
}

/// The standard splitting tower F_0 ⊂ F_1 ⊂ … ⊂ F_h with kernels φ_r, and
/// the report of its invariants.
pub fn splitting_tower(
    phi: &QuasilinearForm,
    caps: TowerCaps,
) -> Result<(Vec<TowerLevel>, SplittingReport), SplittingError> {
    let p = phi.tower().p() as usize;
    let ndeg = phi.norm_degree()?;
    let expected_height = log_p(ndeg, p)
        .ok_or_else(|| SplittingError::SelfCheck(format!("norm degree {ndeg} is not a power of p")))?;
    let mut kernel = phi.anisotropic_part();
    let mut levels = vec![TowerLevel {
        field: Arc::clone(phi.tower()),
        form: kernel.clone(),
    }];
    while kernel.dim() > 1 {
        check_caps(kernel.tower(), kernel.dim() - 1, caps)?;
        let field = generic_point(&kernel)?;
        kernel = kernel.lift_to(&field)?.anisotropic_part();
        levels.push(TowerLevel {
            field,
            form: kernel.clone(),
        });
    }
    let pattern: Vec<usize> = levels.iter().map(|l| l.form.dim()).collect();
    let height = pattern.len() - 1;
    if height != expected_height {
        return Err(SplittingError::SelfCheck(format!(
            "tower height {height} differs from log_p of norm degree {ndeg}"
        )));
    }
    let indices: Vec<usize> = pattern.windows(2).map(|w| w[0] - w[1]).collect();
    // The tower of φ_r over F_r is the tail of this one, so h(φ_r) = h − r.
    let qpn_flags: Vec<bool> = pattern[..height]
        .iter()
        .enumerate()
        .map(|(r, &d)| height - r == neighbour_exponent(d, p) + 1)
        .collect();
    let an_dim = pattern[0];
    let (hqp, qpn, izh_dim, maximal) = if height == 0 {
        (None, None, None, None)
    } else {
        let n = neighbour_exponent(an_dim, p);
        let m = an_dim - p.pow(n as u32);
        (
            qpn_flags.iter().position(|&f| f),
            Some(qpn_flags[0]),
            Some(pattern[1] + 1),
            Some(indices[0] == m),
        )
    };
    let report = SplittingReport {
        dim: phi.dim(),
        i0: phi.dim() - an_dim,
        pattern,
        indices,
        height,
        ndeg,
        hqp,
        qpn,
        izh_dim,
        maximal,
        qpn_flags,
    };
    Ok((levels, report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_and_neighbour_exponent() {
        assert_eq!(log_p(8, 2), Some(3));
        assert_eq!(log_p(1, 3), Some(0));
        assert_eq!(log_p(6, 2), None);
        assert_eq!(neighbour_exponent(2, 2), 0);
        assert_eq!(neighbour_exponent(3, 2), 1);
        assert_eq!(neighbour_exponent(4, 2), 1);
        assert_eq!(neighbour_exponent(5, 2), 2);
        assert_eq!(neighbour_exponent(3, 3), 0);
        assert_eq!(neighbour_exponent(4, 3), 1);
    }
}
