//! Seeded instance generation. Every draw is a function of (seed, trial, salt).

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::fieldtower::{FieldTower, TowerElement};
use crate::forms::QuasilinearForm;
use crate::polyring::{Monomial, Polynomial, PrimeModulus};

use crate::splitting::{function_field, qpn_test};

use super::{Instance, LawError, LawId};

/// Shape of random forms over F_p(t_1..t_v).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenConfig {
    pub p: u32,
    pub vars: usize,
    pub dim_min: usize,
    pub dim_max: usize,
    /// Total degree bound for coefficients.
    pub max_degree: u32,
    /// Bound on the number of terms of each coefficient.
    pub max_terms: usize,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            p: 2,
            vars: 2,
            dim_min: 2,
            dim_max: 4,
            max_degree: 2,
            max_terms: 3,
            seed: 0,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), LawError> {
        PrimeModulus::new(self.p).map_err(|e| LawError::Config(e.to_string()))?;
        if self.vars == 0 || self.dim_min == 0 || self.max_terms == 0 {
            return Err(LawError::Config(
                "variable count, dimension and term bounds must be positive".into(),
            ));
        }
        if self.dim_min > self.dim_max {
            return Err(LawError::Config(format!(
                "empty dimension range {}..={}",
                self.dim_min, self.dim_max
            )));
        }
        Ok(())
    }

    /// F_p(t_1..t_v) with the standard variable names.
    pub fn base_field(&self) -> Result<Arc<FieldTower>, LawError> {
        self.validate()?;
        let p = PrimeModulus::new(self.p).map_err(|e| LawError::Config(e.to_string()))?;
        FieldTower::new(p, &var_names(self.vars)).map_err(|e| LawError::Config(e.to_string()))
    }
}

/// t, u, v, w, y, z, then t6, t7, …
pub fn var_names(n: usize) -> Vec<String> {
    const NAMES: [&str; 6] = ["t", "u", "v", "w", "y", "z"];
    (0..n)
        .map(|i| match NAMES.get(i) {
            Some(s) => s.to_string(),
            None => format!("t{i}"),
        })
        .collect()
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// The generator for one (seed, trial, salt) triple.
pub fn trial_rng(seed: u64, trial: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix(
        splitmix(seed) ^ splitmix(trial.wrapping_add(salt << 40)),
    ))
}

/// Exponent vectors over `vars` variables of total degree ≤ d.
fn monomials(vars: usize, d: u32) -> Vec<Monomial> {
    fn go(prefix: &mut Vec<u32>, left: usize, budget: u32, out: &mut Vec<Monomial>) {
        if left == 0 {
            out.push(Monomial::from_exponents(prefix));
            return;
        }
        for e in 0..=budget {
            prefix.push(e);
            go(prefix, left - 1, budget - e, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), vars, d, &mut out);
    out
}

/// A nonzero polynomial in the first `vars` base variables of `tower`.
pub fn random_poly<R: Rng>(
    tower: &Arc<FieldTower>,
    vars: usize,
    max_degree: u32,
    max_terms: usize,
    rng: &mut R,
) -> TowerElement {
    let p = tower.modulus();
    let pool = monomials(vars, max_degree);
    loop {
        let k = rng.gen_range(1..=max_terms.min(pool.len()));
        let terms: Vec<(Monomial, u32)> = pool
            .choose_multiple(rng, k)
            .map(|m| (m.clone(), rng.gen_range(1..p.get())))
            .collect();
        let f = Polynomial::from_terms(p, terms);
        if !f.is_zero() {
            return TowerElement::from_value(tower, crate::fieldtower::Value::from_poly(f));
        }
    }
}

/// Σ_e f_e · r^e over at most `support` root monomials r^e of `tower`, divided
/// by a random base polynomial of degree ≤ 1. The f_e are `random_poly` draws;
/// the result may be zero.
pub fn random_element<R: Rng>(
    tower: &Arc<FieldTower>,
    max_degree: u32,
    max_terms: usize,
    support: usize,
    rng: &mut R,
) -> TowerElement {
    let vars = tower.num_vars();
    let p = tower.p() as u64;
    let roots: Vec<TowerElement> = tower
        .roots()
        .iter()
        .map(|r| tower.var(&r.name).expect("root of this tower"))
        .collect();
    let mut acc = tower.zero();
    for _ in 0..rng.gen_range(1..=support.max(1)) {
        let mut term = random_poly(tower, vars, max_degree, max_terms, rng);
        for r in &roots {
            let e = rng.gen_range(0..p);
            if e > 0 {
                term = term.mul(&r.pow(e)).expect("same tower");
            }
        }
        acc = acc.add(&term).expect("same tower");
    }
    let den = random_poly(tower, vars, 1, 2, rng);
    acc.div(&den).expect("nonzero denominator")
}

/// A coefficient drawn from the configured bounds.
pub(crate) fn random_coeff<R: Rng>(tower: &Arc<FieldTower>, config: &GenConfig, rng: &mut R) -> TowerElement {
    random_poly(tower, config.vars, config.max_degree, config.max_terms, rng)
}

pub(crate) fn random_form_with<R: Rng>(
    tower: &Arc<FieldTower>,
    config: &GenConfig,
    rng: &mut R,
) -> QuasilinearForm {
    let dim = rng.gen_range(config.dim_min..=config.dim_max);
    let coeffs: Vec<TowerElement> = (0..dim).map(|_| random_coeff(tower, config, rng)).collect();
    QuasilinearForm::new(&coeffs).expect("coefficients share one tower")
}

/// The random form of a trial: dimension uniform in the configured range, each
/// coefficient a nonzero polynomial within the degree and term bounds.
pub fn gen_random_form(config: &GenConfig, trial: u64) -> Result<QuasilinearForm, LawError> {
    let tower = config.base_field()?;
    let mut rng = trial_rng(config.seed, trial, 0);
    Ok(random_form_with(&tower, config, &mut rng))
}

/// An anisotropic random form: coefficients are drawn one at a time and kept
/// when they leave the span of those already kept. Returns None if the
/// target dimension (uniform in the configured range) is not reached within
/// `attempts` draws.
pub fn gen_anisotropic_form(
    config: &GenConfig,
    trial: u64,
    attempts: usize,
) -> Result<Option<QuasilinearForm>, LawError> {
    let tower = config.base_field()?;
    let mut rng = trial_rng(config.seed, trial, 1);
    let dim = rng.gen_range(config.dim_min..=config.dim_max);
    let mut kept: Vec<TowerElement> = Vec::new();
    for _ in 0..attempts {
        if kept.len() == dim {
            break;
        }
        let c = random_coeff(&tower, config, &mut rng);
        let mut candidate = kept.clone();
        candidate.push(c);
        let form = QuasilinearForm::new(&candidate).expect("coefficients share one tower");
        if form.is_anisotropic() {
            kept = candidate;
        }
    }
    if kept.len() < dim {
        return Ok(None);
    }
    Ok(Some(QuasilinearForm::new(&kept).expect("nonempty")))
}

/// A random element outside K^p of degree ≤ max(1, bound), or None when the
/// bounds only allow constants.
pub(crate) fn random_radicand<R: Rng>(
    tower: &Arc<FieldTower>,
    config: &GenConfig,
    rng: &mut R,
) -> Option<TowerElement> {
    let degree = config.max_degree.max(1);
    for _ in 0..64 {
        let a = random_poly(tower, config.vars, degree, config.max_terms, rng);
        if !a.is_pth_power() {
            return Some(a);
        }
    }
    None
}

/// Radicands sampled for laws quantifying over F(a^(1/p)).
const OUTER_RADICANDS: usize = 3;
/// Redraws allowed when a law wants a particular kind of form.
const SEARCH_ATTEMPTS: usize = 64;

pub(crate) fn instance(law: LawId, config: &GenConfig, trial: u64) -> Result<Instance, LawError> {
    let tower = config.base_field()?;
    let mut rng = trial_rng(config.seed, trial, 2 + law as u64);
    let mut inst = Instance::new(gen_random_form(config, trial)?);
    match law {
        LawId::FirstComparison => {
            if let Some(form) = search(&tower, config, &mut rng, |an| Ok(an.dim() >= 2 && !qpn_test(an)?))? {
                inst.form = form;
            }
        }
        LawId::MaxSplittingQpn => {
            if let Some(form) = gen_anisotropic_form(config, trial, SEARCH_ATTEMPTS)? {
                inst.form = form;
            }
        }
        LawId::Compressibility | LawId::Functoriality | LawId::NdegFunctoriality => {
            let psi = random_form_with(&tower, config, &mut rng).anisotropic_part();
            if let Some(phi) = isotropic_partner(&tower, config, &psi, &mut rng)? {
                inst.form = phi;
            }
            inst.partner = Some(psi);
        }
        _ => {}
    }
    attach_aux(law, &mut inst, config, &mut rng);
    Ok(inst)
}

/// Fill in the auxiliary data `law` consumes and `inst` lacks. Draws are
/// polynomials in the first `config.vars` variables of the instance's tower.
pub(crate) fn attach_aux<R: Rng>(law: LawId, inst: &mut Instance, config: &GenConfig, rng: &mut R) {
    let tower = Arc::clone(inst.tower());
    let wanted = match law {
        LawId::OuterExcellent => OUTER_RADICANDS,
        LawId::SecondComparison
        | LawId::I1Comparison
        | LawId::DivisibilityEquiv
        | LawId::MultIndexConsistency => 1,
        _ => 0,
    };
    if inst.radicands.is_empty() {
        inst.radicands = (0..wanted)
            .filter_map(|_| random_radicand(&tower, config, rng))
            .collect();
    }
    match law {
        LawId::OuterExcellent | LawId::Compressibility | LawId::Functoriality | LawId::NdegFunctoriality
            if inst.partner.is_none() =>
        {
            inst.partner = Some(random_form_with(&tower, config, rng));
        }
        LawId::NeighbourSsp | LawId::SubformTrichotomy | LawId::ScalarInvariance => {
            if inst.scalar.is_none() {
                inst.scalar = Some(random_coeff(&tower, config, rng));
            }
            inst.choice = rng.gen();
        }
        _ => {}
    }
}

/// The anisotropic part of the first random form accepted by `accept`.
fn search<R: Rng>(
    tower: &Arc<FieldTower>,
    config: &GenConfig,
    rng: &mut R,
    accept: impl Fn(&QuasilinearForm) -> Result<bool, crate::splitting::SplittingError>,
) -> Result<Option<QuasilinearForm>, LawError> {
    for _ in 0..SEARCH_ATTEMPTS {
        let an = random_form_with(tower, config, rng).anisotropic_part();
        match accept(&an) {
            Ok(true) => return Ok(Some(an)),
            Ok(false) => {}
            Err(e) => return Err(LawError::Config(e.to_string())),
        }
    }
    Ok(None)
}

/// An anisotropic φ that becomes isotropic over F(ψ). Any subform ψ' ⊂ ψ with
/// dim ψ' > dim ψ_1 is isotropic over F(ψ), so φ = c·(ψ' ⊕ extras) works; the
/// extras are either random or drawn from a_1·D(ψ_qp).
fn isotropic_partner<R: Rng>(
    tower: &Arc<FieldTower>,
    config: &GenConfig,
    psi: &QuasilinearForm,
    rng: &mut R,
) -> Result<Option<QuasilinearForm>, LawError> {
    if psi.dim() < 2 {
        return Ok(None);
    }
    let (_, lifted) = function_field(psi).map_err(|e| LawError::Config(e.to_string()))?;
    let dim1 = psi.dim() - lifted.defect_index();
    let size = rng.gen_range(dim1 + 1..=psi.dim());
    let coeffs = psi.coeffs();
    let mut chosen: Vec<TowerElement> = coeffs.choose_multiple(rng, size).cloned().collect();
    let extras = rng.gen_range(0..=2usize);
    if rng.gen_bool(0.5) {
        chosen.extend((0..extras).map(|_| random_coeff(tower, config, rng)));
    } else {
        // a_i a_j / a_1 = a_1 (a_i/a_1)(a_j/a_1) lies in a_1·D(ψ_qp).
        for _ in 0..extras {
            let (ai, aj) = (
                coeffs.choose(rng).expect("dim ≥ 2"),
                coeffs.choose(rng).expect("dim ≥ 2"),
            );
            chosen.push(ai.mul(aj)?.div(&coeffs[0])?);
        }
    }
    let scalar = random_coeff(tower, config, rng);
    let phi = QuasilinearForm::new(&chosen)?.scale(&scalar)?;
    Ok(Some(phi.anisotropic_part()))
}
