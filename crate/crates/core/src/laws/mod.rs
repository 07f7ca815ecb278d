//! Executable laws over generated instances.
//!
//! Each law is a predicate on a form (plus auxiliary data: radicands, a
//! scalar, a partner form). Instances are generated deterministically from
//! (seed, trial), serialize to text, and replay to the same verdict.

mod checks;
mod gen;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::fieldtower::{FieldTower, TowerElement, TowerError};
use crate::forms::{FormError, QuasilinearForm};
use crate::splitting::TowerCaps;
use crate::text::{parse_element, parse_tower, TextError};

pub use gen::{
    gen_anisotropic_form, gen_random_form, random_element, random_poly, trial_rng, var_names, GenConfig,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LawError {
    #[error("invalid generator configuration: {0}")]
    Config(String),
    #[error("unknown law `{0}`")]
    UnknownLaw(String),
    #[error("malformed instance record: {0}")]
    Record(String),
    #[error(transparent)]
    Text(#[from] TextError),
    #[error(transparent)]
    Form(#[from] FormError),
    #[error(transparent)]
    Tower(#[from] TowerError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LawId {
    HoffmannBound,
    I1Dichotomy,
    OuterExcellent,
    MonotoneIndices,
    PfisterSp,
    QpnEquiv,
    NeighbourSsp,
    SubformTrichotomy,
    FirstComparison,
    SecondComparison,
    I2GeMin,
    I1Comparison,
    DivisibilityEquiv,
    MultIndexConsistency,
    ScalarInvariance,
    TranscendentalStability,
    Compressibility,
    Functoriality,
    MaxSplittingQpn,
    NdegFunctoriality,
}

/// Whether a law asserts anything at a given characteristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Applicability {
    /// Violations are failures.
    Asserted,
    /// Violations are recorded as candidates, never as failures.
    Exploration,
    /// Every trial is vacuous.
    NotApplicable,
}

impl LawId {
    pub const ALL: [LawId; 20] = [
        LawId::HoffmannBound,
        LawId::I1Dichotomy,
        LawId::OuterExcellent,
        LawId::MonotoneIndices,
        LawId::PfisterSp,
        LawId::QpnEquiv,
        LawId::NeighbourSsp,
        LawId::SubformTrichotomy,
        LawId::FirstComparison,
        LawId::SecondComparison,
        LawId::I2GeMin,
        LawId::I1Comparison,
        LawId::DivisibilityEquiv,
        LawId::MultIndexConsistency,
        LawId::ScalarInvariance,
        LawId::TranscendentalStability,
        LawId::Compressibility,
        LawId::Functoriality,
        LawId::MaxSplittingQpn,
        LawId::NdegFunctoriality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LawId::HoffmannBound => "HOFFMANN_BOUND",
            LawId::I1Dichotomy => "I1_DICHOTOMY",
            LawId::OuterExcellent => "OUTER_EXCELLENT",
            LawId::MonotoneIndices => "MONOTONE_INDICES",
            LawId::PfisterSp => "PFISTER_SP",
            LawId::QpnEquiv => "QPN_EQUIV",
            LawId::NeighbourSsp => "NEIGHBOUR_SSP",
            LawId::SubformTrichotomy => "SUBFORM_TRICHOTOMY",
            LawId::FirstComparison => "FIRST_COMPARISON",
            LawId::SecondComparison => "SECOND_COMPARISON",
            LawId::I2GeMin => "I2_GE_MIN",
            LawId::I1Comparison => "I1_COMPARISON",
            LawId::DivisibilityEquiv => "DIVISIBILITY_EQUIV",
            LawId::MultIndexConsistency => "MULT_INDEX_CONSISTENCY",
            LawId::ScalarInvariance => "SCALAR_INVARIANCE",
            LawId::TranscendentalStability => "TRANSCENDENTAL_STABILITY",
            LawId::Compressibility => "COMPRESSIBILITY",
            LawId::Functoriality => "FUNCTORIALITY",
            LawId::MaxSplittingQpn => "MAX_SPLITTING_QPN",
            LawId::NdegFunctoriality => "NDEG_FUNCTORIALITY",
        }
    }

    /// The predicate, for φ anisotropic with dim φ = p^n + m, 1 ≤ m ≤ p^{n+1} − p^n.
    pub fn statement(self) -> &'static str {
        match self {
            LawId::HoffmannBound => "i1 <= m",
            LawId::I1Dichotomy => "p = 2: i1 = m or i1 <= m/2",
            LawId::OuterExcellent => {
                "p = 2: for each sampled extension L, i0(phi_L) < m implies i0(phi_L) <= m - i1"
            }
            LawId::MonotoneIndices => "p = 2: i1 <= i2 <= ... <= i_hqp",
            LawId::PfisterSp => {
                "phi similar to a quasi-Pfister form iff sp = (p^h, ..., p, 1) iff dim phi_1 = dim phi / p"
            }
            LawId::QpnEquiv => {
                "h = n + 1 iff the reduced pattern is (p^n, ..., p, 1) iff phi_1 is similar to a quasi-Pfister form"
            }
            LawId::NeighbourSsp => {
                "a scaled subform of codimension < i1 has the same reduced pattern"
            }
            LawId::SubformTrichotomy => {
                "for psi of codimension one: h(phi) = h(psi) + 1 with i1 = 1 and reduced pattern of phi = sp(psi); \
                 or equal heights with i1 > 1 and equal reduced patterns; \
                 or equal heights with i1 = 1 and the reduced pattern of phi = sp(psi) minus its s-th entry"
            }
            LawId::FirstComparison => {
                "over F(phi_qp) the pattern loses exactly its hqp-th entry and hqp strictly drops"
            }
            LawId::SecondComparison => {
                "i0(phi over L(phi)) - i1 >= min(i0(phi_L), floor(dim phi_1 / p)) for L = F(a^(1/p))"
            }
            LawId::I2GeMin => "i2 >= min(i1, floor(dim phi_1 / p))",
            LawId::I1Comparison => {
                "i0(phi_L) <= floor(dim phi_1 / p) implies i1((phi_L)_an) >= i1 for L = F(a^(1/p))"
            }
            LawId::DivisibilityEquiv => {
                "p = 2: i0 over F(a^(1/2)) >= k iff some tau of dim k has <<a>> tensor tau inside phi"
            }
            LawId::MultIndexConsistency => {
                "i0 over F(a^(1/p)) via <<a>> tensor phi agrees with explicit root adjunction"
            }
            LawId::ScalarInvariance => "the splitting report is unchanged by scaling",
            LawId::TranscendentalStability => {
                "anisotropy, norm degree and pattern survive a purely transcendental extension"
            }
            LawId::Compressibility => {
                "phi isotropic over F(psi) implies dim_Izh psi <= dim phi, with psi isotropic over F(phi) at equality"
            }
            LawId::Functoriality => {
                "phi isotropic over F(psi) implies reduced sp(psi) <= reduced sp(phi), \
                 with equality iff psi is isotropic over F(phi)"
            }
            LawId::MaxSplittingQpn => {
                "maximal splitting implies quasi-Pfister neighbour on the dimension window \
                 p^(n+1) - p^(n-1) <= dim <= p^(n+1), and for p = 2 also 2^n + 2^(n-2) < dim <= 2^(n+1)"
            }
            LawId::NdegFunctoriality => "phi isotropic over F(psi) implies psi_qp inside phi_qp",
        }
    }

    pub fn applicability(self, p: u32) -> Applicability {
        match self {
            LawId::I1Dichotomy
            | LawId::OuterExcellent
            | LawId::MonotoneIndices
            | LawId::DivisibilityEquiv
                if p != 2 =>
            {
                Applicability::NotApplicable
            }
            LawId::Functoriality if p > 3 => Applicability::Exploration,
            _ => Applicability::Asserted,
        }
    }
}

impl fmt::Display for LawId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LawId {
    type Err = LawError;

    fn from_str(s: &str) -> Result<Self, LawError> {
        let key = s.trim().to_ascii_uppercase().replace('-', "_");
        LawId::ALL
            .into_iter()
            .find(|l| l.name() == key)
            .ok_or_else(|| LawError::UnknownLaw(s.to_string()))
    }
}

/// A law's input: the form and whatever auxiliary data the law consumes.
/// All elements live over the same base tower.
#[derive(Debug, Clone)]
pub struct Instance {
    pub form: QuasilinearForm,
    /// Elements outside K^p, each defining F(a^(1/p)).
    pub radicands: Vec<TowerElement>,
    pub scalar: Option<TowerElement>,
    /// Free choice resolved at check time (which coefficient to drop, how many).
    pub choice: u64,
    pub partner: Option<QuasilinearForm>,
}

impl Instance {
    pub fn new(form: QuasilinearForm) -> Self {
        Instance {
            form,
            radicands: Vec::new(),
            scalar: None,
            choice: 0,
            partner: None,
        }
    }

    pub fn tower(&self) -> &Arc<FieldTower> {
        self.form.tower()
    }

    pub fn to_record(&self) -> InstanceRecord {
        let render = |f: &QuasilinearForm| f.coeffs().iter().map(TowerElement::render).collect();
        InstanceRecord {
            tower: self.tower().to_text(),
            form: render(&self.form),
            radicands: self.radicands.iter().map(TowerElement::render).collect(),
            scalar: self.scalar.as_ref().map(TowerElement::render),
            choice: self.choice,
            partner: self.partner.as_ref().map(render),
        }
    }

    pub fn from_record(record: &InstanceRecord) -> Result<Self, LawError> {
        let tower = parse_tower(&record.tower)?;
        let form = |coeffs: &[String]| -> Result<QuasilinearForm, LawError> {
            if coeffs.is_empty() {
                return Ok(QuasilinearForm::empty(&tower));
            }
            let elems = coeffs
                .iter()
                .map(|c| parse_element(&tower, c))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(QuasilinearForm::new(&elems)?)
        };
        Ok(Instance {
            form: form(&record.form)?,
            radicands: record
                .radicands
                .iter()
                .map(|c| parse_element(&tower, c))
                .collect::<Result<_, _>>()?,
            scalar: record
                .scalar
                .as_ref()
                .map(|c| parse_element(&tower, c))
                .transpose()?,
            choice: record.choice,
            partner: record.partner.as_deref().map(form).transpose()?,
        })
    }
}

/// Text form of an [`Instance`]: the tower presentation and canonical
/// renderings of every element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub tower: String,
    pub form: Vec<String>,
    pub radicands: Vec<String>,
    pub scalar: Option<String>,
    pub choice: u64,
    pub partner: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", content = "detail", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Vacuous(String),
    Failure(String),
    Skipped(String),
    Candidate(String),
}

impl Verdict {
    pub fn is_failure(&self) -> bool {
        matches!(self, Verdict::Failure(_))
    }
}

/// One evaluated trial with enough data to replay it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub law: LawId,
    pub seed: u64,
    pub trial: u64,
    pub verdict: Verdict,
    pub instance: InstanceRecord,
}

/// Aggregate over trials: passes + vacuous + skipped + failures + candidates = trials.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LawReport {
    pub law: LawId,
    pub trials: u64,
    pub passes: u64,
    pub vacuous: u64,
    pub skipped: u64,
    pub failures: Vec<TrialRecord>,
    pub candidates: Vec<TrialRecord>,
}

impl LawReport {
    pub fn new(law: LawId) -> Self {
        LawReport {
            law,
            trials: 0,
            passes: 0,
            vacuous: 0,
            skipped: 0,
            failures: Vec::new(),
            candidates: Vec::new(),
        }
    }

    pub fn record(&mut self, trial: TrialRecord) {
        self.trials += 1;
        match trial.verdict {
            Verdict::Pass => self.passes += 1,
            Verdict::Vacuous(_) => self.vacuous += 1,
            Verdict::Skipped(_) => self.skipped += 1,
            Verdict::Failure(_) => self.failures.push(trial),
            Verdict::Candidate(_) => self.candidates.push(trial),
        }
    }

    pub fn failed(&self) -> bool {
        !self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteConfig {
    pub gen: GenConfig,
    pub trials: u64,
    pub caps: TowerCaps,
}

/// Build the instance a law sees in a given trial.
pub fn gen_instance(law: LawId, config: &GenConfig, trial: u64) -> Result<Instance, LawError> {
    gen::instance(law, config, trial)
}

/// Supply whatever auxiliary data `law` needs and `instance` lacks, drawn
/// deterministically from `seed` over the instance's own tower (coefficient
/// bounds from [`GenConfig::default`]).
pub fn complete_instance(law: LawId, instance: &mut Instance, seed: u64) {
    let config = GenConfig {
        p: instance.tower().p(),
        vars: instance.tower().num_vars(),
        seed,
        ..GenConfig::default()
    };
    let mut rng = trial_rng(seed, 0, 2 + law as u64);
    gen::attach_aux(law, instance, &config, &mut rng);
}

/// Evaluate one law on one instance. Cap overruns become [`Verdict::Skipped`].
pub fn check_law(law: LawId, instance: &Instance, caps: TowerCaps) -> Verdict {
    checks::evaluate(law, instance, caps)
}

pub fn run_trial(
    law: LawId,
    config: &GenConfig,
    caps: TowerCaps,
    trial: u64,
) -> Result<TrialRecord, LawError> {
    let instance = gen_instance(law, config, trial)?;
    let verdict = check_law(law, &instance, caps);
    Ok(TrialRecord {
        law,
        seed: config.seed,
        trial,
        verdict,
        instance: instance.to_record(),
    })
}

/// All trials of one law, evaluated in parallel and returned in trial order.
pub fn run_law(law: LawId, suite: &SuiteConfig) -> Result<Vec<TrialRecord>, LawError> {
    suite.gen.validate()?;
    (0..suite.trials)
        .into_par_iter()
        .map(|t| run_trial(law, &suite.gen, suite.caps, t))
        .collect()
}

pub fn summarize(law: LawId, records: &[TrialRecord]) -> LawReport {
    let mut report = LawReport::new(law);
    for r in records {
        report.record(r.clone());
    }
    report
}

pub fn run_suite(laws: &[LawId], suite: &SuiteConfig) -> Result<Vec<LawReport>, LawError> {
    laws.iter()
        .map(|&law| Ok(summarize(law, &run_law(law, suite)?)))
        .collect()
}

/// Re-evaluate a recorded trial from its serialized instance.
pub fn replay(record: &TrialRecord, caps: TowerCaps) -> Result<Verdict, LawError> {
    let instance = Instance::from_record(&record.instance)?;
    Ok(check_law(record.law, &instance, caps))
}
