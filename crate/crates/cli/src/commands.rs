//! Command execution and the JSON shapes printed by each subcommand.

use std::fmt::Write as _;
use std::sync::Arc;

use qlf_core::fieldtower::{FieldTower, TowerError};
use qlf_core::forms::{FormError, QuasilinearForm};
use qlf_core::laws::{
    check_law, complete_instance, run_law, summarize, Instance, LawError, LawId, LawReport, SuiteConfig,
    TrialRecord, Verdict,
};
use qlf_core::polyring::{PolyError, PrimeModulus};
use qlf_core::splitting::{splitting_tower, SplittingError, SplittingReport, TowerCaps, TowerLevel};
use qlf_core::text::{parse_element, parse_form, parse_names, TextError};
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Cap(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Cap(_) => 3,
            CliError::Internal(_) => 1,
        }
    }
}

macro_rules! input_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Input(e.to_string())
            }
        }
    )*};
}
input_error!(TextError, PolyError, TowerError, FormError, LawError);

impl From<SplittingError> for CliError {
    fn from(e: SplittingError) -> Self {
        match e {
            SplittingError::ResourceCap { .. } => CliError::Cap(e.to_string()),
            SplittingError::Form(e) => e.into(),
            SplittingError::Tower(e) => e.into(),
            other => CliError::Internal(other.to_string()),
        }
    }
}

/// Process exit code for `check`: 1 if any asserted law failed, 3 if a trial
/// hit a resource cap, else 0.
pub fn report_code(reports: &[LawReport]) -> u8 {
    if reports.iter().any(LawReport::failed) {
        1
    } else if reports.iter().any(|r| r.skipped > 0) {
        3
    } else {
        0
    }
}

/// Field and form as given on the command line.
#[derive(Debug, Clone)]
pub struct FormSpec {
    pub tower: Arc<FieldTower>,
    pub form: QuasilinearForm,
}

/// Build F_p(vars) with the requested roots, then parse the form over it.
pub fn parse_form_spec(p: u32, vars: &str, adjoin: &[String], form: &str) -> Result<FormSpec, CliError> {
    let tower = parse_field(p, vars, adjoin)?;
    let form = parse_form(&tower, form)?;
    Ok(FormSpec { tower, form })
}

pub fn parse_field(p: u32, vars: &str, adjoin: &[String]) -> Result<Arc<FieldTower>, CliError> {
    let modulus = PrimeModulus::new(p)?;
    let names = parse_names(vars)?;
    let mut tower = FieldTower::new(modulus, &names)?;
    for item in adjoin {
        let (name, expr) = item
            .split_once('=')
            .ok_or_else(|| CliError::Input(format!("--adjoin expects NAME=EXPR, got `{item}`")))?;
        let radicand = parse_element(&tower, expr)?;
        tower = tower.adjoin_pth_root(&radicand, name.trim())?;
    }
    Ok(tower)
}

/// Form invariants followed by the splitting report, in a fixed key order.
#[derive(Debug, Serialize)]
pub struct Invariants {
    pub dim: usize,
    pub i0: usize,
    pub an_dim: usize,
    pub ndeg: usize,
    pub height: usize,
    pub pattern: Vec<usize>,
    pub indices: Vec<usize>,
    pub hqp: Option<usize>,
    pub qpn: Option<bool>,
    pub izh_dim: Option<usize>,
    pub maximal: Option<bool>,
}

impl From<&SplittingReport> for Invariants {
    fn from(r: &SplittingReport) -> Self {
        Invariants {
            dim: r.dim,
            i0: r.i0,
            an_dim: r.pattern[0],
            ndeg: r.ndeg,
            height: r.height,
            pattern: r.pattern.clone(),
            indices: r.indices.clone(),
            hqp: r.hqp,
            qpn: r.qpn,
            izh_dim: r.izh_dim,
            maximal: r.maximal,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Level {
    pub level: usize,
    pub field: String,
    pub kernel: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct TowerOutput {
    #[serde(flatten)]
    pub invariants: Invariants,
    pub levels: Vec<Level>,
}

fn nonzero(spec: &FormSpec) -> Result<(), CliError> {
    if spec.form.is_zero_form() {
        return Err(CliError::Input("form has no nonzero coefficient".into()));
    }
    Ok(())
}

pub fn invariants(spec: &FormSpec, caps: TowerCaps) -> Result<Invariants, CliError> {
    nonzero(spec)?;
    let (_, report) = splitting_tower(&spec.form, caps)?;
    Ok(Invariants::from(&report))
}

pub fn tower(spec: &FormSpec, caps: TowerCaps) -> Result<TowerOutput, CliError> {
    nonzero(spec)?;
    let (levels, report) = splitting_tower(&spec.form, caps)?;
    Ok(TowerOutput {
        invariants: Invariants::from(&report),
        levels: levels.iter().enumerate().map(|(i, l)| level(i, l)).collect(),
    })
}

fn level(index: usize, l: &TowerLevel) -> Level {
    Level {
        level: index,
        field: l.field.to_text(),
        kernel: l.form.coeffs().iter().map(|c| c.render()).collect(),
    }
}

/// Auxiliary data for `check`; anything missing is drawn from the seed.
#[derive(Debug, Default, Clone)]
pub struct AuxSpec {
    pub radicands: Vec<String>,
    pub scalar: Option<String>,
    pub partner: Option<String>,
    pub choice: Option<u64>,
}

pub fn check(
    law: LawId,
    spec: &FormSpec,
    aux: &AuxSpec,
    seed: u64,
    caps: TowerCaps,
) -> Result<(LawReport, Verdict), CliError> {
    nonzero(spec)?;
    let tower = &spec.tower;
    let mut inst = Instance::new(spec.form.clone());
    inst.radicands = aux
        .radicands
        .iter()
        .map(|s| parse_element(tower, s))
        .collect::<Result<_, _>>()?;
    if let Some(a) = inst.radicands.iter().find(|a| a.is_zero() || a.is_pth_power()) {
        return Err(CliError::Input(format!("radicand {a} is zero or a p-th power")));
    }
    inst.scalar = aux
        .scalar
        .as_deref()
        .map(|s| parse_element(tower, s))
        .transpose()?;
    if inst.scalar.as_ref().is_some_and(|c| c.is_zero()) {
        return Err(CliError::Input("scalar must be nonzero".into()));
    }
    inst.partner = aux.partner.as_deref().map(|s| parse_form(tower, s)).transpose()?;
    complete_instance(law, &mut inst, seed);
    if let Some(c) = aux.choice {
        inst.choice = c;
    }
    let verdict = check_law(law, &inst, caps);
    let record = TrialRecord {
        law,
        seed,
        trial: 0,
        verdict: verdict.clone(),
        instance: inst.to_record(),
    };
    Ok((summarize(law, &[record]), verdict))
}

/// A `rand-check` run: per-trial records (in trial order) and one report per law.
pub struct RandCheck {
    pub records: Vec<TrialRecord>,
    pub reports: Vec<LawReport>,
}

pub fn rand_check(laws: &[LawId], suite: &SuiteConfig) -> Result<RandCheck, CliError> {
    let mut records = Vec::new();
    let mut reports = Vec::new();
    for &law in laws {
        let trials = run_law(law, suite)?;
        reports.push(summarize(law, &trials));
        records.extend(trials);
    }
    Ok(RandCheck { records, reports })
}

#[derive(Debug, Serialize)]
pub struct Summary<'a> {
    pub p: u32,
    pub seed: u64,
    pub trials: u64,
    pub failed: bool,
    pub reports: &'a [LawReport],
}

pub fn invariants_table(inv: &Invariants) -> String {
    let opt = |v: Option<String>| v.unwrap_or_else(|| "-".into());
    let rows = [
        ("dim", inv.dim.to_string()),
        ("i0", inv.i0.to_string()),
        ("anisotropic dim", inv.an_dim.to_string()),
        ("norm degree", inv.ndeg.to_string()),
        ("height", inv.height.to_string()),
        ("pattern", format!("{:?}", inv.pattern)),
        ("indices", format!("{:?}", inv.indices)),
        ("h_qp", opt(inv.hqp.map(|v| v.to_string()))),
        ("neighbour", opt(inv.qpn.map(|v| v.to_string()))),
        ("Izhboldin dim", opt(inv.izh_dim.map(|v| v.to_string()))),
        ("maximal splitting", opt(inv.maximal.map(|v| v.to_string()))),
    ];
    let mut out = String::new();
    for (k, v) in rows {
        let _ = writeln!(out, "{k:<18} {v}");
    }
    out
}

pub fn tower_table(t: &TowerOutput) -> String {
    let mut out = invariants_table(&t.invariants);
    for l in &t.levels {
        let _ = writeln!(out, "\nlevel {}", l.level);
        for line in l.field.lines() {
            let _ = writeln!(out, "  {line}");
        }
        let _ = writeln!(out, "  kernel <{}>", l.kernel.join(", "));
    }
    out
}

pub fn reports_table(reports: &[LawReport]) -> String {
    let mut out = format!(
        "{:<26} {:>6} {:>6} {:>7} {:>7} {:>8} {:>10}\n",
        "law", "trials", "pass", "vacuous", "skipped", "failures", "candidates"
    );
    for r in reports {
        let _ = writeln!(
            out,
            "{:<26} {:>6} {:>6} {:>7} {:>7} {:>8} {:>10}",
            r.law.name(),
            r.trials,
            r.passes,
            r.vacuous,
            r.skipped,
            r.failures.len(),
            r.candidates.len()
        );
        for f in &r.failures {
            if let Verdict::Failure(msg) = &f.verdict {
                let _ = writeln!(out, "  trial {}: {msg}", f.trial);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use qlf_core::laws::InstanceRecord;

    fn record(verdict: Verdict) -> TrialRecord {
        TrialRecord {
            law: LawId::HoffmannBound,
            seed: 0,
            trial: 0,
            verdict,
            instance: InstanceRecord {
                tower: "p = 2\nvars = t\n".into(),
                form: vec!["1".into(), "t".into()],
                radicands: vec![],
                scalar: None,
                choice: 0,
                partner: None,
            },
        }
    }

    #[test]
    fn exit_codes_from_reports() {
        let mut report = LawReport::new(LawId::HoffmannBound);
        report.record(record(Verdict::Pass));
        report.record(record(Verdict::Candidate("noted".into())));
        assert_eq!(report_code(std::slice::from_ref(&report)), 0);
        report.record(record(Verdict::Skipped("cap".into())));
        assert_eq!(report_code(std::slice::from_ref(&report)), 3);
        report.record(record(Verdict::Failure("bound violated".into())));
        assert_eq!(report_code(std::slice::from_ref(&report)), 1);
    }
}
