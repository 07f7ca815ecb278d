//! One predicate per law. Every check works on φ_an; aux data comes from the
//! instance.

use std::sync::Arc;

use crate::fieldtower::{FieldTower, TowerElement};
use crate::forms::QuasilinearForm;
use crate::splitting::{
    check_caps, fresh_name, function_field, neighbour_exponent, qpn_test, splitting_tower, SplittingError,
    SplittingReport, TowerCaps,
};

use super::{Applicability, Instance, LawId, Verdict};

type Check = Result<Verdict, SplittingError>;

pub(crate) fn evaluate(law: LawId, inst: &Instance, caps: TowerCaps) -> Verdict {
    let p = inst.tower().p();
    let mode = law.applicability(p);
    if mode == Applicability::NotApplicable {
        return Verdict::Vacuous(format!("{law} is not asserted at p = {p}"));
    }
    let outcome = match law {
        LawId::HoffmannBound => hoffmann_bound(inst, caps),
        LawId::I1Dichotomy => i1_dichotomy(inst, caps),
        LawId::OuterExcellent => outer_excellent(inst, caps),
        LawId::MonotoneIndices => monotone_indices(inst, caps),
        LawId::PfisterSp => pfister_sp(inst, caps),
        LawId::QpnEquiv => qpn_equiv(inst, caps),
        LawId::NeighbourSsp => neighbour_ssp(inst, caps),
        LawId::SubformTrichotomy => subform_trichotomy(inst, caps),
        LawId::FirstComparison => first_comparison(inst, caps),
        LawId::SecondComparison => second_comparison(inst, caps),
        LawId::I2GeMin => i2_ge_min(inst, caps),
        LawId::I1Comparison => i1_comparison(inst, caps),
        LawId::DivisibilityEquiv => divisibility_equiv(inst),
        LawId::MultIndexConsistency => mult_index_consistency(inst, caps),
        LawId::ScalarInvariance => scalar_invariance(inst, caps),
        LawId::TranscendentalStability => transcendental_stability(inst, caps),
        LawId::Compressibility => compressibility(inst, caps),
        LawId::Functoriality => functoriality(inst, caps),
        LawId::MaxSplittingQpn => max_splitting_qpn(inst, caps),
        LawId::NdegFunctoriality => ndeg_functoriality(inst, caps),
    };
    match outcome {
        Ok(Verdict::Failure(msg)) if mode == Applicability::Exploration => Verdict::Candidate(msg),
        Ok(v) => v,
        Err(e @ SplittingError::ResourceCap { .. }) => Verdict::Skipped(e.to_string()),
        Err(e) => Verdict::Failure(format!("error: {e}")),
    }
}

fn verdict(ok: bool, detail: impl FnOnce() -> String) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Failure(detail())
    }
}

fn vacuous(why: &str) -> Check {
    Ok(Verdict::Vacuous(why.to_string()))
}

/// m in dim = p^n + m.
fn excess(dim: usize, p: usize) -> usize {
    dim - p.pow(neighbour_exponent(dim, p) as u32)
}

fn report(form: &QuasilinearForm, caps: TowerCaps) -> Result<SplittingReport, SplittingError> {
    Ok(splitting_tower(form, caps)?.1)
}

/// F(φ) under the caps, with φ lifted to it.
fn generic_field(
    form: &QuasilinearForm,
    caps: TowerCaps,
) -> Result<(Arc<FieldTower>, QuasilinearForm), SplittingError> {
    let an = form.anisotropic_part();
    check_caps(an.tower(), an.dim().saturating_sub(1), caps)?;
    function_field(form)
}

/// i_1 of an anisotropic form of dimension ≥ 2.
fn first_index(an: &QuasilinearForm, caps: TowerCaps) -> Result<usize, SplittingError> {
    Ok(generic_field(an, caps)?.1.defect_index())
}

/// Whether `form` is isotropic over F(other). A form whose anisotropic part
/// has dimension ≤ 1 has a purely transcendental function field, which
/// preserves anisotropy.
fn isotropic_over_function_field(
    form: &QuasilinearForm,
    other: &QuasilinearForm,
    caps: TowerCaps,
) -> Result<bool, SplittingError> {
    if !form.is_anisotropic() {
        return Ok(true);
    }
    if other.anisotropic_part().dim() < 2 {
        return Ok(false);
    }
    let (field, _) = generic_field(other, caps)?;
    Ok(form.lift_to(&field)?.defect_index() > 0)
}

/// F(a^(1/p)) over the form's tower.
fn root_field(
    tower: &Arc<FieldTower>,
    a: &TowerElement,
    caps: TowerCaps,
) -> Result<Arc<FieldTower>, SplittingError> {
    check_caps(tower, 0, caps)?;
    let name = fresh_name(tower, "a".to_string());
    Ok(tower.adjoin_pth_root(a, &name)?)
}

fn hoffmann_bound(inst: &Instance, caps: TowerCaps) -> Check {
    let an = inst.form.anisotropic_part();
    if an.dim() < 2 {
        return vacuous("anisotropic part has dimension below 2");
    }
    let m = excess(an.dim(), inst.tower().p() as usize);
    let i1 = first_index(&an, caps)?;
    Ok(verdict(i1 <= m, || format!("i1 = {i1} > m = {m}")))
}

fn i1_dichotomy(inst: &Instance, caps: TowerCaps) -> Check {
    let an = inst.form.anisotropic_part();
    if an.dim() < 2 {
        return vacuous("anisotropic part has dimension below 2");
    }
    let m = excess(an.dim(), 2);
    let i1 = first_index(&an, caps)?;
    Ok(verdict(i1 == m || 2 * i1 <= m, || {
        format!("i1 = {i1} is neither m = {m} nor at most m/2")
    }))
}

fn outer_excellent(inst: &Instance, caps: TowerCaps) -> Check {
    let an = inst.form.anisotropic_part();
    if an.dim() < 2 {
        return vacuous("anisotropic part has dimension below 2");
    }
    let m = excess(an.dim(), 2);
    let mut fields = Vec::new();
    for a in &inst.radicands {
        fields.push((format!("F({a}^(1/2))"), root_field(inst.tower(), a, caps)?));
    }
    if let Some(partner) = &inst.partner {
        let mut kernel = partner.anisotropic_part();
        for level in 1..=2 {
            if kernel.dim() < 2 {
                break;
            }
            let (field, lifted) = generic_field(&kernel, caps)?;
            kernel = lifted.anisotropic_part();
            fields.push((format!("partner level {level}"), field));
        }
    }
    let mut i1 = None;
    let mut applicable = false;
    for (label, field) in &fields {
        let i0 = an.lift_to(field)?.defect_index();
        if i0 >= m {
            continue;
        }
        applicable = true;
        let i1 = match i1 {
            Some(v) => v,
            None => *i1.insert(first_index(&an, caps)?),
        };
        if i0 + i1 > m {
            return Ok(Verdict::Failure(format!(
                "over {label}: i0 = {i0} < m = {m} but i0 > m - i1 with i1 = {i1}"
            )));
        }
    }
    if applicable {
        Ok(Verdict::Pass)
    } else {
        vacuous("i0 >= m over every sampled extension")
    }
}

fn monotone_indices(inst: &Instance, caps: TowerCaps) -> Check {
    let an = inst.form.anisotropic_part();
    if an.dim() < 2 {
        return vacuous("anisotropic part has dimension below 2");
    }
    let rep = report(&an, caps)?;
    let s = rep.hqp.unwrap_or(0);
    if s == 0 {
        return vacuous("form is a quasi-Pfister neighbour (hqp = 0)");
    }
    let head = &rep.indices[..s];
    Ok(verdict(head.windows(2).all(|w| w[0] <= w[1]), || {
        format!("indices {:?} decrease before hqp = {s}", rep.indices)
    }))
}

fn pfister_sp(inst: &Instance, caps: TowerCaps) -> Check {
    let an = inst.form.anisotropic_part();
    if an.dim() < 2 {
        return vacuous("anisotropic part has dimension below 2");
    }
    let p = inst.tower().p() as usize;
    let rep = report(&an, caps)?;
    let similar = an.dim() == rep.ndeg;
    let pfister_shape: Vec<usize> = (0..=rep.height).rev().map(|k| p.pow(k as u32)).collect();
    let shape = rep.pattern == pfister_shape;
    let halving = p * rep.pattern[1] == rep.pattern[0];
    Ok(verdict(similar == shape && shape == halving, || {
        format!(
            "similar to quasi-Pfister: {similar}, pattern {:?} of Pfister shape: {shape}, dim phi_1 = dim/p: {halving}",
            rep.pattern
        )
    }))
}

fn qpn_equiv(inst: &Instance, caps: TowerCaps) -> Check {
    let an = inst.form.anisotropic_part();
    if an.dim() < 2 {
        return vacuous("anisotropic part has dimension below 2");
    }
    let p = inst.tower().p() as usize;
    let n = neighbour_exponent(an.dim(), p);
    let (levels, rep) = splitting_tower(&an, caps)?;
    let by_height = rep.height == n + 1;
    let reduced: Vec<usize> = (0..=n).rev().map(|k| p.pow(k as u32)).collect();
    let by_pattern = rep.reduced_pattern() == reduced.as_slice();
    let phi1 = &levels[1].form;
    let by_kernel = phi1.dim() == phi1.norm_degree()?;
    let by_test = qpn_test(&an)?;
    let flags = [by_height, by_pattern, by_kernel, by_test];
    Ok(verdict(flags.iter().all(|&f| f == by_height), || {
        format!(
            "h = n+1: {by_height}, reduced pattern {:?} = {reduced:?}: {by_pattern}, \
             phi_1 quasi-Pfister up to scale: {by_kernel}, qpn_test: {by_test}",
            rep.reduced_pattern()
        )
    }))
}

fn neighbour_ssp(inst: &Instance, caps: TowerCaps) -> Check {
    let an = inst.form.anisotropic_part();
    if an.dim() < 2 {
        return vacuous("anisotropic part has dimension below 2");
    }
    let Some(c) = &inst.scalar else {
        return vacuous("no scalar supplied");
    };
    let rep = report(&an, caps)?;
    let i1 = rep.indices[0];
    let drop = (inst.choice % i1 as u64) as usize;
    let psi = an.truncate(an.dim() - drop).scale(c)?;
    let rep_psi = report(&psi, caps)?;
    Ok(verdict(
        rep.reduced_pattern() == rep_psi.reduced_pattern(),
        || {
            format!(
                "dropping {drop} of {} coefficients: reduced patterns {:?} vs {:?}",
                an.dim(),
                rep.reduced_pattern(),
                rep_psi.reduced_pattern()
            )
        },
    ))
}

fn subform_trichotomy(inst: &Instance, caps: TowerCaps) -> Check {
    let an = inst.form.anisotropic_part();
    if an.dim() < 3 {
        return vacuous("anisotropic part has dimension below 3");
    }
    let Some(c) = &inst.scalar else {
        return vacuous("no scalar supplied");
    };
    let index = (inst.choice % an.dim() as u64) as usize;
    let psi = an.drop_coeff(index).scale(c)?;
    let rep = report(&an, caps)?;
    let (psi_levels, rep_psi) = splitting_tower(&psi, caps)?;
    let i1 = rep.indices[0];
    let ssp = rep.reduced_pattern();
    if rep.height == rep_psi.height + 1 && i1 == 1 && ssp == rep_psi.pattern.as_slice() {
        return Ok(Verdict::Pass);
    }
    if rep.height == rep_psi.height && i1 > 1 && ssp == rep_psi.reduced_pattern() {
        return Ok(Verdict::Pass);
    }
    if rep.height == rep_psi.height && i1 == 1 {
        // s: least r in [1, h(ψ)) with ψ_r isotropic over F_r(φ).
        let mut s = None;
        for (r, level) in psi_levels.iter().enumerate().take(rep_psi.height).skip(1) {
            let phi_r = an.lift_to(&level.field)?;
            if isotropic_over_function_field(&level.form, &phi_r, caps)? {
                s = Some(r);
                break;
            }
        }
        if let Some(s) = s {
            let mut expected = rep_psi.pattern.clone();
            expected.remove(s);
            if ssp == expected.as_slice() {
                return Ok(Verdict::Pass);
            }
            return Ok(Verdict::Failure(format!(
                "equal heights, i1 = 1, s = {s}: reduced pattern {ssp:?} vs sp(psi) without entry s {expected:?}"
            )));
        }
    }
    Ok(Verdict::Failure(format!(
        "no branch holds: h(phi) = {}, h(psi) = {}, i1 = {i1}, reduced sp(phi) = {ssp:?}, sp(psi) = {:?}",
        rep.height, rep_psi.height, rep_psi.pattern
    )))
}

fn first_comparison(inst: &Instance, caps: TowerCaps) -> Check {
    let an = inst.form.anisotropic_part();
    if an.dim() < 2 {
        return vacuous("anisotropic part has dimension below 2");
    }
    let rep = report(&an, caps)?;
    let s = rep.hqp.unwrap_or(0);
    if s == 0 {
        return vacuous("form is a quasi-Pfister neighbour (hqp = 0)");
    }
    let (field, _) = generic_field(&an.norm_form()?, caps)?;
    let lifted = an.lift_to(&field)?;
    if !lifted.is_anisotropic() {
        return Ok(Verdict::Failure("phi becomes isotropic over F(phi_qp)".into()));
    }
    let rep_l = report(&lifted, caps)?;
    let mut expected = rep.pattern.clone();
    expected.remove(s);
    let new_hqp = rep_l.hqp.unwrap_or(0);
    Ok(verdict(rep_l.pattern == expected && new_hqp < s, || {
        format!(
            "pattern over F(phi_qp) {:?} vs {expected:?}, hqp {new_hqp} vs {s}",
            rep_l.pattern
        )
    }))
}

fn second_comparison(inst: &Instance, caps: TowerCaps) -> Check {
    let an = inst.form.anisotropic_part();
    if an.dim() < 2 {
        return vacuous("anisotropic part has dimension below 2");
    }
    let Some(a) = inst.radicands.first() else {
        return vacuous("no radicand supplied");
    };
    let p = inst.tower().p() as usize;
    let l = root_field(inst.tower(), a, caps)?;
    let phi_l = an.lift_to(&l)?;
    let i0_l = phi_l.defect_index();
    let (_, over_f) = generic_field(&an, caps)?;
    let i1 = over_f.defect_index();
    let dim1 = an.dim() - i1;
    let bound = i0_l.min(dim1 / p);
    // L(φ) = L(φ_L); if φ_L is split to dimension 1 it is purely transcendental over L.
    let i0_lf = if phi_l.anisotropic_part().dim() < 2 {
        i0_l
    } else {
        generic_field(&phi_l, caps)?.1.defect_index()
    };
    Ok(verdict(i0_lf >= i1 + bound, || {
        format!("i0 over L(phi) = {i0_lf}, i1 = {i1}, min(i0(phi_L), [dim phi_1/p]) = {bound}")
    }))
}

fn i2_ge_min(inst: &Instance, caps: TowerCaps) -> Check {
    let an = inst.form.anisotropic_part();
    if an.dim() < 2 {
        return vacuous("anisotropic part has dimension below 2");
    }
    let p = inst.tower().p() as usize;
    let rep = report(&an, caps)?;
    if rep.height < 2 {
        return vacuous("height below 2");
    }
    let (i1, i2) = (rep.indices[0], rep.indices[1]);
    let bound = i1.min(rep.pattern[1] / p);
    Ok(verdict(i2 >= bound, || {
        format!("i2 = {i2} < min(i1, [dim phi_1/p]) = {bound}")
    }))
}

fn i1_comparison(inst: &Instance, caps: TowerCaps) -> Check {
    let an = inst.form.anisotropic_part();
    if an.dim() < 2 {
        return vacuous("anisotropic part has dimension below 2");
    }
    let Some(a) = inst.radicands.first() else {
        return vacuous("no radicand supplied");
    };
    let p = inst.tower().p() as usize;
    let l = root_field(inst.tower(), a, caps)?;
    let phi_l = an.lift_to(&l)?;
    let i0_l = phi_l.defect_index();
    let i1 = first_index(&an, caps)?;
    let dim1 = an.dim() - i1;
    if i0_l > dim1 / p {
        return vacuous("i0(phi_L) exceeds [dim phi_1/p]");
    }
    let an_l = phi_l.anisotropic_part();
    if an_l.dim() < 2 {
        return vacuous("phi_L splits to dimension below 2");
    }
    let i1_l = first_index(&an_l, caps)?;
    Ok(verdict(i1_l >= i1, || {
        format!("i1((phi_L)_an) = {i1_l} < i1 = {i1}")
    }))
}

fn divisibility_equiv(inst: &Instance) -> Check {
    let an = inst.form.anisotropic_part();
    if an.dim() == 0 {
        return vacuous("zero form");
    }
    let Some(a) = inst.radicands.first() else {
        return vacuous("no radicand supplied");
    };
    let i0 = an.pinsep_index(a)?;
    let tau = an.divisibility_extract(a)?;
    if tau.dim() != i0 {
        return Ok(Verdict::Failure(format!(
            "index over F(a^(1/2)) is {i0} but the extracted tau has dimension {}",
            tau.dim()
        )));
    }
    if tau.dim() == 0 {
        return Ok(Verdict::Pass);
    }
    let pfister = QuasilinearForm::new(&[inst.tower().one(), a.clone()])?;
    let product = pfister.tensor(&tau)?;
    if !product.is_anisotropic() {
        return Ok(Verdict::Failure("<<a>> tensor tau is isotropic".into()));
    }
    Ok(verdict(product.is_subform_of(&an)?, || {
        "<<a>> tensor tau is not a subform of phi".into()
    }))
}

fn mult_index_consistency(inst: &Instance, caps: TowerCaps) -> Check {
    let Some(a) = inst.radicands.first() else {
        return vacuous("no radicand supplied");
    };
    if inst.form.is_zero_form() {
        return vacuous("zero form");
    }
    let base_path = inst.form.pinsep_index(a)?;
    let l = root_field(inst.tower(), a, caps)?;
    let root_path = inst.form.lift_to(&l)?.defect_index();
    Ok(verdict(base_path == root_path, || {
        format!("via <<a>> tensor phi: {base_path}, via adjoined root: {root_path}")
    }))
}

fn scalar_invariance(inst: &Instance, caps: TowerCaps) -> Check {
    if inst.form.is_zero_form() {
        return vacuous("zero form");
    }
    let Some(c) = &inst.scalar else {
        return vacuous("no scalar supplied");
    };
    let rep = report(&inst.form, caps)?;
    let rep_c = report(&inst.form.scale(c)?, caps)?;
    Ok(verdict(rep == rep_c, || {
        format!("{rep:?} vs {rep_c:?} after scaling")
    }))
}

fn transcendental_stability(inst: &Instance, caps: TowerCaps) -> Check {
    let an = inst.form.anisotropic_part();
    if an.dim() == 0 {
        return vacuous("zero form");
    }
    check_caps(inst.tower(), 1, caps)?;
    let name = fresh_name(inst.tower(), "y".to_string());
    let l = inst.tower().adjoin_transcendental(&name)?;
    let an_l = an.lift_to(&l)?;
    if !an_l.is_anisotropic() {
        return Ok(Verdict::Failure("anisotropic form became isotropic".into()));
    }
    let (ndeg, ndeg_l) = (an.norm_degree()?, an_l.norm_degree()?);
    if ndeg != ndeg_l {
        return Ok(Verdict::Failure(format!("norm degree {ndeg} became {ndeg_l}")));
    }
    let (pattern, pattern_l) = (report(&an, caps)?.pattern, report(&an_l, caps)?.pattern);
    Ok(verdict(pattern == pattern_l, || {
        format!("pattern {pattern:?} became {pattern_l:?}")
    }))
}

/// (φ_an, ψ_an) when both have dimension ≥ 2 and φ is isotropic over F(ψ).
fn isotropic_pair(
    inst: &Instance,
    caps: TowerCaps,
) -> Result<Result<(QuasilinearForm, QuasilinearForm), &'static str>, SplittingError> {
    let Some(partner) = &inst.partner else {
        return Ok(Err("no partner form supplied"));
    };
    let phi = inst.form.anisotropic_part();
    let psi = partner.anisotropic_part();
    if phi.dim() < 2 || psi.dim() < 2 {
        return Ok(Err("a form has anisotropic dimension below 2"));
    }
    if !isotropic_over_function_field(&phi, &psi, caps)? {
        return Ok(Err("phi stays anisotropic over F(psi)"));
    }
    Ok(Ok((phi, psi)))
}

fn compressibility(inst: &Instance, caps: TowerCaps) -> Check {
    let (phi, psi) = match isotropic_pair(inst, caps)? {
        Ok(pair) => pair,
        Err(why) => return vacuous(why),
    };
    let izh = psi.dim() - first_index(&psi, caps)? + 1;
    if izh > phi.dim() {
        return Ok(Verdict::Failure(format!(
            "dim_Izh psi = {izh} > dim phi = {}",
            phi.dim()
        )));
    }
    if izh == phi.dim() && !isotropic_over_function_field(&psi, &phi, caps)? {
        return Ok(Verdict::Failure(
            "dim_Izh psi = dim phi but psi stays anisotropic over F(phi)".into(),
        ));
    }
    Ok(Verdict::Pass)
}

fn functoriality(inst: &Instance, caps: TowerCaps) -> Check {
    let (phi, psi) = match isotropic_pair(inst, caps)? {
        Ok(pair) => pair,
        Err(why) => return vacuous(why),
    };
    let rep_phi = report(&phi, caps)?;
    let rep_psi = report(&psi, caps)?;
    let (sp_phi, sp_psi) = (rep_phi.reduced_pattern(), rep_psi.reduced_pattern());
    let dominated = rep_psi.height <= rep_phi.height && sp_psi.iter().zip(sp_phi).all(|(a, b)| a <= b);
    if !dominated {
        return Ok(Verdict::Failure(format!(
            "reduced sp(psi) = {sp_psi:?} is not below reduced sp(phi) = {sp_phi:?}"
        )));
    }
    let equal = sp_psi == sp_phi;
    let back = isotropic_over_function_field(&psi, &phi, caps)?;
    Ok(verdict(equal == back, || {
        format!("reduced patterns equal: {equal} ({sp_psi:?}), psi isotropic over F(phi): {back}")
    }))
}

fn ndeg_functoriality(inst: &Instance, caps: TowerCaps) -> Check {
    let (phi, psi) = match isotropic_pair(inst, caps)? {
        Ok(pair) => pair,
        Err(why) => return vacuous(why),
    };
    let (qp_phi, qp_psi) = (phi.norm_form()?, psi.norm_form()?);
    Ok(verdict(qp_psi.is_subform_of(&qp_phi)?, || {
        format!(
            "psi_qp of dimension {} is not inside phi_qp of dimension {}",
            qp_psi.dim(),
            qp_phi.dim()
        )
    }))
}

/// The dimension windows on which maximal splitting forces a quasi-Pfister
/// neighbour.
fn in_max_splitting_window(dim: usize, p: usize) -> bool {
    let n = neighbour_exponent(dim, p);
    let top = p.pow(n as u32 + 1);
    let general = n >= 1 && dim + p.pow(n as u32 - 1) >= top;
    let binary = p == 2 && n >= 2 && dim > (1 << n) + (1 << (n - 2));
    general || binary
}

fn max_splitting_qpn(inst: &Instance, caps: TowerCaps) -> Check {
    let an = inst.form.anisotropic_part();
    if an.dim() < 2 {
        return vacuous("anisotropic part has dimension below 2");
    }
    let p = inst.tower().p() as usize;
    let rep = report(&an, caps)?;
    if rep.maximal != Some(true) {
        return vacuous("splitting is not maximal");
    }
    let qpn = rep.qpn == Some(true);
    if in_max_splitting_window(an.dim(), p) {
        return Ok(verdict(qpn, || {
            format!(
                "dim {} maximal splitting, pattern {:?}, not a neighbour",
                an.dim(),
                rep.pattern
            )
        }));
    }
    if p > 2 && !qpn {
        return Ok(Verdict::Candidate(format!(
            "dim {} below the window: maximal splitting, pattern {:?}, not a neighbour",
            an.dim(),
            rep.pattern
        )));
    }
    vacuous("dimension outside the asserted window")
}
