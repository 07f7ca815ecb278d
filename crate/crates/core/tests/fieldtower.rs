use std::sync::Arc;

use qlf_core::fieldtower::{
    ppower_span_rank, semilinear_kernel, span_intersection, span_membership, FieldTower, TowerElement,
    TowerError,
};
use qlf_core::polyring::PrimeModulus;
use qlf_core::text::parse_element;

fn tower(p: u32, vars: &[&str]) -> Arc<FieldTower> {
    FieldTower::new(PrimeModulus::new(p).unwrap(), vars).unwrap()
}

fn el(t: &Arc<FieldTower>, s: &str) -> TowerElement {
    parse_element(t, s).unwrap()
}

fn els(t: &Arc<FieldTower>, items: &[&str]) -> Vec<TowerElement> {
    items.iter().map(|s| el(t, s)).collect()
}

fn with_root(t: &Arc<FieldTower>, radicand: &str, name: &str) -> Arc<FieldTower> {
    t.adjoin_pth_root(&el(t, radicand), name).unwrap()
}

#[test]
fn adjoin_transcendental_cases() {
    let t = tower(2, &["t"]);
    let tu = t.adjoin_transcendental("u").unwrap();
    assert_eq!(tu.vars(), ["t", "u"]);
    assert!(t.embeds_in(&tu));
    let empty = tower(2, &[]);
    assert_eq!(empty.adjoin_transcendental("t").unwrap().vars(), ["t"]);
    assert_eq!(
        t.adjoin_transcendental("t"),
        Err(TowerError::DuplicateName("t".into()))
    );
}

#[test]
fn adjoin_root_cases() {
    let t = tower(2, &["t"]);
    let r = with_root(&t, "t", "r");
    assert_eq!(r.height(), 1);
    assert!(matches!(
        t.adjoin_pth_root(&el(&t, "t^2"), "r"),
        Err(TowerError::AlreadyPthPower(_))
    ));
    assert_eq!(
        t.adjoin_pth_root(&el(&t, "0"), "r"),
        Err(TowerError::ZeroRadicand)
    );
    let tu = tower(2, &["t", "u"]).adjoin_transcendental("x").unwrap();
    assert!(tu.adjoin_pth_root(&el(&tu, "t*x^2"), "r").is_ok());
}

#[test]
fn arithmetic_examples() {
    let t = with_root(&tower(2, &["t"]), "t", "r");
    let x = el(&t, "1 + r");
    assert_eq!(x.inv().unwrap(), el(&t, "(1 + r)/(1 + t)"));
    assert_eq!(el(&t, "r").mul(&el(&t, "r")).unwrap(), el(&t, "t"));
    assert!(el(&t, "0").inv().is_err());
}

#[test]
fn frobenius_examples() {
    let t = with_root(&tower(2, &["t"]), "t", "r");
    let f = el(&t, "r").frobenius();
    assert_eq!(f, el(&t, "t"));
    assert_eq!(f.stage(), 0);
    assert!(el(&t, "1").frobenius().is_one());
    let b = tower(2, &["t"]);
    assert_eq!(el(&b, "t + 1").frobenius(), el(&b, "t^2 + 1"));
}

#[test]
fn pth_power_examples() {
    let b = tower(2, &["t"]);
    assert!(el(&b, "t^2").is_pth_power());
    assert!(!el(&b, "t").is_pth_power());
    let r = with_root(&b, "t", "r");
    assert!(el(&r, "t").is_pth_power());
    assert!(!el(&r, "r").is_pth_power());
}

#[test]
fn kernel_examples() {
    let b = tower(2, &["t"]);
    let k = semilinear_kernel(&[vec![el(&b, "1")], vec![el(&b, "t")]]).unwrap();
    assert!(k.is_empty());
    let k = semilinear_kernel(&[vec![el(&b, "t")], vec![el(&b, "t^3")]]).unwrap();
    assert_eq!(k.len(), 1);
    // Reduced form: free coordinate normalized to 1, so (t, 1).
    assert_eq!(k[0], vec![el(&b, "t"), el(&b, "1")]);
    let r = with_root(&b, "t", "r");
    let k = semilinear_kernel(&[vec![el(&r, "1")], vec![el(&r, "t")]]).unwrap();
    assert_eq!(k, vec![vec![el(&r, "r"), el(&r, "1")]]);
}

#[test]
fn kernel_input_errors() {
    let b = tower(2, &["t"]);
    assert_eq!(semilinear_kernel(&[]), Err(TowerError::EmptyInput));
    assert_eq!(
        semilinear_kernel(&[vec![el(&b, "1")], vec![el(&b, "1"), el(&b, "t")]]),
        Err(TowerError::LengthMismatch)
    );
    let other = tower(2, &["s"]);
    assert_eq!(
        semilinear_kernel(&[vec![el(&b, "1")], vec![el(&other, "s")]]),
        Err(TowerError::TowerMismatch)
    );
}

#[test]
fn span_rank_examples() {
    let b = tower(2, &["t"]);
    assert_eq!(ppower_span_rank(&els(&b, &["1", "t", "t+1"])).unwrap(), 2);
    assert_eq!(ppower_span_rank(&els(&b, &["t", "t^3"])).unwrap(), 1);
    let tu = tower(2, &["t", "u"]);
    assert_eq!(ppower_span_rank(&els(&tu, &["1", "t", "u"])).unwrap(), 3);
}

#[test]
fn membership_examples() {
    let b = tower(2, &["t"]);
    let w = span_membership(&el(&b, "t+1"), &els(&b, &["1", "t"]))
        .unwrap()
        .unwrap();
    assert_eq!(w, els(&b, &["1", "1"]));
    let tu = tower(2, &["t", "u"]);
    assert!(span_membership(&el(&tu, "u"), &els(&tu, &["1", "t"]))
        .unwrap()
        .is_none());
    let w = span_membership(&el(&tu, "t^2*u"), &els(&tu, &["u"]))
        .unwrap()
        .unwrap();
    assert_eq!(w, els(&tu, &["t"]));
}

#[test]
fn membership_witness_odd_prime() {
    let t = tower(3, &["t", "u"]);
    let gens = els(&t, &["1", "t", "u"]);
    let x = el(&t, "2*t^3 + u*t^6 + t");
    let w = span_membership(&x, &gens).unwrap().unwrap();
    let mut acc = t.zero();
    for (c, g) in w.iter().zip(&gens) {
        acc = acc.add(&c.pow(3).mul(g).unwrap()).unwrap();
    }
    assert_eq!(acc, x);
}

#[test]
fn intersection_examples() {
    let tu = tower(2, &["t", "u"]);
    let i = span_intersection(&els(&tu, &["1", "t"]), &els(&tu, &["t", "u"])).unwrap();
    assert_eq!(i.len(), 1);
    assert!(span_membership(&i[0], &els(&tu, &["t"])).unwrap().is_some());
    assert!(span_intersection(&els(&tu, &["1"]), &els(&tu, &["u"]))
        .unwrap()
        .is_empty());
    let a = els(&tu, &["1", "t"]);
    assert_eq!(span_intersection(&a, &a).unwrap().len(), 2);
}

#[test]
fn rank_over_two_roots() {
    // F_2(t,u)(√t)(√u): t and u become squares, so 1, t, u span one dimension.
    let b = tower(2, &["t", "u"]);
    let r1 = with_root(&b, "t", "r1");
    let r2 = with_root(&r1, "u", "r2");
    assert_eq!(ppower_span_rank(&els(&r2, &["1", "t", "u", "t*u"])).unwrap(), 1);
    assert_eq!(
        ppower_span_rank(&els(&r2, &["1", "r1", "r2", "r1*r2"])).unwrap(),
        4
    );
    assert_eq!(ppower_span_rank(&els(&r2, &["r1", "r1*t^3"])).unwrap(), 1);
}
