use std::sync::Arc;

use proptest::prelude::*;
use qlf_core::fieldtower::{ppower_span_rank, semilinear_kernel, FieldTower, TowerElement};
use qlf_core::forms::QuasilinearForm;
use qlf_core::laws::{random_element, random_poly, trial_rng};
use qlf_core::polyring::{poly_gcd, Monomial, Polynomial, PrimeModulus, RationalFunction};
use qlf_core::text::{parse_element, parse_form, parse_tower};

const PRIMES: [u32; 3] = [2, 3, 5];

fn poly_strategy(p: u32, vars: usize) -> impl Strategy<Value = Polynomial> {
    prop::collection::vec((prop::collection::vec(0u32..4, vars), 0..p), 0..5).prop_map(move |terms| {
        let m = PrimeModulus::new(p).unwrap();
        Polynomial::from_terms(
            m,
            terms
                .into_iter()
                .map(|(e, c)| (Monomial::from_exponents(&e), c))
                .collect(),
        )
    })
}

fn nonzero_poly(p: u32, vars: usize) -> impl Strategy<Value = Polynomial> {
    poly_strategy(p, vars).prop_filter("nonzero", |f| !f.is_zero())
}

/// F_p(t, u, v) with up to two roots; the second radicand involves the first root.
fn tower_shape(p: u32, roots: usize) -> Arc<FieldTower> {
    let base = FieldTower::new(PrimeModulus::new(p).unwrap(), &["t", "u", "v"]).unwrap();
    let mut tower = base;
    for (name, radicand) in [("r", "t"), ("s", "u + r*v")].into_iter().take(roots) {
        let a = parse_element(&tower, radicand).unwrap();
        tower = tower.adjoin_pth_root(&a, name).unwrap();
    }
    tower
}

fn random_triple(tower: &Arc<FieldTower>, seed: u64) -> [TowerElement; 3] {
    let mut rng = trial_rng(seed, 0, 99);
    [(); 3].map(|_| random_element(tower, 2, 2, 3, &mut rng))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomial_ring_axioms(
        (a, b, c) in prop::sample::select(PRIMES.to_vec())
            .prop_flat_map(|p| (poly_strategy(p, 3), poly_strategy(p, 3), poly_strategy(p, 3)))
    ) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.sub(&a).is_zero());
        prop_assert_eq!(a.add(&b).sub(&b), a.clone());
    }

    #[test]
    fn frobenius_is_additive_and_invertible(
        (a, b) in prop::sample::select(PRIMES.to_vec())
            .prop_flat_map(|p| (poly_strategy(p, 2), poly_strategy(p, 2)))
    ) {
        prop_assert_eq!(a.add(&b).frobenius(), a.frobenius().add(&b.frobenius()));
        prop_assert_eq!(a.mul(&b).frobenius(), a.frobenius().mul(&b.frobenius()));
        prop_assert_eq!(a.frobenius().pth_root().unwrap(), a.clone());
        prop_assert_eq!(a.frobenius(), a.pow(a.modulus().get()));
    }

    #[test]
    fn exact_division_inverts_multiplication(
        (a, b) in prop::sample::select(PRIMES.to_vec())
            .prop_flat_map(|p| (poly_strategy(p, 3), nonzero_poly(p, 3)))
    ) {
        prop_assert_eq!(a.mul(&b).div_exact(&b), Some(a));
    }

    #[test]
    fn gcd_contains_common_factor(
        (f, g, h) in prop::sample::select(vec![2u32, 3])
            .prop_flat_map(|p| (nonzero_poly(p, 2), nonzero_poly(p, 2), nonzero_poly(p, 2)))
    ) {
        let (a, b) = (f.mul(&h), g.mul(&h));
        let d = poly_gcd(&a, &b).unwrap();
        prop_assert!(d.divides(&a) && d.divides(&b));
        prop_assert!(h.divides(&d));
    }

    #[test]
    fn rational_functions_are_normalized(
        (n, d, g) in prop::sample::select(vec![2u32, 3])
            .prop_flat_map(|p| (poly_strategy(p, 2), nonzero_poly(p, 2), nonzero_poly(p, 2)))
    ) {
        let x = RationalFunction::new(n.clone(), d.clone()).unwrap();
        let y = RationalFunction::new(n.mul(&g), d.mul(&g)).unwrap();
        prop_assert_eq!(&x, &y);
        if !x.is_zero() {
            prop_assert!(x.mul(&x.inv().unwrap()).is_one());
        }
        prop_assert_eq!(x.frobenius().pth_root().unwrap(), x);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn tower_field_axioms(p in prop::sample::select(vec![2u32, 3]), roots in 0usize..3, seed in any::<u64>()) {
        let k = tower_shape(p, roots);
        let [a, b, c] = random_triple(&k, seed);
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(
            a.mul(&b.add(&c).unwrap()).unwrap(),
            a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap()
        );
        prop_assert_eq!(a.mul(&b).unwrap().frobenius(), a.frobenius().mul(&b.frobenius()).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().frobenius(), a.frobenius().add(&b.frobenius()).unwrap());
        if !a.is_zero() {
            prop_assert!(a.mul(&a.inv().unwrap()).unwrap().is_one());
        }
        prop_assert!(a.frobenius().is_pth_power());
    }

    #[test]
    fn kernel_vectors_solve_the_system(p in prop::sample::select(vec![2u32, 3]), roots in 0usize..2, seed in any::<u64>(), n in 2usize..5) {
        let k = tower_shape(p, roots);
        let vectors: Vec<Vec<TowerElement>> = (0..n as u64)
            .map(|i| {
                let [x, y, _] = random_triple(&k, seed.wrapping_add(i));
                vec![x, y]
            })
            .collect();
        let kernel = semilinear_kernel(&vectors).unwrap();
        for x in &kernel {
            for row in 0..2 {
                let mut sum = k.zero();
                for (xi, v) in x.iter().zip(&vectors) {
                    sum = sum.add(&xi.frobenius().mul(&v[row]).unwrap()).unwrap();
                }
                prop_assert!(sum.is_zero());
            }
        }
        // One row: kernel dimension plus K^p-rank of the entries is n.
        let row: Vec<TowerElement> = vectors.iter().map(|v| v[0].clone()).collect();
        let single: Vec<Vec<TowerElement>> = row.iter().map(|e| vec![e.clone()]).collect();
        prop_assert_eq!(semilinear_kernel(&single).unwrap().len() + ppower_span_rank(&row).unwrap(), n);
    }

    #[test]
    fn defect_index_is_similarity_invariant(p in prop::sample::select(vec![2u32, 3]), seed in any::<u64>(), dim in 2usize..6) {
        let k = FieldTower::new(PrimeModulus::new(p).unwrap(), &["t", "u"]).unwrap();
        let mut rng = trial_rng(seed, 0, 7);
        let coeffs: Vec<TowerElement> = (0..dim).map(|_| random_poly(&k, 2, 2, 3, &mut rng)).collect();
        let phi = QuasilinearForm::new(&coeffs).unwrap();
        let i0 = phi.defect_index();
        prop_assert_eq!(phi.anisotropic_part().dim(), dim - i0);
        prop_assert!(phi.anisotropic_part().is_anisotropic());

        let c = random_poly(&k, 2, 2, 3, &mut rng);
        prop_assert_eq!(phi.scale(&c).unwrap().defect_index(), i0);

        let mut shuffled = coeffs.clone();
        shuffled.reverse();
        prop_assert_eq!(QuasilinearForm::new(&shuffled).unwrap().defect_index(), i0);

        // φ ⊕ φ has every vector (x, -x) isotropic.
        prop_assert_eq!(phi.direct_sum(&phi).unwrap().defect_index(), dim + i0);
        let an = phi.anisotropic_part();
        let ndeg = phi.norm_degree().unwrap();
        prop_assert!(ndeg >= an.dim());
        prop_assert_eq!(ndeg, (p as usize).pow(ndeg.ilog(p as usize)));
        let normalized = an.scale(&an.coeff(0).inv().unwrap()).unwrap();
        prop_assert!(normalized.is_subform_of(&phi.norm_form().unwrap()).unwrap());
    }

    #[test]
    fn rendering_round_trips(p in prop::sample::select(vec![2u32, 3, 5]), roots in 0usize..3, seed in any::<u64>()) {
        let k = tower_shape(p, roots);
        let [a, b, _] = random_triple(&k, seed);
        prop_assert_eq!(parse_element(&k, &a.render()).unwrap(), a.clone());
        let again = parse_tower(&k.to_text()).unwrap();
        prop_assert_eq!(again.to_text(), k.to_text());
        let nonzero: Vec<TowerElement> = [a, b].into_iter().filter(|x| !x.is_zero()).collect();
        if !nonzero.is_empty() {
            let phi = QuasilinearForm::new(&nonzero).unwrap();
            prop_assert_eq!(parse_form(&k, &phi.render()).unwrap(), phi);
        }
    }
}
