mod common;

use common::*;
use proptest::prelude::*;
use semiq_core::geometries::{make_cpn, make_flat};
use semiq_core::semiquant::*;
use semiq_core::Jet;

fn cfg() -> ProptestConfig {
    ProptestConfig::with_cases(24)
}

proptest! {
    #![proptest_config(cfg())]

    #[test]
    fn jet_product_commutes_and_associates(seed in any::<u64>()) {
        let geo = make_cpn::<f64>(1).unwrap();
        let pg = &points(&geo, 1, seed)[0];
        let mut r = rng(seed);
        let (a, b, c) = (poly(pg, &mut r), poly(pg, &mut r), poly(pg, &mut r));
        prop_assert!((&a.mul_jet(&b) - &b.mul_jet(&a)).max_abs() < 1e-12);
        let l = a.mul_jet(&b).mul_jet(&c);
        let rr = a.mul_jet(&b.mul_jet(&c));
        prop_assert!((&l - &rr).max_abs() < 1e-9 * (1.0 + l.max_abs()));
    }

    #[test]
    fn zero_factor_gives_zero(seed in any::<u64>()) {
        let geo = make_flat::<f64>(2, 1.0).unwrap();
        let pg = &points(&geo, 1, seed)[0];
        let a = poly(pg, &mut rng(seed));
        let z = Jet::zero(pg.dim());
        prop_assert!(a.mul_jet(&z).is_zero());
        let mut acc = a.clone();
        acc.add_product(&z, &a);
        prop_assert_eq!(acc.max_abs(), a.max_abs());
    }

    #[test]
    fn star_is_associative(seed in any::<u64>()) {
        for geo in [make_cpn::<f64>(1).unwrap(), make_flat(1, 1.0).unwrap()] {
            let pg = &points(&geo, 1, seed)[0];
            let mut r = rng(seed ^ 0x5a);
            let (a, b, c) = (qpoly(pg, &mut r), qpoly(pg, &mut r), qpoly(pg, &mut r));
            let l = star(pg, &star(pg, &a, &b), &c);
            let rt = star(pg, &a, &star(pg, &b, &c));
            prop_assert!(worst(l.max_diff(&rt)) < 1e-9);
        }
    }

    #[test]
    fn commutator_is_antisymmetric(seed in any::<u64>()) {
        let geo = make_cpn::<f64>(1).unwrap();
        let pg = &points(&geo, 1, seed)[0];
        let mut r = rng(seed);
        let (a, b) = (qpoly(pg, &mut r), qpoly(pg, &mut r));
        let s = &commutator(pg, &a, &b) + &commutator(pg, &b, &a);
        prop_assert!(worst(s.max_abs()) < 1e-12);
    }
}
