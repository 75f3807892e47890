mod common;

use std::sync::Arc;

use common::*;
use semiq_core::evolution::*;
use semiq_core::geometries::{make_cpn, make_flat};
use semiq_core::geometry::poisson_bracket;
use semiq_core::semiquant::grad;
use semiq_core::{parse, Jet, Tensor};

#[test]
fn defect_matches_canonical_display() {
    let geo = Arc::new(make_flat::<f64>(2, 1.0).unwrap());
    for (m, v) in [(1.0, "q1^2/2 + q2^2"), (2.5, "q1^4 - 3*q1*q2^2"), (0.7, "q1^3*q2 + 2*q2 - q1^2*q2^2/5")] {
        let sys = HamiltonianSystem::canonical(geo.clone(), m, v).unwrap();
        let vx = sys.potential.clone().unwrap();
        let mut r = rng(40);
        for pg in points(&geo, 10, 41) {
            let a = poly(&pg, &mut r);
            let h = sys.h_at(&pg.point).unwrap();
            let lhs = evolution_defect(&pg, &a, &h);
            let rhs = canonical_defect_display(&a, &vx.eval_jet(&pg.point).unwrap(), m);
            assert!(lhs.max_diff(&rhs) < 1e-12, "{v}");
        }
    }
}

#[test]
fn coordinate_cobasis_is_invariant_on_flat() {
    let geo = Arc::new(make_flat::<f64>(2, 1.0).unwrap());
    let sys = HamiltonianSystem::canonical(geo.clone(), 1.3, "q1^2*q2 + q2^4").unwrap();
    for pg in points(&geo, 10, 42) {
        let h = sys.h_at(&pg.point).unwrap();
        for k in 0..4 {
            assert_eq!(evolve_oneform(&pg, &Tensor::basis(4, k), &h).max_abs(), 0.0);
        }
    }
}

#[test]
fn evolution_of_da_splits_by_poisson_compatibility() {
    for geo in [make_cpn::<f64>(1).unwrap(), make_cpn(2).unwrap()] {
        let mut r = rng(43);
        for pg in points(&geo, 5, 44) {
            let (a, h) = (poly(&pg, &mut r), poly(&pg, &mut r));
            let lhs = evolve_oneform(&pg, &grad(&a), &h);
            let rhs = &grad(&evolve(&pg, &a, &h)) + &evolution_defect(&pg, &a, &h);
            assert!(lhs.max_diff(&rhs) < 1e-9);
        }
    }
}

#[test]
fn oneform_flow_matches_index_loop_on_cp1() {
    let geo = make_cpn::<f64>(1).unwrap();
    let mut r = rng(45);
    for pg in points(&geo, 5, 46) {
        let h = poly(&pg, &mut r);
        let xi = Tensor::from_fn(2, 1, |_| poly(&pg, &mut r));
        let got = evolve_oneform(&pg, &xi, &h);
        let w = &pg.omega;
        for i in 0..2 {
            let mut acc = num_complex::Complex::new(0.0, 0.0);
            for k in 0..2 {
                let mut vk = num_complex::Complex::new(0.0, 0.0);
                for s in 0..2 {
                    vk -= w.value(&[s, k]) * h.d1(s);
                }
                let mut c = xi.at(&[i]).d1(k);
                for j in 0..2 {
                    c -= pg.gamma.value(&[j, k, i]) * xi.value(&[j]);
                }
                acc += vk * c;
            }
            assert!((got.value(&[i]) - acc).norm() < 1e-12);
        }
    }
}

#[test]
fn flow_reproduces_bracket_and_is_a_derivation() {
    let geo = make_cpn::<f64>(1).unwrap();
    let hx = parse("(x1^2 + x2^2)/(1 + x1^2 + x2^2)", 2).unwrap();
    let mut r = rng(47);
    for pg in points(&geo, 3, 48) {
        let h = hx.eval_jet(&pg.point).unwrap();
        let v = ham_vf(&pg, &h);
        for _ in 0..10 {
            let a = poly(&pg, &mut r);
            let va: Jet<f64> = (0..2).map(|k| v[k].mul_jet(&a.partial(k))).fold(Jet::zero(2), |s, t| &s + &t);
            assert!((&va - &poisson_bracket(&a, &h, &pg.omega)).max_abs() < 1e-10);
            let b = poly(&pg, &mut r);
            let lhs = evolve(&pg, &a.mul_jet(&b), &h);
            let rhs = &a.mul_jet(&evolve(&pg, &b, &h)) + &b.mul_jet(&evolve(&pg, &a, &h));
            assert!((&lhs - &rhs).max_abs() < 1e-10);
        }
    }
}

#[test]
fn harmonic_oscillator_defect_of_momentum() {
    // V = ½ m Ω² q², a = p: defect = m Ω² dq
    let geo = Arc::new(make_flat::<f64>(1, 1.0).unwrap());
    let (m, om) = (1.5, 2.0);
    let sys = HamiltonianSystem::canonical(geo.clone(), m, &format!("{}*q1^2", 0.5 * m * om * om)).unwrap();
    for pg in points(&geo, 5, 49) {
        let a = pg.coords()[1].clone();
        let dfx = evolution_defect(&pg, &a, &sys.h_at(&pg.point).unwrap());
        assert!((dfx.value(&[0]).re - m * om * om).abs() < 1e-12);
        assert!(dfx.value(&[1]).norm() < 1e-12);
    }
}
