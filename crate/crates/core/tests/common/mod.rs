#![allow(dead_code)]

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use semiq_core::geometry::GeometryData;
use semiq_core::{Jet, PointGeometry64, QTensor, Tensor};

pub fn points(geo: &GeometryData<f64>, count: usize, seed: u64) -> Vec<PointGeometry64> {
    geo.sample_points(count, seed)
        .iter()
        .map(|p| geo.at(p).unwrap())
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random real quadratic-plus-cubic polynomial in the chart coordinates.
pub fn poly(pg: &PointGeometry64, r: &mut ChaCha8Rng) -> Jet<f64> {
    let x = pg.coords();
    let d = pg.dim();
    let mut f = Jet::constant(d, Complex::new(r.gen_range(-1.0..1.0), 0.0));
    for i in 0..d {
        f = &f + &x[i].scale_real(r.gen_range(-1.0..1.0));
        for j in i..d {
            let c = r.gen_range(-1.0..1.0);
            f = &f + &x[i].mul_jet(&x[j]).scale_real(c);
        }
    }
    let (a, b, c) = (r.gen_range(0..d), r.gen_range(0..d), r.gen_range(0..d));
    &f + &x[a].mul_jet(&x[b]).mul_jet(&x[c]).scale_real(r.gen_range(-1.0..1.0))
}

/// Random polynomial function with a λ-part.
pub fn qpoly(pg: &PointGeometry64, r: &mut ChaCha8Rng) -> QTensor<f64> {
    let a0 = poly(pg, r);
    let a1 = poly(pg, r).scale(Complex::new(0.0, 0.5));
    QTensor::scalar(a0, a1)
}

/// Random polynomial 1-form with a λ-part.
pub fn qform(pg: &PointGeometry64, r: &mut ChaCha8Rng) -> QTensor<f64> {
    let d = pg.dim();
    let c0 = Tensor::from_fn(d, 1, |_| poly(pg, r));
    let c1 = Tensor::from_fn(d, 1, |_| poly(pg, r).scale(Complex::new(0.0, 0.3)));
    QTensor::new(c0, c1)
}

pub fn worst(v: (f64, f64)) -> f64 {
    v.0.max(v.1)
}
