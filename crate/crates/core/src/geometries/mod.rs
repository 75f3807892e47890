//! Built-in geometries: flat canonical phase space, complex projective space
//! with its Fubini-Study data, and small torsionful test geometries.

pub mod catalogue;

use std::sync::Arc;

use num_complex::Complex;

use crate::geometry::{Chart, ConnectionSpec, DerivativeMode, GeometryData, TensorProvider};
use crate::jet::{Jet, Univariate};
use crate::scalar::{cim, cre, cst, Real};
use crate::tensor::Tensor;
use crate::Error;

/// `∂x^c/∂x^a` under the signed mod `2n` rule `x^b = −x^{b+2n}`
/// (0-based indices, any integers).
pub fn kappa(a: i64, c: i64, n: usize) -> i32 {
    let m = 2 * n as i64;
    let diff = a - c;
    if diff.rem_euclid(m) != 0 {
        0
    } else if (diff / m).rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

fn delta_tensor<T: Real>(d: usize) -> Tensor<T> {
    Tensor::from_fn(d, 2, |i| {
        Jet::constant(d, cre(if i[0] == i[1] { 1.0 } else { 0.0 }))
    })
}

/// `ω^{q^i p^j} = δ_{ij}` with `q^i = x^i`, `p^i = x^{i+n}`.
fn canonical_poisson<T: Real>(d: usize) -> Tensor<T> {
    let n = d / 2;
    Tensor::from_fn(d, 2, |i| {
        let v = if i[1] == i[0] + n {
            1.0
        } else if i[0] == i[1] + n {
            -1.0
        } else {
            0.0
        };
        Jet::constant(d, cre(v))
    })
}

fn constant_provider<T: Real>(t: Tensor<T>) -> TensorProvider<T> {
    Arc::new(move |p: &[T]| {
        if p.len() != t.dim() {
            return Err(Error::DimensionMismatch {
                expected: t.dim(),
                got: p.len(),
            });
        }
        // re-expand around the point so jet orders match coordinate jets
        Ok(t.map(|j| Jet::constant(t.dim(), j.value())))
    })
}

/// `ℝ^{2n}` with Euclidean metric, canonical Poisson bracket, `Γ = 0` and
/// `λ = iħ`.
pub fn make_flat<T: Real>(n: usize, hbar: T) -> Result<GeometryData<T>, Error> {
    if n == 0 {
        return Err(Error::InvalidChart("flat needs n >= 1".into()));
    }
    let d = 2 * n;
    let chart = Chart::new(d, true)?;
    Ok(GeometryData::new(
        format!("flat-{n}"),
        chart,
        constant_provider(delta_tensor(d)),
        constant_provider(canonical_poisson(d)),
        ConnectionSpec::Explicit(constant_provider(Tensor::zeros(d, 3))),
    )
    .with_inverse_metric(constant_provider(delta_tensor(d)))
    .with_mode(DerivativeMode::Analytic)
    .with_box(cst(1.0))
    .with_lambda_value(Complex::new(T::zero(), hbar)))
}

/// Closed-form Fubini-Study data at a point of the `w₀ ≠ 0` patch.
#[derive(Clone, Debug)]
pub struct CpnClosedForms<T> {
    /// `t² = 1/(1 + Σ (x^a)²)`
    pub t2: Jet<T>,
    pub g: Tensor<T>,
    pub ginv: Tensor<T>,
    /// `ω^{ab}`
    pub omega: Tensor<T>,
    /// `ω_{ab}`
    pub omega_low: Tensor<T>,
    /// `Γ^a_{bc}`
    pub gamma: Tensor<T>,
    /// `R^p_{cqb}` stored in that index order.
    pub riemann: Tensor<T>,
}

/// Coordinate jets with the signed mod `2n` accessor.
#[derive(Clone, Debug)]
pub struct CpnChart<T> {
    pub n: usize,
    pub xs: Vec<Jet<T>>,
}

impl<T: Real> CpnChart<T> {
    pub fn new(n: usize, point: &[T]) -> Result<Self, Error> {
        if point.len() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                got: point.len(),
            });
        }
        Ok(Self {
            n,
            xs: Jet::coordinates(point),
        })
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// `x^b` for any integer `b`.
    pub fn x(&self, b: i64) -> Jet<T> {
        let m = self.dim() as i64;
        let r = b.rem_euclid(2 * m);
        if r < m {
            self.xs[r as usize].clone()
        } else {
            -&self.xs[(r - m) as usize]
        }
    }

    pub fn kappa(&self, a: i64, c: i64) -> T {
        cst(kappa(a, c, self.n) as f64)
    }

    pub fn t2(&self) -> Jet<T> {
        let d = self.dim();
        let mut s = Jet::constant(d, cre(1.0));
        for x in &self.xs {
            s.add_product(x, x);
        }
        s.compose(Univariate::Recip).expect("1 + |x|^2 > 0")
    }

    pub fn z(&self, i: usize) -> Jet<T> {
        &self.xs[i] + &self.xs[i + self.n].scale(cim(1.0))
    }

    pub fn zbar(&self, i: usize) -> Jet<T> {
        &self.xs[i] - &self.xs[i + self.n].scale(cim(1.0))
    }

    pub fn closed_forms(&self) -> CpnClosedForms<T> {
        let n = self.n as i64;
        let d = self.dim();
        let t2 = self.t2();
        let t4 = t2.mul_jet(&t2);
        let tm2 = t2.compose(Univariate::Recip).expect("t > 0");
        let k = |a: usize, c: i64| Jet::constant(d, Complex::new(self.kappa(a as i64, c), T::zero()));
        let x = |b: i64| self.x(b);
        let two = cst::<T>(2.0);
        let half = cst::<T>(0.5);
        let g = Tensor::from_fn(d, 2, |i| {
            let (a, b) = (i[0] as i64, i[1] as i64);
            let quad = &x(a).mul_jet(&x(b)) + &x(a + n).mul_jet(&x(b + n));
            &t2.mul_jet(&k(i[0], b)).scale_real(two) - &t4.mul_jet(&quad).scale_real(two)
        });
        let ginv = Tensor::from_fn(d, 2, |i| {
            let (a, b) = (i[0] as i64, i[1] as i64);
            let s = &(&k(i[0], b) + &x(a).mul_jet(&x(b))) + &x(a + n).mul_jet(&x(b + n));
            tm2.mul_jet(&s).scale_real(half)
        });
        let omega = Tensor::from_fn(d, 2, |i| {
            let (a, b) = (i[0] as i64, i[1] as i64);
            let s = &(&k(i[0], b + n) + &x(a).mul_jet(&x(b + n))) - &x(a + n).mul_jet(&x(b));
            tm2.mul_jet(&s).scale_real(half)
        });
        let omega_low = Tensor::from_fn(d, 2, |i| {
            let (a, b) = (i[0] as i64, i[1] as i64);
            let quad = &x(a).mul_jet(&x(b + n)) - &x(a + n).mul_jet(&x(b));
            &t2.mul_jet(&k(i[0], b + n)).scale_real(two) - &t4.mul_jet(&quad).scale_real(two)
        });
        let gamma = Tensor::from_fn(d, 3, |i| {
            let (a, b, c) = (i[0] as i64, i[1] as i64, i[2] as i64);
            let mut s = x(c).mul_jet(&k(i[0], b));
            s += &x(b).mul_jet(&k(i[0], c));
            s += &x(b + n).mul_jet(&k((a + n).rem_euclid(2 * d as i64) as usize, c));
            s += &x(c + n).mul_jet(&k((a + n).rem_euclid(2 * d as i64) as usize, b));
            -&t2.mul_jet(&s)
        });
        // κ with a shifted first index; kappa only depends on differences
        let kk = |a: i64, c: i64| self.kappa(a, c);
        let riemann = Tensor::from_fn(d, 4, |i| {
            let (p, c, q, b) = (i[0], i[1], i[2], i[3]);
            let (pi, qi, bi, ci) = (p as i64, q as i64, b as i64, c as i64);
            let mut s = g.at(&[c, b]).scale_real(half * kk(pi, qi));
            s -= &g.at(&[c, q]).scale_real(half * kk(pi, bi));
            s += &omega_low.at(&[b, c]).scale_real(half * kk(pi + n, qi));
            s -= &omega_low.at(&[q, c]).scale_real(half * kk(pi + n, bi));
            s += &omega_low.at(&[b, q]).scale_real(kk(pi + n, ci));
            s
        });
        CpnClosedForms {
            t2,
            g,
            ginv,
            omega,
            omega_low,
            gamma,
            riemann,
        }
    }
}

/// `CP^n` on the `w₀ ≠ 0` patch with the Fubini-Study metric, its Kähler
/// Poisson structure and Levi-Civita connection, all in closed form.
pub fn make_cpn<T: Real>(n: usize) -> Result<GeometryData<T>, Error> {
    if n == 0 {
        return Err(Error::InvalidChart("cpn needs n >= 1".into()));
    }
    let d = 2 * n;
    let field = move |which: u8| -> TensorProvider<T> {
        Arc::new(move |p: &[T]| {
            let cf = CpnChart::new(n, p)?.closed_forms();
            Ok(match which {
                0 => cf.g,
                1 => cf.ginv,
                2 => cf.omega,
                _ => cf.gamma,
            })
        })
    };
    Ok(GeometryData::new(
        format!("cpn-{n}"),
        Chart::new(d, true)?,
        field(0),
        field(2),
        ConnectionSpec::LeviCivitaClosedForm(field(3)),
    )
    .with_inverse_metric(field(1))
    .with_mode(DerivativeMode::Analytic)
    .with_box(cst(0.75)))
}

/// Flat `ℝ²` with Euclidean metric, canonical `ω` and the single nonzero
/// symbol `Γ^1_{12} = f(x)`: either the second coordinate (curved, torsion
/// not parallel) or a constant.
pub fn make_torsion_example<T: Real>(constant: Option<T>) -> GeometryData<T> {
    let gamma: TensorProvider<T> = Arc::new(move |p: &[T]| {
        if p.len() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: p.len(),
            });
        }
        let mut t = Tensor::zeros(2, 3);
        let f = match constant {
            Some(c) => Jet::constant(2, Complex::new(c, T::zero())),
            None => Jet::variable(p, 1),
        };
        t.set(&[0, 0, 1], f);
        Ok(t)
    });
    let id = if constant.is_some() {
        "torsion-const"
    } else {
        "torsion"
    };
    GeometryData::new(
        id,
        Chart::new(2, false).expect("valid chart"),
        constant_provider(delta_tensor(2)),
        constant_provider(canonical_poisson(2)),
        ConnectionSpec::Explicit(gamma),
    )
    .with_inverse_metric(constant_provider(delta_tensor(2)))
    .with_mode(DerivativeMode::Analytic)
}

/// Complex-frame fields of `CP^n` at one point (real-frame components).
#[derive(Clone, Debug)]
pub struct CpnFrame<T> {
    pub chart: CpnChart<T>,
    pub t2: Jet<T>,
    pub z: Vec<Jet<T>>,
    pub zbar: Vec<Jet<T>>,
    /// `w^i = t z^i`
    pub w: Vec<Jet<T>>,
    pub wbar: Vec<Jet<T>>,
    pub dz: Vec<Tensor<T>>,
    pub dzbar: Vec<Tensor<T>>,
    /// `τ = Σ z̄^i dz^i / (1 + |z|²)`
    pub tau: Tensor<T>,
    pub taubar: Tensor<T>,
    /// `γ = t² dz̄^i ⊗ dz^i − τ̄ ⊗ τ`
    pub gamma: Tensor<T>,
    pub gammabar: Tensor<T>,
    /// `ϖ = ω_{ab} dx^b ∧ dx^a` as form components.
    pub varpi: Tensor<T>,
    /// `i(γ̄ − γ)`
    pub varpi_tilde: Tensor<T>,
    /// `K₀ = ln(1 + |z|²)`
    pub k0: Jet<T>,
    /// `g_{i j̄} = t² δ_{ij} − t⁴ z̄^i z^j`
    pub g_hol: Vec<Vec<Jet<T>>>,
}

impl<T: Real> CpnFrame<T> {
    pub fn n(&self) -> usize {
        self.chart.n
    }

    /// `dz^i_±`
    pub fn dz_pm(&self, i: usize, plus: bool) -> &Tensor<T> {
        if plus {
            &self.dz[i]
        } else {
            &self.dzbar[i]
        }
    }

    pub fn tau_pm(&self, plus: bool) -> &Tensor<T> {
        if plus {
            &self.tau
        } else {
            &self.taubar
        }
    }

    pub fn gamma_pm(&self, plus: bool) -> &Tensor<T> {
        if plus {
            &self.gamma
        } else {
            &self.gammabar
        }
    }
}

/// Frame fields for a geometry built by [`make_cpn`].
pub fn cpn_frame<T: Real>(geo: &GeometryData<T>, point: &[T]) -> Result<CpnFrame<T>, Error> {
    if !geo.id.starts_with("cpn-") {
        return Err(Error::UnknownGeometry(format!(
            "{} is not a projective-space geometry",
            geo.id
        )));
    }
    let n = geo.dim() / 2;
    let chart = CpnChart::new(n, point)?;
    let d = 2 * n;
    let cf = chart.closed_forms();
    let t2 = cf.t2.clone();
    let t = t2.compose(Univariate::Sqrt)?;
    let z: Vec<_> = (0..n).map(|i| chart.z(i)).collect();
    let zbar: Vec<_> = (0..n).map(|i| chart.zbar(i)).collect();
    let w: Vec<_> = z.iter().map(|zi| zi.mul_jet(&t)).collect();
    let wbar: Vec<_> = zbar.iter().map(|zi| zi.mul_jet(&t)).collect();
    let dz: Vec<_> = (0..n)
        .map(|i| {
            let mut c = vec![cre::<T>(0.0); d];
            c[i] = cre(1.0);
            c[i + n] = cim(1.0);
            Tensor::covector(d, &c)
        })
        .collect();
    let dzbar: Vec<_> = dz.iter().map(|x| x.conj()).collect();
    let mut tau = Tensor::zeros(d, 1);
    for i in 0..n {
        tau = &tau + &dz[i].mul_jet(&zbar[i].mul_jet(&t2));
    }
    let taubar = tau.conj();
    let mut gamma = &Tensor::zeros(d, 2) - &taubar.outer(&tau);
    for i in 0..n {
        gamma = &gamma + &dzbar[i].outer(&dz[i]).mul_jet(&t2);
    }
    let gammabar = gamma.conj();
    let varpi = Tensor::from_fn(d, 2, |i| {
        cf.omega_low.at(&[i[1], i[0]]) - cf.omega_low.at(&[i[0], i[1]])
    });
    let varpi_tilde = (&gammabar - &gamma).scale(cim(1.0));
    let k0 = t2.compose(Univariate::Ln)?.scale_real(-T::one());
    let t4 = t2.mul_jet(&t2);
    let g_hol = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut v = -&t4.mul_jet(&zbar[i].mul_jet(&z[j]));
                    if i == j {
                        v += &t2;
                    }
                    v
                })
                .collect()
        })
        .collect();
    Ok(CpnFrame {
        chart,
        t2,
        z,
        zbar,
        w,
        wbar,
        dz,
        dzbar,
        tau,
        taubar,
        gamma,
        gammabar,
        varpi,
        varpi_tilde,
        k0,
        g_hol,
    })
}

/// Look up a built-in geometry by CLI name.
pub fn builtin<T: Real>(name: &str, n: usize, hbar: T) -> Result<GeometryData<T>, Error> {
    match name {
        "flat" => make_flat(n, hbar),
        "cpn" => make_cpn(n),
        "torsion" => Ok(make_torsion_example(None)),
        "torsion-const" => Ok(make_torsion_example(Some(T::one()))),
        other => Err(Error::UnknownGeometry(other.to_string())),
    }
}
