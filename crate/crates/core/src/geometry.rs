//! Classical tensor calculus on a single coordinate chart.
//!
//! Index conventions used throughout the crate:
//!
//! * `Γ` is stored as `gamma[i][j][k] = Γ^i_{jk}` with `∇_j dx^i = −Γ^i_{jk} dx^k`,
//!   so the first lower index is the direction of differentiation.
//! * Covariant derivatives append the derivative slot last (`X_{…;m}`).
//! * `R^c_{dab}` is fixed by `[∇_a, ∇_b] dx^c = −R^c_{dab} dx^d`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::jet::Jet;
use crate::lambda::LambdaScalar;
use crate::scalar::{cst, Real};
use crate::tensor::{QTensor, Tensor};
use crate::Error;

#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub dim: usize,
    pub names: Vec<String>,
    /// `z^k = x^k + i x^{k+n}` pairing on a `2n`-dimensional chart.
    pub complex_pairing: bool,
}

impl Chart {
    pub fn new(dim: usize, complex_pairing: bool) -> Result<Self, Error> {
        if dim == 0 {
            return Err(Error::InvalidChart("dimension must be at least 1".into()));
        }
        if complex_pairing && dim % 2 != 0 {
            return Err(Error::InvalidChart(
                "complex pairing needs an even dimension".into(),
            ));
        }
        Ok(Self {
            dim,
            names: (1..=dim).map(|k| format!("x{k}")).collect(),
            complex_pairing,
        })
    }
}

/// Point → component jets.
pub type TensorProvider<T> = Arc<dyn Fn(&[T]) -> Result<Tensor<T>, Error> + Send + Sync>;

#[derive(Clone)]
pub enum ConnectionSpec<T> {
    /// Derive `Γ` from the metric.
    LeviCivita,
    Explicit(TensorProvider<T>),
    /// Closed-form symbols known to be the Levi-Civita connection of `g`.
    LeviCivitaClosedForm(TensorProvider<T>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivativeMode {
    /// Closed-form fields expanded exactly in jet arithmetic.
    Analytic,
    /// Parsed user expressions.
    Jet,
}

/// Which covariant slot receives the raised index when lowering torsion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ContorsionLowering {
    /// `T_{mjk} = g_{mr} T^r_{jk}`.
    #[default]
    FirstSlot,
    /// `T_{jkm} = g_{mr} T^r_{jk}`.
    LastSlot,
}

#[derive(Clone)]
pub struct GeometryData<T> {
    pub id: String,
    pub chart: Chart,
    metric: TensorProvider<T>,
    inverse_metric: Option<TensorProvider<T>>,
    poisson: TensorProvider<T>,
    connection: ConnectionSpec<T>,
    pub mode: DerivativeMode,
    /// Samples are drawn uniformly from `[-box_half_width, box_half_width]^dim`.
    pub box_half_width: T,
    /// Numerical value substituted for `λ` when a physical reading is wanted.
    pub lambda_value: Complex<T>,
    pub contorsion_lowering: ContorsionLowering,
}

impl<T> fmt::Debug for GeometryData<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeometryData")
            .field("id", &self.id)
            .field("chart", &self.chart)
            .field("mode", &self.mode)
            .finish_non_exhaustive()
    }
}

impl<T: Real> GeometryData<T> {
    pub fn new(
        id: impl Into<String>,
        chart: Chart,
        metric: TensorProvider<T>,
        poisson: TensorProvider<T>,
        connection: ConnectionSpec<T>,
    ) -> Self {
        Self {
            id: id.into(),
            chart,
            metric,
            inverse_metric: None,
            poisson,
            connection,
            mode: DerivativeMode::Jet,
            box_half_width: cst(1.0),
            lambda_value: Complex::new(T::one(), T::zero()),
            contorsion_lowering: ContorsionLowering::default(),
        }
    }

    pub fn with_inverse_metric(mut self, inv: TensorProvider<T>) -> Self {
        self.inverse_metric = Some(inv);
        self
    }

    pub fn with_mode(mut self, mode: DerivativeMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_box(mut self, half_width: T) -> Self {
        self.box_half_width = half_width;
        self
    }

    pub fn with_lambda_value(mut self, lambda: Complex<T>) -> Self {
        self.lambda_value = lambda;
        self
    }

    pub fn dim(&self) -> usize {
        self.chart.dim
    }

    pub fn is_levi_civita(&self) -> bool {
        matches!(
            self.connection,
            ConnectionSpec::LeviCivita | ConnectionSpec::LeviCivitaClosedForm(_)
        )
    }

    /// Read a λ-graded value at the configured numerical `λ`.
    pub fn evaluate_lambda(&self, s: LambdaScalar<T>) -> Complex<T> {
        s.a0() + self.lambda_value * s.a1()
    }

    /// Seeded uniform samples in the sampling box.
    pub fn sample_points(&self, count: usize, seed: u64) -> Vec<Vec<T>> {
        sample_box(self.dim(), self.box_half_width, count, seed)
    }

    pub fn at(&self, point: &[T]) -> Result<PointGeometry<T>, Error> {
        let d = self.dim();
        if point.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: point.len(),
            });
        }
        let g = (self.metric)(point)?;
        let ginv = match &self.inverse_metric {
            Some(p) => p(point)?,
            None => invert(&g, point)?,
        };
        let omega = (self.poisson)(point)?;
        let (gamma, lc) = match &self.connection {
            ConnectionSpec::LeviCivita => {
                let lc = christoffel(&g, &ginv);
                (lc.clone(), lc)
            }
            ConnectionSpec::Explicit(p) => (p(point)?, christoffel(&g, &ginv)),
            ConnectionSpec::LeviCivitaClosedForm(p) => {
                let gamma = p(point)?;
                (gamma.clone(), gamma)
            }
        };
        let torsion = torsion(&gamma);
        let riemann = curvature(&gamma);
        let contorsion = contorsion(&torsion, &g, &ginv, self.contorsion_lowering);
        Ok(PointGeometry {
            point: point.to_vec(),
            g,
            ginv,
            omega,
            gamma,
            lc_gamma: lc,
            torsion,
            riemann,
            contorsion,
        })
    }
}

pub fn sample_box<T: Real>(dim: usize, half_width: T, count: usize, seed: u64) -> Vec<Vec<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = half_width.to_f64().unwrap_or(1.0);
    (0..count)
        .map(|_| (0..dim).map(|_| cst(rng.gen_range(-w..w))).collect())
        .collect()
}

/// All classical data at one chart point, as jets.
#[derive(Clone, Debug)]
pub struct PointGeometry<T> {
    pub point: Vec<T>,
    /// `g_{ij}`
    pub g: Tensor<T>,
    /// `g^{ij}`
    pub ginv: Tensor<T>,
    /// `ω^{ij}`
    pub omega: Tensor<T>,
    /// `Γ^i_{jk}` of the Poisson connection.
    pub gamma: Tensor<T>,
    /// Levi-Civita symbols of `g`.
    pub lc_gamma: Tensor<T>,
    /// `T^i_{jk}`
    pub torsion: Tensor<T>,
    /// `R^c_{dab}`
    pub riemann: Tensor<T>,
    /// `S^i_{jk}`
    pub contorsion: Tensor<T>,
}

impl<T: Real> PointGeometry<T> {
    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn coords(&self) -> Vec<Jet<T>> {
        Jet::coordinates(&self.point)
    }

    /// `∇_m` on a tensor with the given slot variances, derivative slot last.
    pub fn cov(&self, x: &Tensor<T>, slots: &[Slot]) -> Tensor<T> {
        cov_deriv(x, slots, &self.gamma)
    }

    /// Covariant derivative of a fully covariant tensor.
    pub fn cov_down(&self, x: &Tensor<T>) -> Tensor<T> {
        cov_deriv(x, &vec![Slot::Down; x.rank()], &self.gamma)
    }

    /// Same with the Levi-Civita connection.
    pub fn lc_cov_down(&self, x: &Tensor<T>) -> Tensor<T> {
        cov_deriv(x, &vec![Slot::Down; x.rank()], &self.lc_gamma)
    }

    /// Covariant derivative of both grades; `Γ` is classical.
    pub fn qcov_down(&self, x: &QTensor<T>) -> QTensor<T> {
        x.map(|t| self.cov_down(t))
    }

    /// `T^i_{jk;m}`
    pub fn torsion_derivative(&self) -> Tensor<T> {
        self.cov(&self.torsion, &[Slot::Up, Slot::Down, Slot::Down])
    }

    /// Contraction `ω^{ij} a_{,i}` (the Hamiltonian vector field `â`).
    pub fn hamiltonian_vf(&self, a: &Jet<T>) -> Vec<Jet<T>> {
        let d = self.dim();
        (0..d)
            .map(|j| {
                let mut acc = Jet::zero(d);
                for i in 0..d {
                    acc.add_product(self.omega.at(&[i, j]), &a.partial(i));
                }
                acc
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    Up,
    Down,
}

/// Jet-valued matrix inverse by Gauss-Jordan elimination with partial
/// pivoting on the classical values.
pub fn invert<T: Real>(m: &Tensor<T>, point: &[T]) -> Result<Tensor<T>, Error> {
    assert_eq!(m.rank(), 2);
    let d = m.dim();
    let mut a: Vec<Vec<Jet<T>>> = (0..d)
        .map(|i| (0..d).map(|j| m.at(&[i, j]).clone()).collect())
        .collect();
    let one = Complex::new(T::one(), T::zero());
    let mut inv: Vec<Vec<Jet<T>>> = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    if i == j {
                        Jet::constant(d, one)
                    } else {
                        Jet::zero(d)
                    }
                })
                .collect()
        })
        .collect();
    let scale = m.max_abs().max(T::one());
    let degenerate = || Error::DegenerateMetric(point.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect());
    for col in 0..d {
        let pivot = (col..d)
            .max_by(|&r, &s| {
                a[r][col]
                    .value()
                    .norm()
                    .partial_cmp(&a[s][col].value().norm())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty range");
        if a[pivot][col].value().norm() <= T::epsilon() * scale * cst(16.0) {
            return Err(degenerate());
        }
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].compose(crate::jet::Univariate::Recip).map_err(|_| degenerate())?;
        for j in 0..d {
            a[col][j] = a[col][j].mul_jet(&p);
            inv[col][j] = inv[col][j].mul_jet(&p);
        }
        for r in 0..d {
            if r == col {
                continue;
            }
            let f = a[r][col].clone();
            if f.is_zero() {
                continue;
            }
            for j in 0..d {
                let t = f.mul_jet(&a[col][j]);
                a[r][j] -= &t;
                let t = f.mul_jet(&inv[col][j]);
                inv[r][j] -= &t;
            }
        }
    }
    Ok(Tensor::from_fn(d, 2, |i| inv[i[0]][i[1]].clone()))
}

/// `Γ^i_{jk} = ½ g^{im}(g_{mj,k} + g_{mk,j} − g_{jk,m})`.
pub fn christoffel<T: Real>(g: &Tensor<T>, ginv: &Tensor<T>) -> Tensor<T> {
    let d = g.dim();
    let dg = g.partial();
    let half = cst::<T>(0.5);
    // Γ_{m,jk} first
    let lowered = Tensor::from_fn(d, 3, |idx| {
        let (m, j, k) = (idx[0], idx[1], idx[2]);
        let s = &(dg.at(&[m, j, k]) + dg.at(&[m, k, j])) - dg.at(&[j, k, m]);
        s.scale_real(half)
    });
    Tensor::from_fn(d, 3, |idx| {
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        let mut acc = Jet::zero(d);
        for m in 0..d {
            acc.add_product(ginv.at(&[i, m]), lowered.at(&[m, j, k]));
        }
        acc
    })
}

/// `R^c_{dab} = ∂_a Γ^c_{bd} − ∂_b Γ^c_{ad} + Γ^c_{ae} Γ^e_{bd} − Γ^c_{be} Γ^e_{ad}`.
pub fn curvature<T: Real>(gamma: &Tensor<T>) -> Tensor<T> {
    let d = gamma.dim();
    let dgam = gamma.partial();
    let gamma = &gamma.truncate(dgam.order());
    Tensor::from_fn(d, 4, |idx| {
        let (c, dd, a, b) = (idx[0], idx[1], idx[2], idx[3]);
        let mut acc = dgam.at(&[c, b, dd, a]) - dgam.at(&[c, a, dd, b]);
        for e in 0..d {
            acc.add_product(gamma.at(&[c, a, e]), gamma.at(&[e, b, dd]));
            let t = gamma.at(&[c, b, e]).mul_jet(gamma.at(&[e, a, dd]));
            acc -= &t;
        }
        acc
    })
}

/// `T^i_{jk} = Γ^i_{jk} − Γ^i_{kj}`.
pub fn torsion<T: Real>(gamma: &Tensor<T>) -> Tensor<T> {
    Tensor::from_fn(gamma.dim(), 3, |i| {
        gamma.at(&[i[0], i[1], i[2]]) - gamma.at(&[i[0], i[2], i[1]])
    })
}

/// `S^i_{jk} = ½ g^{im}(T_{mjk} − T_{jkm} − T_{kjm})`.
pub fn contorsion<T: Real>(
    torsion: &Tensor<T>,
    g: &Tensor<T>,
    ginv: &Tensor<T>,
    lowering: ContorsionLowering,
) -> Tensor<T> {
    let d = g.dim();
    // lowered[(x, y, z)] = T_{xyz} in the chosen convention
    let lowered = Tensor::from_fn(d, 3, |idx| {
        let mut acc = Jet::zero(d);
        match lowering {
            ContorsionLowering::FirstSlot => {
                for r in 0..d {
                    acc.add_product(g.at(&[idx[0], r]), torsion.at(&[r, idx[1], idx[2]]));
                }
            }
            ContorsionLowering::LastSlot => {
                for r in 0..d {
                    acc.add_product(g.at(&[idx[2], r]), torsion.at(&[r, idx[0], idx[1]]));
                }
            }
        }
        acc
    });
    let half = cst::<T>(0.5);
    Tensor::from_fn(d, 3, |idx| {
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        let mut acc = Jet::zero(d);
        for m in 0..d {
            let inner = &(lowered.at(&[m, j, k]) - lowered.at(&[j, k, m])) - lowered.at(&[k, j, m]);
            acc.add_product(ginv.at(&[i, m]), &inner);
        }
        acc.scale_real(half)
    })
}

/// Covariant derivative with `+Γ` per contravariant and `−Γ` per covariant
/// slot; the derivative slot is appended last.
pub fn cov_deriv<T: Real>(x: &Tensor<T>, slots: &[Slot], gamma: &Tensor<T>) -> Tensor<T> {
    assert_eq!(slots.len(), x.rank());
    let d = x.dim();
    let r = x.rank();
    let dx = x.partial();
    let mut tmp = vec![0; r];
    Tensor::from_fn(d, r + 1, |idx| {
        let m = idx[r];
        let mut acc = dx.at(idx).clone();
        for (s, slot) in slots.iter().enumerate() {
            tmp.copy_from_slice(&idx[..r]);
            for k in 0..d {
                tmp[s] = k;
                match slot {
                    Slot::Up => acc.add_product(gamma.at(&[idx[s], m, k]), x.at(&tmp)),
                    Slot::Down => {
                        let t = gamma.at(&[k, m, idx[s]]).mul_jet(x.at(&tmp));
                        acc -= &t;
                    }
                }
            }
        }
        acc
    })
}

/// `{a, b} = ω^{ij} a_{,i} b_{,j}`.
pub fn poisson_bracket<T: Real>(a: &Jet<T>, b: &Jet<T>, omega: &Tensor<T>) -> Jet<T> {
    let d = a.dim();
    let da: Vec<_> = (0..d).map(|i| a.partial(i)).collect();
    let db: Vec<_> = (0..d).map(|j| b.partial(j)).collect();
    let mut acc = Jet::zero(d);
    for i in 0..d {
        for j in 0..d {
            let w = omega.at(&[i, j]);
            if w.is_zero() {
                continue;
            }
            acc.add_product(w, &da[i].mul_jet(&db[j]));
        }
    }
    acc
}

/// Left-hand sides of the Poisson-compatibility, Jacobi and metricity
/// conditions.
#[derive(Clone, Debug)]
pub struct CompatResiduals<T> {
    /// `ω^{ij}_{;m} + ω^{ik}T^j_{km} − ω^{jk}T^i_{km}`, indices `(i,j,m)`.
    pub t1: Tensor<T>,
    /// `Σ_{cyclic(i,j,k)} ω^{im}ω^{jn}T^k_{mn}`.
    pub t2: Tensor<T>,
    /// `g_{mn;k}`.
    pub mg: Tensor<T>,
}

pub fn compat_residuals<T: Real>(pg: &PointGeometry<T>) -> CompatResiduals<T> {
    let d = pg.dim();
    let (om, tor) = (&pg.omega, &pg.torsion);
    let dom = pg.cov(om, &[Slot::Up, Slot::Up]);
    let t1 = Tensor::from_fn(d, 3, |idx| {
        let (i, j, m) = (idx[0], idx[1], idx[2]);
        let mut acc = dom.at(idx).clone();
        for k in 0..d {
            acc.add_product(om.at(&[i, k]), tor.at(&[j, k, m]));
            let t = om.at(&[j, k]).mul_jet(tor.at(&[i, k, m]));
            acc -= &t;
        }
        acc
    });
    let cyc = |i: usize, j: usize, k: usize| {
        let mut acc = Jet::zero(d);
        for m in 0..d {
            for n in 0..d {
                let t = om.at(&[i, m]).mul_jet(om.at(&[j, n]));
                acc.add_product(&t, tor.at(&[k, m, n]));
            }
        }
        acc
    };
    let t2 = Tensor::from_fn(d, 3, |idx| {
        let (i, j, k) = (idx[0], idx[1], idx[2]);
        &(&cyc(i, j, k) + &cyc(j, k, i)) + &cyc(k, i, j)
    });
    let mg = pg.cov_down(&pg.g);
    CompatResiduals { t1, t2, mg }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cre;

    type Tn = Tensor<f64>;

    fn kron(d: usize) -> TensorProvider<f64> {
        Arc::new(move |_p: &[f64]| {
            Ok(Tn::from_fn(d, 2, |i| {
                Jet::constant(d, cre(if i[0] == i[1] { 1.0 } else { 0.0 }))
            }))
        })
    }

    fn canonical(d: usize) -> TensorProvider<f64> {
        Arc::new(move |_p: &[f64]| {
            let n = d / 2;
            Ok(Tn::from_fn(d, 2, |i| {
                let v = if i[1] == i[0] + n {
                    1.0
                } else if i[0] == i[1] + n {
                    -1.0
                } else {
                    0.0
                };
                Jet::constant(d, cre(v))
            }))
        })
    }

    fn conformal_flat() -> GeometryData<f64> {
        let metric: TensorProvider<f64> = Arc::new(|p: &[f64]| {
            let x = Jet::coordinates(p);
            let e = x[0].scale_real(2.0).compose(crate::jet::Univariate::Exp)?;
            Ok(Tn::from_fn(2, 2, |i| if i[0] == i[1] { e.clone() } else { Jet::zero(2) }))
        });
        GeometryData::new(
            "conformal",
            Chart::new(2, false).unwrap(),
            metric,
            canonical(2),
            ConnectionSpec::LeviCivita,
        )
    }

    #[test]
    fn euclidean_christoffel_vanishes() {
        let geo = GeometryData::new(
            "flat",
            Chart::new(3, false).unwrap(),
            kron(3),
            Arc::new(|_p: &[f64]| Ok(Tn::zeros(3, 2))),
            ConnectionSpec::LeviCivita,
        );
        let pg = geo.at(&[0.1, 0.2, 0.3]).unwrap();
        assert_eq!(pg.gamma.max_abs(), 0.0);
        assert_eq!(pg.riemann.max_abs(), 0.0);
    }

    #[test]
    fn conformal_christoffel_hand_values() {
        // g = e^{2x} δ at x = 0: Γ^1_{11} = 1, Γ^1_{22} = −1, Γ^2_{12} = 1.
        let pg = conformal_flat().at(&[0.0, 0.7]).unwrap();
        let v = |i, j, k| pg.gamma.value(&[i, j, k]).re;
        assert!((v(0, 0, 0) - 1.0).abs() < 1e-14);
        assert!((v(0, 1, 1) + 1.0).abs() < 1e-14);
        assert!((v(1, 0, 1) - 1.0).abs() < 1e-14);
        assert!((v(1, 1, 0) - 1.0).abs() < 1e-14);
        assert!(v(1, 0, 0).abs() < 1e-14 && v(0, 0, 1).abs() < 1e-14);
        // conformally flat 2D: flat since log-conformal factor is linear
        assert!(pg.riemann.max_abs() < 1e-13);
    }

    #[test]
    fn singular_metric_is_reported() {
        let geo = GeometryData::new(
            "degenerate",
            Chart::new(2, false).unwrap(),
            Arc::new(|_p: &[f64]| {
                Ok(Tn::from_fn(2, 2, |i| {
                    Jet::constant(2, cre(if i == [0, 0] { 1.0 } else { 0.0 }))
                }))
            }),
            canonical(2),
            ConnectionSpec::LeviCivita,
        );
        assert!(matches!(geo.at(&[0.0, 0.0]), Err(Error::DegenerateMetric(_))));
    }

    #[test]
    fn chart_validation() {
        assert!(Chart::new(0, false).is_err());
        assert!(Chart::new(3, true).is_err());
        assert!(Chart::new(4, true).is_ok());
    }

    fn synthetic_torsion(c: f64) -> GeometryData<f64> {
        let gamma: TensorProvider<f64> = Arc::new(move |_p: &[f64]| {
            let mut t = Tn::zeros(2, 3);
            t.set(&[0, 0, 1], Jet::constant(2, cre(c)));
            Ok(t)
        });
        GeometryData::new(
            "torsion-const",
            Chart::new(2, false).unwrap(),
            kron(2),
            canonical(2),
            ConnectionSpec::Explicit(gamma),
        )
    }

    #[test]
    fn torsion_of_single_symbol() {
        let pg = synthetic_torsion(0.7).at(&[0.2, 0.1]).unwrap();
        assert!((pg.torsion.value(&[0, 0, 1]).re - 0.7).abs() < 1e-15);
        assert!((pg.torsion.value(&[0, 1, 0]).re + 0.7).abs() < 1e-15);
    }

    #[test]
    fn contorsion_brute_force() {
        // Independent loop: g = δ so lowering is the identity on indices.
        let c = 0.7;
        let pg = synthetic_torsion(c).at(&[0.2, 0.1]).unwrap();
        let tor = |i: usize, j: usize, k: usize| -> f64 {
            match (i, j, k) {
                (0, 0, 1) => c,
                (0, 1, 0) => -c,
                _ => 0.0,
            }
        };
        for i in 0..2 {
            for j in 0..2 {
                for k in 0..2 {
                    // T_{mjk} - T_{jkm} - T_{kjm}, first-slot lowering
                    let direct = 0.5 * (tor(i, j, k) - tor(j, k, i) - tor(k, j, i));
                    assert!((pg.contorsion.value(&[i, j, k]).re - direct).abs() < 1e-15);
                }
            }
        }
        assert!((pg.contorsion.value(&[0, 0, 1]).re - c).abs() < 1e-15);
    }

    #[test]
    fn symmetric_connection_has_no_contorsion() {
        let pg = conformal_flat().at(&[0.3, -0.4]).unwrap();
        assert!(pg.torsion.max_abs() < 1e-15);
        assert!(pg.contorsion.max_abs() < 1e-15);
    }

    #[test]
    fn metricity_and_bracket_on_flat_space() {
        let geo = GeometryData::new(
            "flat",
            Chart::new(2, false).unwrap(),
            kron(2),
            canonical(2),
            ConnectionSpec::LeviCivita,
        );
        let pg = geo.at(&[0.5, -0.25]).unwrap();
        let res = compat_residuals(&pg);
        assert_eq!(res.t1.max_abs(), 0.0);
        assert_eq!(res.t2.max_abs(), 0.0);
        assert_eq!(res.mg.max_abs(), 0.0);
        let x = pg.coords();
        let qp = poisson_bracket(&x[0], &x[1], &pg.omega);
        assert_eq!(qp.value(), cre(1.0));
        let aa = poisson_bracket(&x[0], &x[0], &pg.omega);
        assert!(aa.is_zero());
    }

    #[test]
    fn constant_scalar_has_zero_gradient() {
        let pg = conformal_flat().at(&[0.3, 0.2]).unwrap();
        let c = Tn::scalar(Jet::constant(2, cre(3.5)));
        assert_eq!(pg.cov(&c, &[]).max_abs(), 0.0);
    }

    #[test]
    fn sampling_is_seeded() {
        let geo = conformal_flat().with_box(0.5);
        let a = geo.sample_points(5, 9);
        assert_eq!(a, geo.sample_points(5, 9));
        assert_ne!(a, geo.sample_points(5, 10));
        assert!(a.iter().flatten().all(|x| x.abs() <= 0.5));
    }
}
