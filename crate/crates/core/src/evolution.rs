//! Phase-space dynamics as instantaneous rates: Hamiltonian vector fields,
//! evolution of functions and 1-forms, and the defect between `d` and time
//! evolution.

use std::sync::Arc;

use crate::expr::{parse, FieldExpr};
use crate::geometry::{poisson_bracket, GeometryData, PointGeometry};
use crate::jet::Jet;
use crate::scalar::Real;
use crate::semiquant::grad;
use crate::tensor::{ScalarField, Tensor};
use crate::Error;

/// A geometry together with a Hamiltonian.
#[derive(Clone)]
pub struct HamiltonianSystem<T: Real> {
    pub geometry: Arc<GeometryData<T>>,
    pub hamiltonian: Arc<dyn ScalarField<T>>,
    /// Set for the canonical `p²/2m + V(q)` example.
    pub mass: Option<f64>,
    pub potential: Option<FieldExpr>,
}

impl<T: Real> HamiltonianSystem<T> {
    pub fn new(geometry: Arc<GeometryData<T>>, hamiltonian: Arc<dyn ScalarField<T>>) -> Self {
        Self {
            geometry,
            hamiltonian,
            mass: None,
            potential: None,
        }
    }

    /// `H = Σ p_i²/2m + V(q)` on a flat phase space; `potential` is parsed on
    /// the full chart and may only use `q` (or `x1..xn`).
    pub fn canonical(
        geometry: Arc<GeometryData<T>>,
        mass: f64,
        potential: &str,
    ) -> Result<Self, Error> {
        let d = geometry.dim();
        if d % 2 != 0 {
            return Err(Error::InvalidChart("phase space needs an even dimension".into()));
        }
        if mass == 0.0 {
            return Err(Error::Domain("zero mass".into()));
        }
        let v = parse(potential, d)?;
        let kinetic: Vec<String> = (1..=d / 2).map(|k| format!("p{k}^2")).collect();
        let h = format!("({})/(2*{mass:?}) + ({potential})", kinetic.join("+"));
        let h = parse(&h, d)?;
        Ok(Self {
            geometry,
            hamiltonian: Arc::new(h),
            mass: Some(mass),
            potential: Some(v),
        })
    }

    pub fn h_at(&self, point: &[T]) -> Result<Jet<T>, Error> {
        self.hamiltonian.jet_at(point)
    }
}

/// Components of `−Ĥ`: `−ω^{ij} H_{,i}`, so that `ȧ = {a, H} = −Ĥ(a)`.
pub fn ham_vf<T: Real>(pg: &PointGeometry<T>, h: &Jet<T>) -> Vec<Jet<T>> {
    pg.hamiltonian_vf(h).iter().map(|v| -v).collect()
}

/// `ȧ = {a, H}`
pub fn evolve<T: Real>(pg: &PointGeometry<T>, a: &Jet<T>, h: &Jet<T>) -> Jet<T> {
    poisson_bracket(a, h, &pg.omega)
}

/// `∇_v ξ` for a 1-form: `v^k (ξ_{i,k} − Γ^j_{ki} ξ_j)`.
pub fn cov_along<T: Real>(pg: &PointGeometry<T>, v: &[Jet<T>], xi: &Tensor<T>) -> Tensor<T> {
    pg.cov_down(xi).contract_last(v)
}

/// `(ξ)˙ = −∇_Ĥ ξ`
pub fn evolve_oneform<T: Real>(pg: &PointGeometry<T>, xi: &Tensor<T>, h: &Jet<T>) -> Tensor<T> {
    cov_along(pg, &ham_vf(pg, h), xi)
}

/// `(da)˙ − d(ȧ) = −∇_â dH`
pub fn evolution_defect<T: Real>(pg: &PointGeometry<T>, a: &Jet<T>, h: &Jet<T>) -> Tensor<T> {
    let ahat = pg.hamiltonian_vf(a);
    cov_along(pg, &ahat, &grad(h)).scale_real(-T::one())
}

/// `−(1/m) a_{,q^i} dp^i + V_{,q^i q^j} a_{,p^j} dq^i` on flat phase space.
pub fn canonical_defect_display<T: Real>(
    a: &Jet<T>,
    v: &Jet<T>,
    mass: T,
) -> Tensor<T> {
    let d = a.dim();
    let n = d / 2;
    Tensor::from_fn(d, 1, |idx| {
        let k = idx[0];
        if k >= n {
            a.partial(k - n).scale_real(-T::one() / mass)
        } else {
            let mut acc = Jet::zero(d);
            for j in 0..n {
                acc.add_product(&v.partial(k).partial(j), &a.partial(n + j));
            }
            acc
        }
    })
}

/// Pointwise rates for the `evolve` subcommand.
#[derive(Clone, Debug)]
pub struct EvolutionRates<T> {
    pub point: Vec<T>,
    pub flow: Vec<num_complex::Complex<T>>,
    pub a_dot: num_complex::Complex<T>,
    pub da_dot: Vec<num_complex::Complex<T>>,
    pub defect: Vec<num_complex::Complex<T>>,
}

pub fn rates<T: Real>(
    sys: &HamiltonianSystem<T>,
    a: &dyn ScalarField<T>,
    point: &[T],
) -> Result<EvolutionRates<T>, Error> {
    let pg = sys.geometry.at(point)?;
    let h = sys.h_at(point)?;
    let a = a.jet_at(point)?;
    Ok(EvolutionRates {
        point: point.to_vec(),
        flow: ham_vf(&pg, &h).iter().map(Jet::value).collect(),
        a_dot: evolve(&pg, &a, &h).value(),
        da_dot: evolve_oneform(&pg, &grad(&a), &h).values(),
        defect: evolution_defect(&pg, &a, &h).values(),
    })
}
