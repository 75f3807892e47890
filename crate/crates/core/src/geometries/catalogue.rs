//! Closed-form relations on `CP^n` in complex coordinates, paired with the
//! engine computation they describe. All values are real-frame sections.

use super::CpnFrame;
use crate::geometry::PointGeometry;
use crate::jet::{Jet, Univariate};
use crate::scalar::{cim, cre, cst, Real};
use crate::semiquant::{
    act, commutator, g1_section, grad, nabla_q, tensor1, wedge1, Side,
};
use crate::tensor::{QTensor, Tensor};
use crate::Error;

/// Registered check ids. Index-carrying checks run over all `i, j < n`.
pub const CPN_CHECKS: &[&str] = &[
    "z-comm",
    "zz-comm",
    "w-comm",
    "ww-comm",
    "z-dz-comm",
    "z-dzbar-comm",
    "zbar-dz-comm",
    "w-dwbar-comm",
    "w-dw-comm",
    "dz-wedge",
    "dz-dzbar-wedge",
    "dz-dzbar-anticomm",
    "q-comm-zbar-z",
    "q-comm-zbar-dz",
    "q-comm-z-dzbar",
    "q-comm-wedge",
    "g1-display",
    "nablaq-dz-plus",
    "nablaq-dz-minus",
];

fn check_id(id: &str) -> Result<&'static str, Error> {
    CPN_CHECKS
        .iter()
        .copied()
        .find(|c| *c == id)
        .ok_or_else(|| Error::UnknownCheck(id.to_string()))
}

/// Whether a check uses the index pair, only `i`, or neither.
pub fn check_arity(id: &str) -> Result<usize, Error> {
    Ok(match check_id(id)? {
        "g1-display" => 0,
        "nablaq-dz-plus" | "nablaq-dz-minus" => 1,
        _ => 2,
    })
}

struct Ctx<'a, T: Real> {
    fr: &'a CpnFrame<T>,
    d: usize,
}

impl<'a, T: Real> Ctx<'a, T> {
    fn s(&self, j: &Jet<T>) -> QTensor<T> {
        QTensor::scalar(j.clone(), Jet::zero(self.d))
    }

    fn f(&self, t: &Tensor<T>) -> QTensor<T> {
        QTensor::classical(t.clone())
    }

    fn lam(&self, t: Tensor<T>) -> QTensor<T> {
        QTensor::lambda_times(t)
    }

    fn tm2(&self) -> Jet<T> {
        self.fr.t2.compose(Univariate::Recip).expect("t > 0")
    }

    fn one(&self) -> Jet<T> {
        Jet::constant(self.d, cre(1.0))
    }

    fn delta(&self, i: usize, j: usize) -> Jet<T> {
        if i == j {
            self.one()
        } else {
            Jet::zero(self.d)
        }
    }

    /// `δ_{ij} + a b`
    fn delta_plus(&self, i: usize, j: usize, a: &Jet<T>, b: &Jet<T>) -> Jet<T> {
        &self.delta(i, j) + &a.mul_jet(b)
    }

    /// `q^{±1} = 1 ± iλ t⁻²`
    fn q(&self, sign: f64) -> QTensor<T> {
        QTensor::scalar(self.one(), self.tm2().scale(cim(sign)))
    }

    fn dw(&self, i: usize) -> Tensor<T> {
        grad(&self.fr.w[i])
    }

    fn dwbar(&self, i: usize) -> Tensor<T> {
        grad(&self.fr.wbar[i])
    }

    fn dzdzbar_sum(&self) -> Tensor<T> {
        let mut kk = Tensor::zeros(self.d, 2);
        for k in 0..self.fr.n() {
            kk = &kk + &self.fr.dz[k].wedge(&self.fr.dzbar[k]);
        }
        kk
    }

    /// `(δ+z z̄) t² dz^k∧dz̄^k + τ∧z^i dz̄^j + z̄^j dz^i∧τ̄`
    fn anticomm_core(&self, i: usize, j: usize) -> Tensor<T> {
        let fr = self.fr;
        let s = self.delta_plus(i, j, &fr.z[i], &fr.zbar[j]);
        let mut out = self.dzdzbar_sum().mul_jet(&s.mul_jet(&fr.t2));
        out = &out + &fr.tau.wedge(&fr.dzbar[j].mul_jet(&fr.z[i]));
        out = &out + &fr.dz[i].mul_jet(&fr.zbar[j]).wedge(&fr.taubar);
        out
    }
}

/// Closed-form value of a catalogue relation at the frame point.
pub fn cpn_expected<T: Real>(
    id: &str,
    pg: &PointGeometry<T>,
    fr: &CpnFrame<T>,
    i: usize,
    j: usize,
) -> Result<QTensor<T>, Error> {
    let id = check_id(id)?;
    let c = Ctx { fr, d: pg.dim() };
    let d = c.d;
    let tm2 = c.tm2();
    let i_unit = cim::<T>(1.0);
    Ok(match id {
        "z-comm" => {
            let v = c.delta_plus(i, j, &fr.z[i], &fr.zbar[j]).mul_jet(&tm2).scale(i_unit);
            c.lam(Tensor::scalar(v))
        }
        "zz-comm" | "ww-comm" => QTensor::zeros(d, 0),
        "w-comm" => c.lam(Tensor::scalar(c.delta(i, j).scale(i_unit))),
        "z-dz-comm" => QTensor::zeros(d, 1),
        "z-dzbar-comm" => {
            let s = c.delta_plus(i, j, &fr.z[i], &fr.zbar[j]);
            let t = &fr.taubar.mul_jet(&s) + &fr.dzbar[j].mul_jet(&fr.z[i]);
            c.lam(t.mul_jet(&tm2).scale(i_unit))
        }
        "zbar-dz-comm" => {
            let s = c.delta_plus(i, j, &fr.zbar[i], &fr.z[j]);
            let t = &fr.tau.mul_jet(&s) + &fr.dz[j].mul_jet(&fr.zbar[i]);
            c.lam(t.mul_jet(&tm2).scale(-i_unit))
        }
        "w-dwbar-comm" => {
            // iλ/2 ((2δ + w^i w̄^j (t⁻² − 2)) (τ̄ − τ)/2 + w^i dw̄^j − w̄^j dw^i)
            let (wi, wbj) = (&fr.w[i], &fr.wbar[j]);
            let two = Jet::constant(d, cre(2.0));
            let coef = &c.delta(i, j).scale_real(cst(2.0))
                + &wi.mul_jet(wbj).mul_jet(&(&tm2 - &two));
            let tt = (&fr.taubar - &fr.tau).scale_real(cst(0.5));
            let t = &(&tt.mul_jet(&coef) + &c.dwbar(j).mul_jet(wi)) - &c.dw(i).mul_jet(wbj);
            c.lam(t.scale(cim(0.5)))
        }
        "w-dw-comm" => {
            // λ/(2i) (w^i w^j (2τ̄ + t⁻²(τ̄ − τ)/2) + w^i dw^j + w^j dw^i)
            let (wi, wj) = (&fr.w[i], &fr.w[j]);
            let tt = (&fr.taubar - &fr.tau).mul_jet(&tm2).scale_real(cst(0.5));
            let inner = &fr.taubar.scale_real(cst(2.0)) + &tt;
            let t = &(&inner.mul_jet(&wi.mul_jet(wj)) + &c.dw(j).mul_jet(wi)) + &c.dw(i).mul_jet(wj);
            c.lam(t.scale(cim(-0.5)))
        }
        "dz-wedge" => c.f(&fr.dz[i].wedge(&fr.dz[j])),
        "dz-dzbar-wedge" => {
            let base = fr.dz[i].wedge(&fr.dzbar[j]);
            let l = &c.anticomm_core(i, j) + &base;
            QTensor::new(base, l.mul_jet(&tm2).scale(cim(0.5)))
        }
        "dz-dzbar-anticomm" => {
            let l = &c.anticomm_core(i, j) + &fr.dz[i].wedge(&fr.dzbar[j]);
            c.lam(l.mul_jet(&tm2).scale(i_unit))
        }
        "q-comm-zbar-z" => {
            // (λ t⁻² / i) δ_{ij}
            c.lam(Tensor::scalar(c.delta(i, j).mul_jet(&tm2).scale(-i_unit)))
        }
        "q-comm-zbar-dz" => {
            let s = c.delta_plus(i, j, &fr.zbar[i], &fr.z[j]);
            c.lam(fr.tau.mul_jet(&s.mul_jet(&tm2)).scale(-i_unit))
        }
        "q-comm-z-dzbar" => {
            let s = c.delta_plus(i, j, &fr.z[i], &fr.zbar[j]);
            c.lam(fr.taubar.mul_jet(&s.mul_jet(&tm2)).scale(i_unit))
        }
        "q-comm-wedge" => c.lam(c.anticomm_core(i, j).mul_jet(&tm2).scale(i_unit)),
        "g1-display" => {
            let n = fr.n();
            let mut out = QTensor::zeros(d, 2);
            for a in 0..n {
                for b in 0..n {
                    let g = &fr.g_hol[a][b];
                    out = &out + &tensor1(pg, &c.f(&fr.dz[a].mul_jet(g)), &c.f(&fr.dzbar[b]));
                    out = &out + &tensor1(pg, &c.f(&fr.dzbar[b].mul_jet(g)), &c.f(&fr.dz[a]));
                }
            }
            let extra = fr
                .varpi_tilde
                .scale_real(cst(0.5 * (n as f64 + 1.0)));
            &out + &c.lam(extra)
        }
        "nablaq-dz-plus" | "nablaq-dz-minus" => {
            let plus = id == "nablaq-dz-plus";
            let dz = c.f(fr.dz_pm(i, plus));
            let tau = c.f(fr.tau_pm(plus));
            let sum = &tensor1(pg, &tau, &dz) + &tensor1(pg, &dz, &tau);
            let k = if plus { 1.0 } else { -1.0 };
            sum.scale(crate::LambdaScalar::new(cre(1.0), cim(k)))
        }
        _ => unreachable!("registered id"),
    })
}

/// Engine evaluation of the left-hand side of a catalogue relation.
pub fn cpn_engine<T: Real>(
    id: &str,
    pg: &PointGeometry<T>,
    fr: &CpnFrame<T>,
    i: usize,
    j: usize,
) -> Result<QTensor<T>, Error> {
    let id = check_id(id)?;
    let c = Ctx { fr, d: pg.dim() };
    let star = |a: &QTensor<T>, b: &QTensor<T>| act(pg, a, b, Side::Left);
    let right = |x: &QTensor<T>, a: &QTensor<T>| act(pg, a, x, Side::Right);
    let (z, zb, w, wb) = (&fr.z, &fr.zbar, &fr.w, &fr.wbar);
    Ok(match id {
        "z-comm" => commutator(pg, &c.s(&z[i]), &c.s(&zb[j])),
        "zz-comm" => commutator(pg, &c.s(&z[i]), &c.s(&z[j])),
        "w-comm" => commutator(pg, &c.s(&w[i]), &c.s(&wb[j])),
        "ww-comm" => commutator(pg, &c.s(&w[i]), &c.s(&w[j])),
        "z-dz-comm" => commutator(pg, &c.s(&z[i]), &c.f(&fr.dz[j])),
        "z-dzbar-comm" => commutator(pg, &c.s(&z[i]), &c.f(&fr.dzbar[j])),
        "zbar-dz-comm" => commutator(pg, &c.s(&zb[i]), &c.f(&fr.dz[j])),
        "w-dwbar-comm" => commutator(pg, &c.s(&w[i]), &c.f(&c.dwbar(j))),
        "w-dw-comm" => commutator(pg, &c.s(&w[i]), &c.f(&c.dw(j))),
        "dz-wedge" => wedge1(pg, &c.f(&fr.dz[i]), &c.f(&fr.dz[j])),
        "dz-dzbar-wedge" => wedge1(pg, &c.f(&fr.dz[i]), &c.f(&fr.dzbar[j])),
        "dz-dzbar-anticomm" => {
            let (a, b) = (c.f(&fr.dz[i]), c.f(&fr.dzbar[j]));
            &wedge1(pg, &a, &b) + &wedge1(pg, &b, &a)
        }
        "q-comm-zbar-z" => {
            let lhs = star(&c.q(1.0), &star(&c.s(&zb[i]), &c.s(&z[j])));
            &lhs - &star(&c.s(&z[j]), &c.s(&zb[i]))
        }
        "q-comm-zbar-dz" => {
            let dz = c.f(&fr.dz[j]);
            let lhs = star(&c.q(1.0), &star(&c.s(&zb[i]), &dz));
            &lhs - &right(&dz, &c.s(&zb[i]))
        }
        "q-comm-z-dzbar" => {
            let dzb = c.f(&fr.dzbar[j]);
            let lhs = star(&c.q(-1.0), &star(&c.s(&z[i]), &dzb));
            &lhs - &right(&dzb, &c.s(&z[i]))
        }
        "q-comm-wedge" => {
            let (a, b) = (c.f(&fr.dz[i]), c.f(&fr.dzbar[j]));
            &star(&c.q(-1.0), &wedge1(pg, &a, &b)) + &wedge1(pg, &b, &a)
        }
        "g1-display" => g1_section(pg),
        "nablaq-dz-plus" => nabla_q(pg, &c.f(&fr.dz[i])),
        "nablaq-dz-minus" => nabla_q(pg, &c.f(&fr.dzbar[i])),
        _ => unreachable!("registered id"),
    })
}

/// Largest engine-minus-closed-form deviation over all index choices.
pub fn cpn_check_residual<T: Real>(
    id: &str,
    pg: &PointGeometry<T>,
    fr: &CpnFrame<T>,
) -> Result<T, Error> {
    let n = fr.n();
    let pairs: Vec<(usize, usize)> = match check_arity(id)? {
        0 => vec![(0, 0)],
        1 => (0..n).map(|i| (i, 0)).collect(),
        _ => (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect(),
    };
    let mut worst = T::zero();
    for (i, j) in pairs {
        let (a, b) = cpn_engine(id, pg, fr, i, j)?.max_diff(&cpn_expected(id, pg, fr, i, j)?);
        worst = worst.max(a).max(b);
    }
    Ok(worst)
}
