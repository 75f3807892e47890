//! First-order semiquantisation of the classical data at a point.
//!
//! Every element of a quantised bundle `Q(E)` is held by its image under the
//! natural isomorphism `q` onto λ-graded sections of the classical bundle,
//! so `ξ ⊗₁ η` is stored as `ξ⊗η + (λ/2) ω^{ij} ∇_i ξ ⊗ ∇_j η`. Quantum
//! connections put the derivative slot first. Rank-2 elements of
//! `Ω¹⊗₁Ω¹` can also be written by coefficient arrays `c_{mn}` meaning
//! `Σ (c_{mn} dx^m) ⊗₁ dx^n`, see [`q_map`].

use crate::geometry::{PointGeometry, Slot};
use crate::jet::Jet;
use crate::scalar::{cst, Real};
use crate::tensor::{QTensor, Tensor};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QDirection {
    /// Coefficient array to section.
    Q,
    /// Section to coefficient array.
    Inverse,
}

/// `df` as a covector.
pub fn grad<T: Real>(f: &Jet<T>) -> Tensor<T> {
    Tensor::from_fn(f.dim(), 1, |i| f.partial(i[0]))
}

/// `d` of a λ-graded function.
pub fn qgrad<T: Real>(a: &QTensor<T>) -> QTensor<T> {
    assert_eq!(a.rank(), 0);
    QTensor::new(grad(a.c0.at(&[])), grad(a.c1.at(&[])))
}

/// Classical exterior derivative of a form stored antisymmetrically.
pub fn ext_d<T: Real>(x: &Tensor<T>) -> Tensor<T> {
    let p = x.rank();
    let dx = x.partial().last_slot_first();
    // (dx)_{a b…} = (p+1) Alt(∂_a x_{b…}) with the det convention
    let mut out = Tensor::zeros(x.dim(), p + 1);
    for k in 0..=p {
        // move slot k to the front
        let mut perm: Vec<usize> = (0..=p).collect();
        perm.remove(k);
        let mut full = vec![k];
        full.extend(perm);
        let mut inv = vec![0; p + 1];
        for (new, &old) in full.iter().enumerate() {
            inv[old] = new;
        }
        let term = dx.permute(&inv);
        out = if k % 2 == 0 { &out + &term } else { &out - &term };
    }
    out
}

fn half<T: Real>() -> T {
    cst(0.5)
}

/// `ω^{ij} a_{,i} ∇_j X`.
fn hamiltonian_derivative<T: Real>(pg: &PointGeometry<T>, a: &Jet<T>, x: &Tensor<T>) -> Tensor<T> {
    let v = pg.hamiltonian_vf(a);
    pg.cov_down(x).contract_last(&v)
}

/// `a • b`.
pub fn star<T: Real>(pg: &PointGeometry<T>, a: &QTensor<T>, b: &QTensor<T>) -> QTensor<T> {
    act(pg, a, b, Side::Left)
}

/// `[a, b]_•`.
pub fn commutator<T: Real>(pg: &PointGeometry<T>, a: &QTensor<T>, x: &QTensor<T>) -> QTensor<T> {
    &act(pg, a, x, Side::Left) - &act(pg, a, x, Side::Right)
}

/// `a • X` or `X • a` for a λ-graded function `a` and a section `X` of any
/// covariant rank.
pub fn act<T: Real>(pg: &PointGeometry<T>, a: &QTensor<T>, x: &QTensor<T>, side: Side) -> QTensor<T> {
    assert_eq!(a.rank(), 0);
    let (a0, a1) = (a.c0.at(&[]), a.c1.at(&[]));
    let corr = hamiltonian_derivative(pg, a0, &x.c0).scale_real(half());
    let c1 = &x.c1.mul_jet(a0) + &x.c0.mul_jet(a1);
    let c1 = match side {
        Side::Left => &c1 + &corr,
        Side::Right => &c1 - &corr,
    };
    QTensor::new(x.c0.mul_jet(a0), c1)
}

/// `X ⊗₁ Y` for covariant sections of any rank.
pub fn tensor1<T: Real>(pg: &PointGeometry<T>, x: &QTensor<T>, y: &QTensor<T>) -> QTensor<T> {
    let d = pg.dim();
    let dx = pg.cov_down(&x.c0);
    let dy = pg.cov_down(&y.c0);
    let mut corr = Tensor::zeros(d, x.rank() + y.rank());
    for i in 0..d {
        let w: Vec<Jet<T>> = (0..d).map(|j| pg.omega.at(&[i, j]).clone()).collect();
        if w.iter().all(Jet::is_zero) {
            continue;
        }
        corr = &corr + &dx.slice_last(i).outer(&dy.contract_last(&w));
    }
    let c1 = &(&x.c1.outer(&y.c0) + &x.c0.outer(&y.c1)) + &corr.scale_real(half());
    QTensor::new(x.c0.outer(&y.c0), c1)
}

/// `ξ ∧_Q η = ξ∧η + (λ/2) ω^{ij} ∇_i ξ ∧ ∇_j η`.
pub fn wedge_q<T: Real>(pg: &PointGeometry<T>, x: &QTensor<T>, y: &QTensor<T>) -> QTensor<T> {
    let d = pg.dim();
    let dx = pg.cov_down(&x.c0);
    let dy = pg.cov_down(&y.c0);
    let mut corr = Tensor::zeros(d, x.rank() + y.rank());
    for i in 0..d {
        let w: Vec<Jet<T>> = (0..d).map(|j| pg.omega.at(&[i, j]).clone()).collect();
        if w.iter().all(Jet::is_zero) {
            continue;
        }
        corr = &corr + &dx.slice_last(i).wedge(&dy.contract_last(&w));
    }
    let c1 = &(&x.c1.wedge(&y.c0) + &x.c0.wedge(&y.c1)) + &corr.scale_real(half());
    QTensor::new(x.c0.wedge(&y.c0), c1)
}

/// `H^{ij}` as 2-form components, indexed `i * dim + j`.
pub fn h_family<T: Real>(pg: &PointGeometry<T>) -> Vec<Tensor<T>> {
    let d = pg.dim();
    let dt = pg.torsion_derivative();
    let r = &pg.riemann;
    let quarter = cst::<T>(0.25);
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            // c_{mn} = ¼ ω^{is}(T^j_{nm;s} − 2 R^j_{nms})
            let c = Tensor::from_fn(d, 2, |idx| {
                let (m, n) = (idx[0], idx[1]);
                let mut acc = Jet::zero(d);
                for s in 0..d {
                    let w = pg.omega.at(&[i, s]);
                    if w.is_zero() {
                        continue;
                    }
                    let inner = dt.at(&[j, n, m, s]) - &r.at(&[j, n, m, s]).scale_real(cst(2.0));
                    acc.add_product(w, &inner);
                }
                acc.scale_real(quarter)
            });
            out.push(c.wedge_rank2());
        }
    }
    out
}

/// `ξ ∧₁ η = ξ ∧_Q η + λ(−1)^{|ξ|+1} H^{ij} ∧ (∂_i⌟ξ) ∧ (∂_j⌟η)`.
pub fn wedge1<T: Real>(pg: &PointGeometry<T>, x: &QTensor<T>, y: &QTensor<T>) -> QTensor<T> {
    let base = wedge_q(pg, x, y);
    let (p, q) = (x.rank(), y.rank());
    if p == 0 || q == 0 {
        return base;
    }
    let d = pg.dim();
    let h = h_family(pg);
    let mut corr = Tensor::zeros(d, p + q);
    for i in 0..d {
        let xi = x.c0.interior(i);
        for j in 0..d {
            let hij = &h[i * d + j];
            if hij.max_abs() == T::zero() && hij.comps().iter().all(Jet::is_zero) {
                continue;
            }
            corr = &corr + &hij.wedge(&xi).wedge(&y.c0.interior(j));
        }
    }
    let corr = if p % 2 == 1 { corr } else { corr.scale_real(-T::one()) };
    QTensor::new(base.c0, &base.c1 + &corr)
}

/// `∧₁` on a section of `Ω¹⊗₁Ω¹`: `∧X + λ H^{ij} X_{ij}`.
pub fn wedge1_rank2<T: Real>(pg: &PointGeometry<T>, x: &QTensor<T>) -> QTensor<T> {
    assert_eq!(x.rank(), 2);
    let d = pg.dim();
    let h = h_family(pg);
    let mut corr = Tensor::zeros(d, 2);
    for i in 0..d {
        for j in 0..d {
            corr = &corr + &h[i * d + j].mul_jet(x.c0.at(&[i, j]));
        }
    }
    QTensor::new(x.c0.wedge_rank2(), &x.c1.wedge_rank2() + &corr)
}

/// Coefficients `a_k` with `ξ = Σ a_k • dx^k`.
pub fn left_coeffs<T: Real>(pg: &PointGeometry<T>, xi: &QTensor<T>) -> QTensor<T> {
    assert_eq!(xi.rank(), 1);
    let d = pg.dim();
    // a_m = ξ_m + ½ ω^{st} ξ_{k,s} Γ^k_{tm}
    let corr = Tensor::from_fn(d, 1, |idx| {
        let m = idx[0];
        let mut acc = Jet::zero(d);
        for k in 0..d {
            let v = pg.hamiltonian_vf(xi.c0.at(&[k]));
            for (t, vt) in v.iter().enumerate() {
                acc.add_product(vt, pg.gamma.at(&[k, t, m]));
            }
        }
        acc.scale_real(half())
    });
    QTensor::new(xi.c0.clone(), &xi.c1 + &corr)
}

/// Inverse of [`left_coeffs`].
pub fn from_left_coeffs<T: Real>(pg: &PointGeometry<T>, a: &QTensor<T>) -> QTensor<T> {
    let d = pg.dim();
    let mut out = QTensor::zeros(d, 1);
    for k in 0..d {
        let ak = QTensor::scalar(a.c0.at(&[k]).clone(), a.c1.at(&[k]).clone());
        out = &out + &act(pg, &ak, &basis(d, k), Side::Left);
    }
    out
}

/// `dx^k` as a section.
pub fn basis<T: Real>(d: usize, k: usize) -> QTensor<T> {
    QTensor::classical(Tensor::basis(d, k))
}

/// Coordinate function `x^k` as a λ-graded scalar.
pub fn coordinate<T: Real>(pg: &PointGeometry<T>, k: usize) -> QTensor<T> {
    let d = pg.dim();
    QTensor::scalar(Jet::variable(&pg.point, k), Jet::zero(d))
}

/// `q` (coefficients `c_{mn}` to section) or its inverse on `Ω¹⊗Ω¹`.
pub fn q_map<T: Real>(pg: &PointGeometry<T>, x: &QTensor<T>, dir: QDirection) -> QTensor<T> {
    assert_eq!(x.rank(), 2);
    let d = pg.dim();
    // ½ ω^{ij} Σ_n (∇_i X0[·,n])_a Γ^n_{jb}
    let mut corr = Tensor::zeros(d, 2);
    for n in 0..d {
        let col = Tensor::from_fn(d, 1, |a| x.c0.at(&[a[0], n]).clone());
        let dcol = pg.cov_down(&col);
        for i in 0..d {
            let w: Vec<Jet<T>> = (0..d).map(|j| pg.omega.at(&[i, j]).clone()).collect();
            if w.iter().all(Jet::is_zero) {
                continue;
            }
            let g_n = Tensor::from_fn(d, 2, |jb| pg.gamma.at(&[n, jb[0], jb[1]]).clone());
            let row = g_n.permute(&[1, 0]).contract_last(&w);
            corr = &corr + &dcol.slice_last(i).outer(&row);
        }
    }
    let corr = corr.scale_real(half());
    let c1 = match dir {
        QDirection::Q => &x.c1 - &corr,
        QDirection::Inverse => &x.c1 + &corr,
    };
    QTensor::new(x.c0.clone(), c1)
}

/// `ξ^{(n)}` with `X = Σ_n ξ^{(n)} ⊗₁ dx^n`.
pub fn split_last<T: Real>(pg: &PointGeometry<T>, x: &QTensor<T>) -> Vec<QTensor<T>> {
    let c = q_map(pg, x, QDirection::Inverse);
    let d = pg.dim();
    (0..d)
        .map(|n| {
            QTensor::new(
                Tensor::from_fn(d, 1, |a| c.c0.at(&[a[0], n]).clone()),
                Tensor::from_fn(d, 1, |a| c.c1.at(&[a[0], n]).clone()),
            )
        })
        .collect()
}

/// `∇_Q` on a covariant section of any rank, derivative slot first:
/// `(∇_a e)_{b…} + (λ/2) ω^{sj} ([∇_a, ∇_s] ∇_j e)_{b…}`.
pub fn nabla_q<T: Real>(pg: &PointGeometry<T>, e: &QTensor<T>) -> QTensor<T> {
    let d = pg.dim();
    let r = e.rank();
    let de0 = pg.cov_down(&e.c0);
    let c0 = de0.last_slot_first();
    let c1 = pg.cov_down(&e.c1).last_slot_first();
    // W_s = ω^{sj} ∇_j e0
    let ws: Vec<Tensor<T>> = (0..d)
        .map(|s| {
            let w: Vec<Jet<T>> = (0..d).map(|j| pg.omega.at(&[s, j]).clone()).collect();
            de0.contract_last(&w)
        })
        .collect();
    let mut tmp = vec![0; r];
    let curv = Tensor::from_fn(d, r + 1, |idx| {
        let a = idx[0];
        let b = &idx[1..];
        let mut acc = Jet::zero(d);
        for (s, w) in ws.iter().enumerate() {
            for k in 0..r {
                tmp.copy_from_slice(b);
                for c in 0..d {
                    tmp[k] = c;
                    let rc = pg.riemann.at(&[c, b[k], a, s]);
                    if rc.is_zero() {
                        continue;
                    }
                    acc.add_product(rc, w.at(&tmp));
                }
            }
        }
        acc.scale_real(-half::<T>())
    });
    QTensor::new(c0, &c1 + &curv)
}

/// `∇_Q` on a 1-form by the left Leibniz rule from `∇_Q dx^k`.
pub fn nabla_q_leibniz<T: Real>(pg: &PointGeometry<T>, xi: &QTensor<T>) -> QTensor<T> {
    let d = pg.dim();
    let a = left_coeffs(pg, xi);
    let mut out = QTensor::zeros(d, 2);
    for k in 0..d {
        let ak = QTensor::scalar(a.c0.at(&[k]).clone(), a.c1.at(&[k]).clone());
        let dk = basis(d, k);
        out = &out + &act(pg, &ak, &nabla_q(pg, &dk), Side::Left);
        out = &out + &tensor1(pg, &qgrad(&ak), &dk);
    }
    out
}

/// Coefficient array of `∇_Q dx^i` from its closed form
/// `−(Γ^i_{mn} + (λ/2) ω^{sj}(Γ^i_{mk,s}Γ^k_{jn} − Γ^i_{kt}Γ^k_{sm}Γ^t_{jn} − Γ^i_{jk}R^k_{nms}))`.
pub fn nabla_q_dx_coeffs<T: Real>(pg: &PointGeometry<T>, i: usize) -> QTensor<T> {
    let d = pg.dim();
    let g = &pg.gamma;
    let dg = g.partial();
    let c0 = Tensor::from_fn(d, 2, |mn| -g.at(&[i, mn[0], mn[1]]));
    let c1 = Tensor::from_fn(d, 2, |mn| {
        let (m, n) = (mn[0], mn[1]);
        let mut acc = Jet::zero(d);
        for s in 0..d {
            for j in 0..d {
                let w = pg.omega.at(&[s, j]);
                if w.is_zero() {
                    continue;
                }
                let mut inner = Jet::zero(d);
                for k in 0..d {
                    inner.add_product(dg.at(&[i, m, k, s]), g.at(&[k, j, n]));
                    let t = g.at(&[i, j, k]).mul_jet(pg.riemann.at(&[k, n, m, s]));
                    inner -= &t;
                    for t in 0..d {
                        let p = g.at(&[i, k, t]).mul_jet(g.at(&[k, s, m]));
                        let p = p.mul_jet(g.at(&[t, j, n]));
                        inner -= &p;
                    }
                }
                acc.add_product(w, &inner);
            }
        }
        acc.scale_real(-half::<T>())
    });
    QTensor::new(c0, c1)
}

/// `σ_Q(ξ ⊗₁ da) = ∇_Q(ξ•a) − (∇_Q ξ)•a`.
pub fn sigma_q<T: Real>(pg: &PointGeometry<T>, a: &QTensor<T>, xi: &QTensor<T>) -> QTensor<T> {
    let lhs = nabla_q(pg, &act(pg, a, xi, Side::Right));
    let rhs = act(pg, a, &nabla_q(pg, xi), Side::Right);
    &lhs - &rhs
}

/// `σ_Q` on a general section of `Ω¹⊗₁Ω¹`.
pub fn sigma_general<T: Real>(pg: &PointGeometry<T>, x: &QTensor<T>) -> QTensor<T> {
    let d = pg.dim();
    let mut out = QTensor::zeros(d, 2);
    for (k, zeta) in split_last(pg, x).iter().enumerate() {
        out = &out + &sigma_q(pg, &coordinate(pg, k), zeta);
    }
    out
}

/// `∇_Q` on `Ω¹⊗₁Ω¹` by the bimodule rule
/// `∇(ξ⊗₁η) = ∇ξ ⊗₁ η + (σ⊗id)(ξ ⊗₁ ∇η)`.
pub fn nabla_q_rank2<T: Real>(pg: &PointGeometry<T>, x: &QTensor<T>) -> QTensor<T> {
    let d = pg.dim();
    let mut out = QTensor::zeros(d, 3);
    let pieces = split_last(pg, x);
    for (n, xi) in pieces.iter().enumerate() {
        let dn = basis(d, n);
        out = &out + &tensor1(pg, &nabla_q(pg, xi), &dn);
        let etas = split_last(pg, &nabla_q(pg, &dn));
        for (p, eta) in etas.iter().enumerate() {
            let s = sigma_general(pg, &tensor1(pg, xi, eta));
            out = &out + &tensor1(pg, &s, &basis(d, p));
        }
    }
    out
}

/// `T_{∇_Q} ξ = ∧₁ ∇_Q ξ − dξ`.
pub fn quantum_torsion<T: Real>(pg: &PointGeometry<T>, xi: &QTensor<T>) -> QTensor<T> {
    let w = wedge1_rank2(pg, &nabla_q(pg, xi));
    let dxi = xi.map(ext_d);
    &w - &dxi
}

/// Closed form `½(ξ_i T^i_{nm} + (λ/2)(∂_j⌟∇_iξ) ω^{is} T^j_{nm;s}) dx^m ∧₁ dx^n`
/// with coefficients taken into the first factor.
pub fn quantum_torsion_closed<T: Real>(pg: &PointGeometry<T>, xi: &QTensor<T>) -> QTensor<T> {
    let d = pg.dim();
    let dt = pg.torsion_derivative();
    let dxi = pg.cov_down(&xi.c0);
    let h = half::<T>();
    let c = QTensor::new(
        Tensor::from_fn(d, 2, |mn| {
            let mut acc = Jet::zero(d);
            for i in 0..d {
                acc.add_product(xi.c0.at(&[i]), pg.torsion.at(&[i, mn[1], mn[0]]));
            }
            acc.scale_real(h)
        }),
        Tensor::from_fn(d, 2, |mn| {
            let mut acc = Jet::zero(d);
            for i in 0..d {
                acc.add_product(xi.c1.at(&[i]), pg.torsion.at(&[i, mn[1], mn[0]]));
            }
            let mut extra = Jet::zero(d);
            for i in 0..d {
                for s in 0..d {
                    let w = pg.omega.at(&[i, s]);
                    if w.is_zero() {
                        continue;
                    }
                    for j in 0..d {
                        let t = dxi.at(&[j, i]).mul_jet(dt.at(&[j, mn[1], mn[0], s]));
                        extra.add_product(w, &t);
                    }
                }
            }
            (&acc + &extra.scale_real(h)).scale_real(h)
        }),
    );
    let mut out = QTensor::zeros(d, 2);
    for n in 0..d {
        let col = QTensor::new(
            Tensor::from_fn(d, 1, |a| c.c0.at(&[a[0], n]).clone()),
            Tensor::from_fn(d, 1, |a| c.c1.at(&[a[0], n]).clone()),
        );
        out = &out + &wedge1(pg, &col, &basis(d, n));
    }
    out
}

/// Coefficients of `g_Q = g_{ij} dx^i⊗₁dx^j + (λ/2) ω^{ij} g_{pm} Γ^p_{iq} Γ^q_{jn} dx^m⊗₁dx^n`.
pub fn g_q_coeffs<T: Real>(pg: &PointGeometry<T>) -> QTensor<T> {
    let d = pg.dim();
    let mg = pg.cov_down(&pg.g).max_abs();
    if mg > cst(1e-8) {
        log::warn!("metric is not parallel (|∇g| = {mg}); g_Q need not be central");
    }
    let g = &pg.gamma;
    let c1 = Tensor::from_fn(d, 2, |mn| {
        let (m, n) = (mn[0], mn[1]);
        let mut acc = Jet::zero(d);
        for i in 0..d {
            for j in 0..d {
                let w = pg.omega.at(&[i, j]);
                if w.is_zero() {
                    continue;
                }
                for p in 0..d {
                    let gp = pg.g.at(&[p, m]);
                    for q in 0..d {
                        let t = g.at(&[p, i, q]).mul_jet(g.at(&[q, j, n]));
                        acc.add_product(&w.mul_jet(gp), &t);
                    }
                }
            }
        }
        acc.scale_real(half())
    });
    QTensor::new(pg.g.clone(), c1)
}

/// Section of `g_Q`.
pub fn g_q_section<T: Real>(pg: &PointGeometry<T>) -> QTensor<T> {
    q_map(pg, &g_q_coeffs(pg), QDirection::Q)
}

/// `ℛ_{mn} = ½ g_{ij} ω^{is}(T^j_{nm;s} − R^j_{nms} + R^j_{mns})`.
pub fn ricci_coeffs<T: Real>(pg: &PointGeometry<T>) -> Tensor<T> {
    let d = pg.dim();
    let dt = pg.torsion_derivative();
    let r = &pg.riemann;
    // g_{ij} ω^{is}
    let gw = Tensor::from_fn(d, 2, |js| {
        let mut acc = Jet::zero(d);
        for i in 0..d {
            acc.add_product(pg.g.at(&[i, js[0]]), pg.omega.at(&[i, js[1]]));
        }
        acc
    });
    Tensor::from_fn(d, 2, |mn| {
        let (m, n) = (mn[0], mn[1]);
        let mut acc = Jet::zero(d);
        for j in 0..d {
            for s in 0..d {
                let w = gw.at(&[j, s]);
                if w.is_zero() {
                    continue;
                }
                let inner = &(dt.at(&[j, n, m, s]) - r.at(&[j, n, m, s])) + r.at(&[j, m, n, s]);
                acc.add_product(w, &inner);
            }
        }
        acc.scale_real(half())
    })
}

/// `H^{ij} g_{ij}` as 2-form components.
pub fn ricci_via_h<T: Real>(pg: &PointGeometry<T>) -> Tensor<T> {
    let d = pg.dim();
    let h = h_family(pg);
    let mut via_h = Tensor::zeros(d, 2);
    for i in 0..d {
        for j in 0..d {
            via_h = &via_h + &h[i * d + j].mul_jet(pg.g.at(&[i, j]));
        }
    }
    via_h
}

/// `ℛ = ½ ℛ_{mn} dx^m∧dx^n` as 2-form components, checked against
/// `H^{ij} g_{ij}`.
pub fn gen_ricci<T: Real>(pg: &PointGeometry<T>) -> Result<Tensor<T>, Error> {
    let direct = ricci_coeffs(pg);
    let via_h = ricci_via_h(pg);
    let residual = direct.max_diff(&via_h);
    let scale = direct.max_abs().max(T::one());
    if residual > cst::<T>(1e-9) * scale {
        return Err(Error::Inconsistent {
            what: "generalised Ricci form".into(),
            residual: residual.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(direct)
}

/// Coefficients of `g₁ = g_Q − (λ/2) ℛ_{mn} dx^m⊗₁dx^n`.
pub fn g1_coeffs<T: Real>(pg: &PointGeometry<T>) -> QTensor<T> {
    let gq = g_q_coeffs(pg);
    let r = ricci_coeffs(pg).scale_real(half());
    QTensor::new(gq.c0, &gq.c1 - &r)
}

pub fn g1_section<T: Real>(pg: &PointGeometry<T>) -> QTensor<T> {
    q_map(pg, &g1_coeffs(pg), QDirection::Q)
}

/// Left-hand side of the quantum Levi-Civita condition, indices `(m, n, k)`:
/// `ℛ_{mn;̂k} − ω^{ij} g_{rs} S^s_{jn}(R^r_{mki} + S^r_{km;i}) + ω^{ij} g_{rs} S^s_{jm}(R^r_{nki} + S^r_{kn;i})`.
pub fn qlc_residual<T: Real>(pg: &PointGeometry<T>) -> Tensor<T> {
    let d = pg.dim();
    let dr = pg.lc_cov_down(&ricci_coeffs(pg));
    let s = &pg.contorsion;
    if s.comps().iter().all(Jet::is_zero) {
        return dr;
    }
    let ds = pg.cov(s, &[Slot::Up, Slot::Down, Slot::Down]);
    // gs_{r j n} = g_{rs} S^s_{jn}
    let gs = Tensor::from_fn(d, 3, |rjn| {
        let mut acc = Jet::zero(d);
        for q in 0..d {
            acc.add_product(pg.g.at(&[rjn[0], q]), s.at(&[q, rjn[1], rjn[2]]));
        }
        acc
    });
    let term = |a: usize, k: usize, b: usize| {
        // ω^{ij} gs_{rjb} (R^r_{aki} + S^r_{ka;i})
        let mut acc = Jet::zero(d);
        for i in 0..d {
            for j in 0..d {
                let w = pg.omega.at(&[i, j]);
                if w.is_zero() {
                    continue;
                }
                for r in 0..d {
                    let inner = pg.riemann.at(&[r, a, k, i]) + ds.at(&[r, k, a, i]);
                    acc.add_product(&w.mul_jet(gs.at(&[r, j, b])), &inner);
                }
            }
        }
        acc
    };
    Tensor::from_fn(d, 3, |mnk| {
        let (m, n, k) = (mnk[0], mnk[1], mnk[2]);
        &(dr.at(mnk) - &term(m, k, n)) + &term(n, k, m)
    })
}
