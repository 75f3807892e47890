//! Third-order truncated Taylor expansions ("jets") of complex fields at a
//! chart point.
//!
//! A jet stores the value and all partial derivatives up to its `order`
//! (at most [`MAX_ORDER`]). Derivative arrays are stored densely, so `d2` is
//! a full `dim × dim` block even though it is symmetric. Differentiating a
//! jet lowers its order by one; arithmetic on jets of different order
//! truncates to the lower one.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex;

use crate::scalar::{cone, cre, czero, Real};
use crate::Error;

pub const MAX_ORDER: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct Jet<T> {
    dim: usize,
    order: usize,
    data: Vec<Complex<T>>,
}

#[inline]
fn len_for(dim: usize, order: usize) -> usize {
    let mut n = 1;
    let mut p = 1;
    for _ in 0..order {
        p *= dim;
        n += p;
    }
    n
}

/// Smooth univariate functions with their first three derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Univariate<T> {
    Exp,
    Ln,
    Sin,
    Cos,
    Sqrt,
    /// Real power `x^p`.
    Powf(T),
    Recip,
}

impl<T: Real> Jet<T> {
    pub fn constant(dim: usize, value: Complex<T>) -> Self {
        let mut data = vec![czero(); len_for(dim, MAX_ORDER)];
        data[0] = value;
        Self {
            dim,
            order: MAX_ORDER,
            data,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::constant(dim, czero())
    }

    pub fn zero_with_order(dim: usize, order: usize) -> Self {
        Self {
            dim,
            order,
            data: vec![czero(); len_for(dim, order)],
        }
    }

    /// The coordinate function `x^i` at `point`.
    pub fn variable(point: &[T], i: usize) -> Self {
        let dim = point.len();
        let mut j = Self::constant(dim, Complex::new(point[i], T::zero()));
        j.data[1 + i] = cone();
        j
    }

    /// All coordinate functions at `point`.
    pub fn coordinates(point: &[T]) -> Vec<Self> {
        (0..point.len()).map(|i| Self::variable(point, i)).collect()
    }

    pub fn from_parts(
        dim: usize,
        value: Complex<T>,
        d1: &[Complex<T>],
        d2: &[Complex<T>],
        d3: &[Complex<T>],
    ) -> Self {
        assert_eq!(d1.len(), dim);
        assert_eq!(d2.len(), dim * dim);
        assert_eq!(d3.len(), dim * dim * dim);
        let mut data = Vec::with_capacity(len_for(dim, MAX_ORDER));
        data.push(value);
        data.extend_from_slice(d1);
        data.extend_from_slice(d2);
        data.extend_from_slice(d3);
        Self {
            dim,
            order: MAX_ORDER,
            data,
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Highest derivative order carried.
    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn value(&self) -> Complex<T> {
        self.data[0]
    }

    #[inline]
    pub fn d1(&self, i: usize) -> Complex<T> {
        debug_assert!(self.order >= 1);
        self.data[1 + i]
    }

    #[inline]
    pub fn d2(&self, i: usize, j: usize) -> Complex<T> {
        debug_assert!(self.order >= 2);
        self.data[1 + self.dim + i * self.dim + j]
    }

    #[inline]
    pub fn d3(&self, i: usize, j: usize, k: usize) -> Complex<T> {
        debug_assert!(self.order >= 3);
        let d = self.dim;
        self.data[1 + d + d * d + (i * d + j) * d + k]
    }

    fn gradient(&self) -> &[Complex<T>] {
        &self.data[1..1 + self.dim]
    }

    fn hessian(&self) -> &[Complex<T>] {
        let d = self.dim;
        &self.data[1 + d..1 + d + d * d]
    }

    fn third(&self) -> &[Complex<T>] {
        let d = self.dim;
        &self.data[1 + d + d * d..]
    }

    /// Drop derivatives above `order`.
    pub fn truncate(mut self, order: usize) -> Self {
        if order < self.order {
            self.order = order;
            self.data.truncate(len_for(self.dim, order));
        }
        self
    }

    /// `∂_i` of the expansion; the result carries one order less.
    pub fn partial(&self, i: usize) -> Self {
        assert!(self.order >= 1, "partial derivative of an order-0 jet");
        let d = self.dim;
        let order = self.order - 1;
        let mut data = Vec::with_capacity(len_for(d, order));
        data.push(self.data[1 + i]);
        if order >= 1 {
            data.extend_from_slice(&self.hessian()[i * d..(i + 1) * d]);
        }
        if order >= 2 {
            data.extend_from_slice(&self.third()[i * d * d..(i + 1) * d * d]);
        }
        Self {
            dim: d,
            order,
            data,
        }
    }

    pub fn conj(&self) -> Self {
        Self {
            dim: self.dim,
            order: self.order,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self {
            dim: self.dim,
            order: self.order,
            data: self.data.iter().map(|z| *z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    /// `self += a * b`, truncating `self` to the common order.
    pub fn add_product(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            let order = self.order.min(a.order).min(b.order);
            self.order = order;
            self.data.truncate(len_for(self.dim, order));
            return;
        }
        let prod = a * b;
        *self += &prod;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.re == T::zero() && z.im == T::zero())
    }

    /// Largest modulus over all stored slots.
    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |m, z| if z.norm() > m { z.norm() } else { m })
    }

    fn binary(&self, rhs: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Self {
        assert_eq!(self.dim, rhs.dim, "jet dimension mismatch");
        let order = self.order.min(rhs.order);
        let n = len_for(self.dim, order);
        Self {
            dim: self.dim,
            order,
            data: (0..n).map(|k| f(self.data[k], rhs.data[k])).collect(),
        }
    }

    fn checked_dim(&self, rhs: &Self) -> Result<(), Error> {
        if self.dim == rhs.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                got: rhs.dim,
            })
        }
    }

    /// Leibniz product truncated to the lower order.
    pub fn mul_jet(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "jet dimension mismatch");
        let d = self.dim;
        let order = self.order.min(rhs.order);
        let mut out = Self::zero_with_order(d, order);
        // exact zeros are common in sparse connections and brackets
        if self.is_zero() || rhs.is_zero() {
            return out;
        }
        let (f, g) = (self.value(), rhs.value());
        out.data[0] = f * g;
        if order >= 1 {
            let (fi, gi) = (self.gradient(), rhs.gradient());
            for i in 0..d {
                out.data[1 + i] = fi[i] * g + f * gi[i];
            }
            if order >= 2 {
                let (fij, gij) = (self.hessian(), rhs.hessian());
                let base = 1 + d;
                for i in 0..d {
                    for j in 0..d {
                        let ij = i * d + j;
                        out.data[base + ij] =
                            fij[ij] * g + fi[i] * gi[j] + fi[j] * gi[i] + f * gij[ij];
                    }
                }
                if order >= 3 {
                    let (fijk, gijk) = (self.third(), rhs.third());
                    let base = 1 + d + d * d;
                    for i in 0..d {
                        for j in 0..d {
                            for k in 0..d {
                                let ijk = (i * d + j) * d + k;
                                out.data[base + ijk] = fijk[ijk] * g
                                    + fij[i * d + j] * gi[k]
                                    + fij[i * d + k] * gi[j]
                                    + fij[j * d + k] * gi[i]
                                    + fi[i] * gij[j * d + k]
                                    + fi[j] * gij[i * d + k]
                                    + fi[k] * gij[i * d + j]
                                    + f * gijk[ijk];
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// `φ ∘ self` given `φ(v), φ'(v), φ''(v), φ'''(v)` at the value `v`.
    pub fn compose_derivs(&self, phi: [Complex<T>; 4]) -> Self {
        let d = self.dim;
        let order = self.order;
        let mut out = Self::zero_with_order(d, order);
        out.data[0] = phi[0];
        if order >= 1 {
            let fi = self.gradient();
            for i in 0..d {
                out.data[1 + i] = phi[1] * fi[i];
            }
            if order >= 2 {
                let fij = self.hessian();
                let base = 1 + d;
                for i in 0..d {
                    for j in 0..d {
                        out.data[base + i * d + j] =
                            phi[2] * fi[i] * fi[j] + phi[1] * fij[i * d + j];
                    }
                }
                if order >= 3 {
                    let fijk = self.third();
                    let base = 1 + d + d * d;
                    for i in 0..d {
                        for j in 0..d {
                            for k in 0..d {
                                let ijk = (i * d + j) * d + k;
                                out.data[base + ijk] = phi[3] * fi[i] * fi[j] * fi[k]
                                    + phi[2]
                                        * (fij[i * d + j] * fi[k]
                                            + fij[i * d + k] * fi[j]
                                            + fij[j * d + k] * fi[i])
                                    + phi[1] * fijk[ijk];
                            }
                        }
                    }
                }
            }
        }
        out
    }

    pub fn compose(&self, f: Univariate<T>) -> Result<Self, Error> {
        let v = self.value();
        let nonpositive_real = v.im == T::zero() && v.re <= T::zero();
        let phi = match f {
            Univariate::Exp => {
                let e = v.exp();
                [e, e, e, e]
            }
            Univariate::Sin => {
                let (s, c) = (v.sin(), v.cos());
                [s, c, -s, -c]
            }
            Univariate::Cos => {
                let (s, c) = (v.sin(), v.cos());
                [c, -s, -c, s]
            }
            Univariate::Ln => {
                if nonpositive_real {
                    return Err(Error::Domain(format!("ln of non-positive value {}", v.re)));
                }
                let r = v.inv();
                [v.ln(), r, -r * r, cre::<T>(2.0) * r * r * r]
            }
            Univariate::Sqrt => {
                if nonpositive_real {
                    return Err(Error::Domain(format!("sqrt of non-positive value {}", v.re)));
                }
                let s = v.sqrt();
                let r = v.inv();
                let half = cre::<T>(0.5);
                let d1 = half * s * r;
                let d2 = -half * d1 * r;
                let d3 = cre::<T>(-1.5) * d2 * r;
                [s, d1, d2, d3]
            }
            Univariate::Recip => {
                if v.re == T::zero() && v.im == T::zero() {
                    return Err(Error::SingularScalar);
                }
                let r = v.inv();
                let r2 = r * r;
                [r, -r2, cre::<T>(2.0) * r2 * r, cre::<T>(-6.0) * r2 * r2]
            }
            Univariate::Powf(p) => {
                if v.re == T::zero() && v.im == T::zero() {
                    // Only the smooth cases are admissible at the origin.
                    let pi = p.round();
                    if pi == p && p >= T::zero() {
                        return Ok(self.powi(p.to_i32().unwrap_or(0)));
                    }
                    return Err(Error::Domain("non-integer power at zero".into()));
                }
                if nonpositive_real && p.round() != p {
                    return Err(Error::Domain(format!(
                        "real power of non-positive value {}",
                        v.re
                    )));
                }
                let pc = Complex::new(p, T::zero());
                let one = cone::<T>();
                let x0 = v.powc(pc);
                let r = v.inv();
                let d1 = pc * x0 * r;
                let d2 = (pc - one) * d1 * r;
                let d3 = (pc - one - one) * d2 * r;
                [x0, d1, d2, d3]
            }
        };
        Ok(self.compose_derivs(phi))
    }

    pub fn powi(&self, n: i32) -> Self {
        if n < 0 {
            let inv = self
                .compose(Univariate::Recip)
                .expect("negative integer power of zero");
            return inv.powi(-n);
        }
        let mut acc = Self::constant(self.dim, cone()).truncate(self.order);
        let mut base = self.clone();
        let mut e = n as u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_jet(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_jet(&base);
            }
        }
        acc
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, Error> {
        self.checked_dim(rhs)?;
        Ok(self.mul_jet(&rhs.compose(Univariate::Recip)?))
    }
}

/// Binary jet operations in table form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum JetOp<T> {
    Add,
    Mul,
    /// Ignores the second operand.
    Compose(Univariate<T>),
}

pub fn jet_arith<T: Real>(a: &Jet<T>, b: &Jet<T>, op: JetOp<T>) -> Result<Jet<T>, Error> {
    a.checked_dim(b)?;
    match op {
        JetOp::Add => Ok(a + b),
        JetOp::Mul => Ok(a.mul_jet(b)),
        JetOp::Compose(f) => a.compose(f),
    }
}

impl<T: Real> Add for &Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: &Jet<T>) -> Jet<T> {
        self.binary(rhs, |a, b| a + b)
    }
}

impl<T: Real> Sub for &Jet<T> {
    type Output = Jet<T>;
    fn sub(self, rhs: &Jet<T>) -> Jet<T> {
        self.binary(rhs, |a, b| a - b)
    }
}

impl<T: Real> Mul for &Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: &Jet<T>) -> Jet<T> {
        self.mul_jet(rhs)
    }
}

impl<T: Real> Neg for &Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        Jet {
            dim: self.dim,
            order: self.order,
            data: self.data.iter().map(|z| -*z).collect(),
        }
    }
}

impl<T: Real> Add for Jet<T> {
    type Output = Jet<T>;
    fn add(self, rhs: Jet<T>) -> Jet<T> {
        &self + &rhs
    }
}

impl<T: Real> Sub for Jet<T> {
    type Output = Jet<T>;
    fn sub(self, rhs: Jet<T>) -> Jet<T> {
        &self - &rhs
    }
}

impl<T: Real> Mul for Jet<T> {
    type Output = Jet<T>;
    fn mul(self, rhs: Jet<T>) -> Jet<T> {
        self.mul_jet(&rhs)
    }
}

impl<T: Real> Neg for Jet<T> {
    type Output = Jet<T>;
    fn neg(self) -> Jet<T> {
        -&self
    }
}

impl<T: Real> AddAssign<&Jet<T>> for Jet<T> {
    fn add_assign(&mut self, rhs: &Jet<T>) {
        assert_eq!(self.dim, rhs.dim, "jet dimension mismatch");
        if rhs.order < self.order {
            self.order = rhs.order;
            self.data.truncate(len_for(self.dim, rhs.order));
        }
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a = *a + *b;
        }
    }
}

impl<T: Real> SubAssign<&Jet<T>> for Jet<T> {
    fn sub_assign(&mut self, rhs: &Jet<T>) {
        assert_eq!(self.dim, rhs.dim, "jet dimension mismatch");
        if rhs.order < self.order {
            self.order = rhs.order;
            self.data.truncate(len_for(self.dim, rhs.order));
        }
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a = *a - *b;
        }
    }
}
