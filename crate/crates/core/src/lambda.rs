//! Scalars over the truncated ring `C[λ]/(λ²)`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::scalar::{czero, Real};
use crate::Error;

/// `a0 + λ a1` with `λ² = 0`. Both parts are complex.
#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct LambdaScalar<T> {
    pub re0: T,
    pub im0: T,
    pub re1: T,
    pub im1: T,
}

impl<T: Real> LambdaScalar<T> {
    pub fn new(a0: Complex<T>, a1: Complex<T>) -> Self {
        Self {
            re0: a0.re,
            im0: a0.im,
            re1: a1.re,
            im1: a1.im,
        }
    }

    pub fn classical(a0: Complex<T>) -> Self {
        Self::new(a0, czero())
    }

    /// The pure deformation parameter `λ`.
    pub fn lambda() -> Self {
        Self::new(czero(), Complex::new(T::one(), T::zero()))
    }

    pub fn zero() -> Self {
        Self::new(czero(), czero())
    }

    pub fn one() -> Self {
        Self::classical(Complex::new(T::one(), T::zero()))
    }

    #[inline]
    pub fn a0(&self) -> Complex<T> {
        Complex::new(self.re0, self.im0)
    }

    #[inline]
    pub fn a1(&self) -> Complex<T> {
        Complex::new(self.re1, self.im1)
    }

    /// Complex conjugation of both parts; `λ` is treated as a formal symbol.
    pub fn conj(&self) -> Self {
        Self::new(self.a0().conj(), self.a1().conj())
    }

    /// `b⁻¹ = b0⁻¹ − λ b1 b0⁻²`.
    pub fn recip(&self) -> Result<Self, Error> {
        let b0 = self.a0();
        if b0.re == T::zero() && b0.im == T::zero() {
            return Err(Error::SingularScalar);
        }
        let inv = b0.inv();
        Ok(Self::new(inv, -self.a1() * inv * inv))
    }

    pub fn checked_div(&self, rhs: &Self) -> Result<Self, Error> {
        Ok(*self * rhs.recip()?)
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::new(self.a0() * s, self.a1() * s)
    }
}

impl<T: Real> Add for LambdaScalar<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.a0() + rhs.a0(), self.a1() + rhs.a1())
    }
}

impl<T: Real> Sub for LambdaScalar<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.a0() - rhs.a0(), self.a1() - rhs.a1())
    }
}

impl<T: Real> Neg for LambdaScalar<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.a0(), -self.a1())
    }
}

impl<T: Real> Mul for LambdaScalar<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let (a0, a1, b0, b1) = (self.a0(), self.a1(), rhs.a0(), rhs.a1());
        Self::new(a0 * b0, a0 * b1 + a1 * b0)
    }
}

impl<T: Real> fmt::Display for LambdaScalar<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}{:+}i) + λ({}{:+}i)",
            self.re0, self.im0, self.re1, self.im1
        )
    }
}

/// Binary/unary operations exposed for table-driven use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LambdaOp {
    Add,
    Mul,
    Div,
    Conj,
}

/// `conj` ignores `b`.
pub fn lambda_arith<T: Real>(
    a: LambdaScalar<T>,
    b: LambdaScalar<T>,
    op: LambdaOp,
) -> Result<LambdaScalar<T>, Error> {
    match op {
        LambdaOp::Add => Ok(a + b),
        LambdaOp::Mul => Ok(a * b),
        LambdaOp::Div => a.checked_div(&b),
        LambdaOp::Conj => Ok(a.conj()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type L = LambdaScalar<f64>;

    fn l(a0: f64, a1: f64) -> L {
        L::new(Complex::new(a0, 0.0), Complex::new(a1, 0.0))
    }

    #[test]
    fn unit_is_identity() {
        let x = L::new(Complex::new(0.3, -1.0), Complex::new(2.0, 0.5));
        assert_eq!(L::one() * x, x);
    }

    #[test]
    fn lambda_squares_to_zero() {
        assert_eq!(L::lambda() * L::lambda(), L::zero());
    }

    #[test]
    fn truncated_product() {
        assert_eq!(l(2.0, 3.0) * l(5.0, 7.0), l(10.0, 29.0));
    }

    #[test]
    fn division_by_pure_lambda_is_singular() {
        assert_eq!(
            lambda_arith(L::one(), L::lambda(), LambdaOp::Div),
            Err(Error::SingularScalar)
        );
    }

    #[test]
    fn recip_roundtrip() {
        let b = L::new(Complex::new(2.0, 1.0), Complex::new(-0.5, 3.0));
        let p = b * b.recip().unwrap();
        assert!((p.a0() - Complex::new(1.0, 0.0)).norm() < 1e-15);
        assert!(p.a1().norm() < 1e-15);
    }

    fn arb() -> impl Strategy<Value = L> {
        (-4i32..4, -4i32..4, -4i32..4, -4i32..4).prop_map(|(a, b, c, d)| {
            L::new(
                Complex::new(a as f64 * 0.5, b as f64),
                Complex::new(c as f64, d as f64 * 0.25),
            )
        })
    }

    proptest! {
        // Dyadic inputs keep every product exactly representable.
        #[test]
        fn multiplication_is_associative(a in arb(), b in arb(), c in arb()) {
            prop_assert_eq!((a * b) * c, a * (b * c));
        }

        #[test]
        fn multiplication_commutes(a in arb(), b in arb()) {
            prop_assert_eq!(a * b, b * a);
        }
    }
}
