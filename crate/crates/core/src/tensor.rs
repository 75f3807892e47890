//! Dense coordinate tensors whose components are jets, and their λ-graded
//! counterpart.
//!
//! Components are stored row-major: the first index is the slowest. All
//! slots are coordinate slots; which ones are contravariant is the caller's
//! bookkeeping. Differential `p`-forms are stored as fully antisymmetric
//! rank-`p` arrays with `dx^a ∧ dx^b = dx^a ⊗ dx^b − dx^b ⊗ dx^a`, so that
//! the interior product `∂_i ⌟` is contraction of the first slot.

use std::ops::{Add, Sub};

use num_complex::Complex;

use crate::expr::FieldExpr;
use crate::jet::Jet;
use crate::lambda::LambdaScalar;
use crate::scalar::{czero, Real};
use crate::Error;

#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<T> {
    dim: usize,
    rank: usize,
    comps: Vec<Jet<T>>,
}

/// Odometer over all multi-indices of a given rank.
pub fn multi_indices(dim: usize, rank: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = dim.pow(rank as u32);
    (0..total).map(move |mut flat| {
        let mut idx = vec![0; rank];
        for slot in (0..rank).rev() {
            idx[slot] = flat % dim;
            flat /= dim;
        }
        idx
    })
}

fn permutation_sign(p: &[usize]) -> i32 {
    let mut sign = 1;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

impl<T: Real> Tensor<T> {
    pub fn zeros(dim: usize, rank: usize) -> Self {
        Self {
            dim,
            rank,
            comps: vec![Jet::zero(dim); dim.pow(rank as u32)],
        }
    }

    pub fn scalar(j: Jet<T>) -> Self {
        Self {
            dim: j.dim(),
            rank: 0,
            comps: vec![j],
        }
    }

    pub fn from_fn(dim: usize, rank: usize, mut f: impl FnMut(&[usize]) -> Jet<T>) -> Self {
        Self {
            dim,
            rank,
            comps: multi_indices(dim, rank).map(|idx| f(&idx)).collect(),
        }
    }

    pub fn try_from_fn(
        dim: usize,
        rank: usize,
        mut f: impl FnMut(&[usize]) -> Result<Jet<T>, Error>,
    ) -> Result<Self, Error> {
        let comps = multi_indices(dim, rank)
            .map(|idx| f(&idx))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { dim, rank, comps })
    }

    /// Constant 1-form with the given components.
    pub fn covector(dim: usize, comps: &[Complex<T>]) -> Self {
        assert_eq!(comps.len(), dim);
        Self::from_fn(dim, 1, |i| Jet::constant(dim, comps[i[0]]))
    }

    /// Coordinate 1-form `dx^k`.
    pub fn basis(dim: usize, k: usize) -> Self {
        Self::from_fn(dim, 1, |i| {
            Jet::constant(
                dim,
                if i[0] == k {
                    Complex::new(T::one(), T::zero())
                } else {
                    czero()
                },
            )
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn comps(&self) -> &[Jet<T>] {
        &self.comps
    }

    /// Lowest jet order across components.
    pub fn order(&self) -> usize {
        self.comps.iter().map(Jet::order).min().unwrap_or(0)
    }

    #[inline]
    pub fn flat(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    #[inline]
    pub fn at(&self, idx: &[usize]) -> &Jet<T> {
        &self.comps[self.flat(idx)]
    }

    pub fn at_mut(&mut self, idx: &[usize]) -> &mut Jet<T> {
        let k = self.flat(idx);
        &mut self.comps[k]
    }

    pub fn set(&mut self, idx: &[usize], j: Jet<T>) {
        let k = self.flat(idx);
        self.comps[k] = j;
    }

    pub fn value(&self, idx: &[usize]) -> Complex<T> {
        self.at(idx).value()
    }

    pub fn map(&self, f: impl Fn(&Jet<T>) -> Jet<T>) -> Self {
        Self {
            dim: self.dim,
            rank: self.rank,
            comps: self.comps.iter().map(f).collect(),
        }
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        self.map(|j| j.scale(s))
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.map(|j| j.scale_real(s))
    }

    pub fn mul_jet(&self, s: &Jet<T>) -> Self {
        self.map(|j| j.mul_jet(s))
    }

    pub fn conj(&self) -> Self {
        self.map(Jet::conj)
    }

    pub fn truncate(&self, order: usize) -> Self {
        self.map(|j| j.clone().truncate(order))
    }

    /// Partial derivatives, derivative slot appended last.
    pub fn partial(&self) -> Self {
        let d = self.dim;
        Self::from_fn(d, self.rank + 1, |idx| {
            let (head, k) = idx.split_at(self.rank);
            self.at(head).partial(k[0])
        })
    }

    pub fn outer(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let r = self.rank;
        Self::from_fn(self.dim, r + other.rank, |idx| {
            self.at(&idx[..r]).mul_jet(other.at(&idx[r..]))
        })
    }

    /// New slot `k` carries old slot `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.rank);
        let mut old = vec![0; self.rank];
        Self::from_fn(self.dim, self.rank, |idx| {
            for (k, &p) in perm.iter().enumerate() {
                old[p] = idx[k];
            }
            self.at(&old).clone()
        })
    }

    /// Move the last slot to the front.
    pub fn last_slot_first(&self) -> Self {
        let r = self.rank;
        let perm: Vec<usize> = std::iter::once(r - 1).chain(0..r - 1).collect();
        self.permute(&perm)
    }

    /// Fix the last slot to `i`.
    pub fn slice_last(&self, i: usize) -> Self {
        assert!(self.rank >= 1);
        let r = self.rank;
        let mut full = vec![i; r];
        Self::from_fn(self.dim, r - 1, |idx| {
            full[..r - 1].copy_from_slice(idx);
            self.at(&full).clone()
        })
    }

    /// `Σ_j v^j X_{…j}`.
    pub fn contract_last(&self, v: &[Jet<T>]) -> Self {
        assert_eq!(v.len(), self.dim);
        let r = self.rank;
        let mut full = vec![0; r];
        Self::from_fn(self.dim, r - 1, |idx| {
            full[..r - 1].copy_from_slice(idx);
            let mut acc = Jet::zero(self.dim);
            for (j, vj) in v.iter().enumerate() {
                if vj.is_zero() {
                    continue;
                }
                full[r - 1] = j;
                acc.add_product(vj, self.at(&full));
            }
            acc
        })
    }

    /// `∂_i ⌟` on the first slot.
    pub fn interior(&self, i: usize) -> Self {
        assert!(self.rank >= 1);
        let mut full = vec![i; self.rank];
        Self::from_fn(self.dim, self.rank - 1, |idx| {
            full[1..].copy_from_slice(idx);
            self.at(&full).clone()
        })
    }

    /// Antisymmetrise a rank-2 array: `∧(X)_{ab} = X_{ab} − X_{ba}`.
    pub fn wedge_rank2(&self) -> Self {
        assert_eq!(self.rank, 2);
        Self::from_fn(self.dim, 2, |i| self.at(&[i[0], i[1]]) - self.at(&[i[1], i[0]]))
    }

    /// `∧` on the first two slots of a rank-3 array (used for `Ω² ⊗ Ω¹` values).
    pub fn wedge_first_two(&self) -> Self {
        assert_eq!(self.rank, 3);
        Self::from_fn(self.dim, 3, |i| {
            self.at(&[i[0], i[1], i[2]]) - self.at(&[i[1], i[0], i[2]])
        })
    }

    /// Exterior product of a `p`-form and a `q`-form (both stored antisymmetric).
    pub fn wedge(&self, other: &Self) -> Self {
        let (p, q) = (self.rank, other.rank);
        let n = p + q;
        let perms = permutations(n);
        let signs: Vec<i32> = perms.iter().map(|s| permutation_sign(s)).collect();
        let norm = T::from_u64(factorial(p) * factorial(q)).expect("small factorial");
        let d = self.dim;
        let mut a = vec![0; p];
        let mut b = vec![0; q];
        Self::from_fn(d, n, |idx| {
            let mut acc = Jet::zero(d);
            for (s, &sign) in perms.iter().zip(&signs) {
                for k in 0..p {
                    a[k] = idx[s[k]];
                }
                for k in 0..q {
                    b[k] = idx[s[p + k]];
                }
                let term = self.at(&a).mul_jet(other.at(&b));
                if sign > 0 {
                    acc += &term;
                } else {
                    acc -= &term;
                }
            }
            acc.scale_real(T::one() / norm)
        })
    }

    /// Largest modulus among component values.
    pub fn max_abs(&self) -> T {
        self.comps.iter().fold(T::zero(), |m, j| {
            let v = j.value().norm();
            if v > m {
                v
            } else {
                m
            }
        })
    }

    /// Max-abs of the component-wise difference of values.
    pub fn max_diff(&self, other: &Self) -> T {
        assert_eq!(self.comps.len(), other.comps.len(), "tensor shape mismatch");
        self.comps
            .iter()
            .zip(&other.comps)
            .fold(T::zero(), |m, (a, b)| {
                let v = (a.value() - b.value()).norm();
                if v > m {
                    v
                } else {
                    m
                }
            })
    }

    pub fn values(&self) -> Vec<Complex<T>> {
        self.comps.iter().map(Jet::value).collect()
    }
}

impl<T: Real> Add for &Tensor<T> {
    type Output = Tensor<T>;
    fn add(self, rhs: &Tensor<T>) -> Tensor<T> {
        assert_eq!((self.dim, self.rank), (rhs.dim, rhs.rank), "tensor shape mismatch");
        Tensor {
            dim: self.dim,
            rank: self.rank,
            comps: self.comps.iter().zip(&rhs.comps).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &Tensor<T> {
    type Output = Tensor<T>;
    fn sub(self, rhs: &Tensor<T>) -> Tensor<T> {
        assert_eq!((self.dim, self.rank), (rhs.dim, rhs.rank), "tensor shape mismatch");
        Tensor {
            dim: self.dim,
            rank: self.rank,
            comps: self.comps.iter().zip(&rhs.comps).map(|(a, b)| a - b).collect(),
        }
    }
}

/// λ-graded tensor `c0 + λ c1`.
#[derive(Clone, Debug, PartialEq)]
pub struct QTensor<T> {
    pub c0: Tensor<T>,
    pub c1: Tensor<T>,
}

impl<T: Real> QTensor<T> {
    pub fn new(c0: Tensor<T>, c1: Tensor<T>) -> Self {
        assert_eq!((c0.dim, c0.rank), (c1.dim, c1.rank), "grade shape mismatch");
        Self { c0, c1 }
    }

    pub fn classical(c0: Tensor<T>) -> Self {
        let c1 = Tensor::zeros(c0.dim, c0.rank);
        Self { c0, c1 }
    }

    /// `λ · t`.
    pub fn lambda_times(t: Tensor<T>) -> Self {
        let c0 = Tensor::zeros(t.dim, t.rank);
        Self { c0, c1: t }
    }

    pub fn zeros(dim: usize, rank: usize) -> Self {
        Self::classical(Tensor::zeros(dim, rank))
    }

    pub fn scalar(c0: Jet<T>, c1: Jet<T>) -> Self {
        Self::new(Tensor::scalar(c0), Tensor::scalar(c1))
    }

    pub fn dim(&self) -> usize {
        self.c0.dim
    }

    pub fn rank(&self) -> usize {
        self.c0.rank
    }

    pub fn at(&self, idx: &[usize]) -> LambdaScalar<T> {
        LambdaScalar::new(self.c0.value(idx), self.c1.value(idx))
    }

    pub fn scale(&self, s: LambdaScalar<T>) -> Self {
        let (a0, a1) = (s.a0(), s.a1());
        Self::new(self.c0.scale(a0), &self.c1.scale(a0) + &self.c0.scale(a1))
    }

    pub fn map(&self, f: impl Fn(&Tensor<T>) -> Tensor<T>) -> Self {
        Self::new(f(&self.c0), f(&self.c1))
    }

    pub fn conj(&self) -> Self {
        self.map(Tensor::conj)
    }

    /// Max-abs residuals against `other` in the classical and λ slots.
    pub fn max_diff(&self, other: &Self) -> (T, T) {
        (self.c0.max_diff(&other.c0), self.c1.max_diff(&other.c1))
    }

    pub fn max_abs(&self) -> (T, T) {
        (self.c0.max_abs(), self.c1.max_abs())
    }
}

impl<T: Real> Add for &QTensor<T> {
    type Output = QTensor<T>;
    fn add(self, rhs: &QTensor<T>) -> QTensor<T> {
        QTensor::new(&self.c0 + &rhs.c0, &self.c1 + &rhs.c1)
    }
}

impl<T: Real> Sub for &QTensor<T> {
    type Output = QTensor<T>;
    fn sub(self, rhs: &QTensor<T>) -> QTensor<T> {
        QTensor::new(&self.c0 - &rhs.c0, &self.c1 - &rhs.c1)
    }
}

/// A scalar field that can be expanded to a jet at any chart point.
pub trait ScalarField<T: Real>: Send + Sync {
    fn jet_at(&self, point: &[T]) -> Result<Jet<T>, Error>;
}

impl<T: Real> ScalarField<T> for FieldExpr {
    fn jet_at(&self, point: &[T]) -> Result<Jet<T>, Error> {
        self.eval_jet(point)
    }
}

/// Closure-backed field: receives the coordinate jets at the point.
pub struct FnField<F>(pub F);

impl<T: Real, F> ScalarField<T> for FnField<F>
where
    F: Fn(&[Jet<T>]) -> Jet<T> + Send + Sync,
{
    fn jet_at(&self, point: &[T]) -> Result<Jet<T>, Error> {
        Ok((self.0)(&Jet::coordinates(point)))
    }
}
