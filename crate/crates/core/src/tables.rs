//! Frame-indexed tables of endomorphisms: `T(X_i, X_j)` for all ordered pairs.

use crate::algebra::{Mat, TangentVec};
use crate::error::{check_dim, Result};
use crate::scalar::Scalar;

/// Table of `size × size` matrices indexed by ordered frame pairs `(i, j)` of
/// `0..n`, antisymmetric in the pair: `T(j, i) = −T(i, j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PairTable<S> {
    n: usize,
    size: usize,
    mats: Vec<Mat<S>>,
}

impl<S: Scalar> PairTable<S> {
    pub fn zeros(n: usize, size: usize) -> Self {
        PairTable { n, size, mats: vec![Mat::zeros(size, size); n * n] }
    }

    /// Builds the table from a function evaluated on pairs `i < j`.
    pub fn from_pairs(n: usize, size: usize, mut f: impl FnMut(usize, usize) -> Mat<S>) -> Self {
        let mut t = Self::zeros(n, size);
        for i in 0..n {
            for j in i + 1..n {
                t.set(i, j, f(i, j));
            }
        }
        t
    }

    pub fn try_from_pairs(
        n: usize,
        size: usize,
        mut f: impl FnMut(usize, usize) -> Result<Mat<S>>,
    ) -> Result<Self> {
        let mut t = Self::zeros(n, size);
        for i in 0..n {
            for j in i + 1..n {
                t.set(i, j, f(i, j)?);
            }
        }
        Ok(t)
    }

    /// Number of frame vectors.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Size of each endomorphism.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> &Mat<S> {
        &self.mats[i * self.n + j]
    }

    /// Sets `T(i, j) = m` and `T(j, i) = −m`.
    pub fn set(&mut self, i: usize, j: usize, m: Mat<S>) {
        let n = self.n;
        if i == j {
            self.mats[i * n + i] = Mat::zeros(self.size, self.size);
            return;
        }
        self.mats[j * n + i] = m.neg();
        self.mats[i * n + j] = m;
    }

    /// `T(X, Y) = Σ X_i Y_j T(i, j)`.
    pub fn eval(&self, x: &[S], y: &[S]) -> Mat<S> {
        let mut acc = Mat::zeros(self.size, self.size);
        for i in 0..self.n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.n {
                if i == j || y[j].is_zero() {
                    continue;
                }
                acc = acc.add(&self.get(i, j).scale(&(x[i].clone() * y[j].clone())));
            }
        }
        acc
    }

    pub fn eval_vec(&self, x: &TangentVec<S>, y: &TangentVec<S>) -> Result<Mat<S>> {
        check_dim(self.n, x.dim())?;
        check_dim(self.n, y.dim())?;
        Ok(self.eval(&x.coords, &y.coords))
    }

    pub fn map(&self, f: impl Fn(&Mat<S>) -> Mat<S>) -> Self {
        let mats: Vec<Mat<S>> = self.mats.iter().map(f).collect();
        let size = mats.first().map_or(self.size, |m| m.rows());
        PairTable { n: self.n, size, mats }
    }

    pub fn add(&self, other: &Self) -> Self {
        PairTable {
            n: self.n,
            size: self.size,
            mats: self.mats.iter().zip(&other.mats).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mats.iter().all(|m| m.is_zero())
    }

    pub fn max_abs(&self) -> f64 {
        self.mats.iter().map(|m| m.max_abs()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.n == other.n
            && self.size == other.size
            && self.mats.iter().zip(&other.mats).all(|(a, b)| a.approx_eq(b, tol))
    }

    /// Block-diagonal embedding of a factor table into a product frame.
    pub(crate) fn embed(&self, n: usize, size: usize, frame_offset: usize, block_offset: usize) -> Self {
        let mut t = Self::zeros(n, size);
        for i in 0..self.n {
            for j in i + 1..self.n {
                let src = self.get(i, j);
                let m = Mat::from_fn(size, size, |r, c| {
                    let in_block = |x: usize| x >= block_offset && x < block_offset + self.size;
                    if in_block(r) && in_block(c) {
                        src.get(r - block_offset, c - block_offset).clone()
                    } else {
                        S::zero()
                    }
                });
                t.set(frame_offset + i, frame_offset + j, m);
            }
        }
        t
    }
}

/// `W ↦ T_W`: one pair table per frame direction (first derivatives).
pub type DerivTable<S> = Vec<PairTable<S>>;

/// `(V, W) ↦ T_{V,W}`: second derivatives, indexed `[v][w]`.
pub type SecondDerivTable<S> = Vec<Vec<PairTable<S>>>;

pub fn zero_deriv<S: Scalar>(n: usize, size: usize) -> DerivTable<S> {
    vec![PairTable::zeros(n, size); n]
}

pub fn zero_second_deriv<S: Scalar>(n: usize, size: usize) -> SecondDerivTable<S> {
    vec![vec![PairTable::zeros(n, size); n]; n]
}

/// `Σ_w W_w T_w`.
pub fn eval_direction<S: Scalar>(table: &[PairTable<S>], w: &[S]) -> PairTable<S> {
    let n = table.first().map_or(0, |t| t.n());
    let size = table.first().map_or(0, |t| t.size());
    let mut acc = PairTable::zeros(n, size);
    for (t, wi) in table.iter().zip(w) {
        if !wi.is_zero() {
            acc = acc.add(&t.map(|m| m.scale(wi)));
        }
    }
    acc
}
