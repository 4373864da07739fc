//! Pointwise linear algebra in fixed orthonormal frames.

use crate::error::{check_dim, Error, Result};
use crate::scalar::Scalar;

/// Tangent vector in the orthonormal frame `(X_i)` of `T_xM`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVec<S> {
    pub coords: Vec<S>,
}

impl<S: Scalar> TangentVec<S> {
    pub fn new(coords: Vec<S>) -> Self {
        TangentVec { coords }
    }

    pub fn zeros(n: usize) -> Self {
        TangentVec { coords: vec![S::zero(); n] }
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.coords[i] = S::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn dot(&self, other: &Self) -> S {
        dot(&self.coords, &other.coords)
    }

    pub fn norm_sq(&self) -> S {
        self.dot(self)
    }

    pub fn add(&self, other: &Self) -> Self {
        TangentVec::new(add(&self.coords, &other.coords))
    }

    pub fn sub(&self, other: &Self) -> Self {
        TangentVec::new(sub(&self.coords, &other.coords))
    }

    pub fn scale(&self, s: &S) -> Self {
        TangentVec::new(scale(&self.coords, s))
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|x| x.is_zero())
    }
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Mat { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        for row in &rows {
            check_dim(c, row.len())?;
        }
        Ok(Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<S>]) -> Self {
        let rows = cols.first().map_or(0, |c| c.len());
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn apply(&self, v: &[S]) -> Vec<S> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                dot(row, v)
            })
            .collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.cols, other.rows);
        Self::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = S::zero();
            for l in 0..self.cols {
                let a = self.get(i, l);
                if !a.is_zero() {
                    acc = acc + a.clone() * other.get(l, j).clone();
                }
            }
            acc
        })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn add(&self, other: &Self) -> Self {
        Mat { rows: self.rows, cols: self.cols, data: add(&self.data, &other.data) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Mat { rows: self.rows, cols: self.cols, data: sub(&self.data, &other.data) }
    }

    pub fn scale(&self, s: &S) -> Self {
        Mat { rows: self.rows, cols: self.cols, data: scale(&self.data, s) }
    }

    pub fn neg(&self) -> Self {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x.clone()).collect() }
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
    }

    /// Frobenius norm squared.
    pub fn frobenius_sq(&self) -> S {
        dot(&self.data, &self.data)
    }

    /// First entry breaking `W M + (W M)^T = 0`, where `W` is the diagonal
    /// weight matrix. `None` means the matrix is skew-adjoint for the
    /// weighted inner product.
    pub fn skew_adjoint_violation(&self, weights: &[S], tol: f64) -> Option<(usize, usize)> {
        for i in 0..self.rows {
            for j in i..self.cols {
                let v = weights[i].clone() * self.get(i, j).clone()
                    + weights[j].clone() * self.get(j, i).clone();
                if !v.is_negligible(tol) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.data.iter().zip(&other.data).all(|(a, b)| a.approx_eq(b, tol))
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Mat<T> {
        Mat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn data(&self) -> &[S] {
        &self.data
    }
}

/// Skew-symmetric endomorphism of `T_xM`, stored as a full matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Skew<S>(Mat<S>);

impl<S: Scalar> Skew<S> {
    /// Validates antisymmetry (exactly in rational mode, within `tol` for floats).
    pub fn new(mat: Mat<S>, tol: f64) -> Result<Self> {
        check_dim(mat.rows(), mat.cols())?;
        if let Some((row, col)) = mat.skew_adjoint_violation(&vec![S::one(); mat.rows()], tol) {
            return Err(Error::NotSkew { row, col });
        }
        Ok(Skew(mat))
    }

    pub(crate) fn from_mat_unchecked(mat: Mat<S>) -> Self {
        Skew(mat)
    }

    pub fn zeros(n: usize) -> Self {
        Skew(Mat::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.rows()
    }

    pub fn mat(&self) -> &Mat<S> {
        &self.0
    }

    pub fn into_mat(self) -> Mat<S> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        self.0.get(i, j)
    }

    pub fn apply(&self, v: &TangentVec<S>) -> TangentVec<S> {
        TangentVec::new(self.0.apply(&v.coords))
    }

    pub fn add(&self, other: &Self) -> Self {
        Skew(self.0.add(&other.0))
    }

    pub fn sub(&self, other: &Self) -> Self {
        Skew(self.0.sub(&other.0))
    }

    pub fn scale(&self, s: &S) -> Self {
        Skew(self.0.scale(s))
    }

    /// Lie bracket `[F, G] = FG - GF`, again skew.
    pub fn bracket(&self, other: &Self) -> Self {
        Skew(self.0.commutator(&other.0))
    }

    /// `tr(F ∘ G)`.
    pub fn trace_product(&self, other: &Self) -> S {
        trace_product(&self.0, &other.0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Coordinates `F[i][j]` for `i < j` in lexicographic order.
    pub fn upper_coords(&self) -> Vec<S> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                out.push(self.get(i, j).clone());
            }
        }
        out
    }

    pub fn from_upper_coords(n: usize, coords: &[S]) -> Result<Self> {
        check_dim(n * n.saturating_sub(1) / 2, coords.len())?;
        let mut m = Mat::zeros(n, n);
        let mut idx = 0;
        for i in 0..n {
            for j in i + 1..n {
                m.set(i, j, coords[idx].clone());
                m.set(j, i, -coords[idx].clone());
                idx += 1;
            }
        }
        Ok(Skew(m))
    }
}

/// `X ∧ Y : Z ↦ ⟨Y,Z⟩X − ⟨X,Z⟩Y`.
pub fn wedge<S: Scalar>(x: &TangentVec<S>, y: &TangentVec<S>) -> Result<Skew<S>> {
    check_dim(x.dim(), y.dim())?;
    let n = x.dim();
    Ok(Skew(Mat::from_fn(n, n, |i, j| {
        x.coords[i].clone() * y.coords[j].clone() - y.coords[i].clone() * x.coords[j].clone()
    })))
}

/// `tr(A ∘ B)` for square matrices of equal size.
pub fn trace_product<S: Scalar>(a: &Mat<S>, b: &Mat<S>) -> S {
    let n = a.rows();
    let mut acc = S::zero();
    for i in 0..n {
        for j in 0..n {
            let x = a.get(i, j);
            if !x.is_zero() {
                acc = acc + x.clone() * b.get(j, i).clone();
            }
        }
    }
    acc
}

/// Element of an Atiyah fiber `T_xM ⊕ so(T_xM)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AtiyahFiber<S> {
    pub tangent: TangentVec<S>,
    pub skew: Skew<S>,
}

impl<S: Scalar> AtiyahFiber<S> {
    pub fn new(tangent: TangentVec<S>, skew: Skew<S>) -> Result<Self> {
        check_dim(tangent.dim(), skew.dim())?;
        Ok(AtiyahFiber { tangent, skew })
    }

    pub fn zeros(n: usize) -> Self {
        AtiyahFiber { tangent: TangentVec::zeros(n), skew: Skew::zeros(n) }
    }

    pub fn dim(&self) -> usize {
        self.tangent.dim()
    }

    /// Flat coordinates: tangent part first, then `F[i][j]` for `i < j`.
    pub fn to_flat(&self) -> FiberVec<S> {
        let mut coords = self.tangent.coords.clone();
        coords.extend(self.skew.upper_coords());
        FiberVec::new(coords)
    }

    pub fn from_flat(n: usize, v: &FiberVec<S>) -> Result<Self> {
        check_dim(atiyah_rank(n), v.dim())?;
        let tangent = TangentVec::new(v.coords[..n].to_vec());
        let skew = Skew::from_upper_coords(n, &v.coords[n..])?;
        Ok(AtiyahFiber { tangent, skew })
    }
}

/// Rank `n + n(n-1)/2` of the Atiyah bundle over an `n`-manifold.
pub fn atiyah_rank(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Index of the pair `(i, j)`, `i < j`, in lexicographic order among all pairs of `0..n`.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

/// `⟨X+F, Y+G⟩_k = ⟨X,Y⟩ − k tr(F∘G)`.
pub fn inner_k<S: Scalar>(xi: &AtiyahFiber<S>, eta: &AtiyahFiber<S>, k: &S) -> Result<S> {
    if *k <= S::zero() {
        return Err(Error::NonPositive { what: "k" });
    }
    check_dim(xi.dim(), eta.dim())?;
    Ok(xi.tangent.dot(&eta.tangent) - k.clone() * xi.skew.trace_product(&eta.skew))
}

/// Fiber vector in flat coordinates relative to an orthogonal frame `(e_u)`
/// with `⟨e_u, e_v⟩ = w_u δ_uv` (see [`FiberMetric`]).
#[derive(Clone, Debug, PartialEq)]
pub struct FiberVec<S> {
    pub coords: Vec<S>,
}

impl<S: Scalar> FiberVec<S> {
    pub fn new(coords: Vec<S>) -> Self {
        FiberVec { coords }
    }

    pub fn zeros(m: usize) -> Self {
        FiberVec { coords: vec![S::zero(); m] }
    }

    pub fn basis(m: usize, u: usize) -> Self {
        let mut v = Self::zeros(m);
        v.coords[u] = S::one();
        v
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn add(&self, other: &Self) -> Self {
        FiberVec::new(add(&self.coords, &other.coords))
    }

    pub fn sub(&self, other: &Self) -> Self {
        FiberVec::new(sub(&self.coords, &other.coords))
    }

    pub fn scale(&self, s: &S) -> Self {
        FiberVec::new(scale(&self.coords, s))
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|x| x.is_zero())
    }
}

/// Diagonal fiber metric `⟨e_u, e_v⟩ = w_u δ_uv`.
///
/// The Atiyah fiber uses weight 1 on tangent coordinates and `2k` on each
/// `F[i][j]`, `i < j`, so that `e_u / sqrt(w_u)` is the orthonormal frame
/// `{X_i} ∪ {(1/sqrt(2k)) X_i∧X_j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberMetric<S> {
    pub weights: Vec<S>,
}

impl<S: Scalar> FiberMetric<S> {
    pub fn euclidean(m: usize) -> Self {
        FiberMetric { weights: vec![S::one(); m] }
    }

    pub fn atiyah(n: usize, k: &S) -> Self {
        let two_k = S::from_i64(2) * k.clone();
        let mut weights = vec![S::one(); n];
        weights.extend(std::iter::repeat_n(two_k, n * n.saturating_sub(1) / 2));
        FiberMetric { weights }
    }

    pub fn rank(&self) -> usize {
        self.weights.len()
    }

    pub fn inner(&self, a: &FiberVec<S>, b: &FiberVec<S>) -> S {
        self.inner_slices(&a.coords, &b.coords)
    }

    pub fn inner_slices(&self, a: &[S], b: &[S]) -> S {
        let mut acc = S::zero();
        for ((w, x), y) in self.weights.iter().zip(a).zip(b) {
            if !x.is_zero() && !y.is_zero() {
                acc = acc + w.clone() * x.clone() * y.clone();
            }
        }
        acc
    }

    pub fn norm_sq(&self, a: &FiberVec<S>) -> S {
        self.inner(a, a)
    }

    pub fn is_euclidean(&self) -> bool {
        self.weights.iter().all(|w| w.is_one())
    }
}

impl FiberMetric<f64> {
    /// Coordinates of `v` in the orthonormal frame `e_u / sqrt(w_u)`.
    pub fn to_orthonormal(&self, v: &FiberVec<f64>) -> Vec<f64> {
        v.coords.iter().zip(&self.weights).map(|(x, w)| x * w.sqrt()).collect()
    }

    pub fn from_orthonormal(&self, coords: &[f64]) -> FiberVec<f64> {
        FiberVec::new(coords.iter().zip(&self.weights).map(|(x, w)| x / w.sqrt()).collect())
    }
}

/// Gram–Schmidt without normalization (exact-safe). Returns mutually
/// orthogonal vectors spanning the same flags as the input.
pub fn orthogonalize<S: Scalar>(
    vectors: &[Vec<S>],
    inner: impl Fn(&[S], &[S]) -> S,
    tol: f64,
) -> Result<Vec<Vec<S>>> {
    let mut out: Vec<Vec<S>> = Vec::with_capacity(vectors.len());
    let mut norms: Vec<S> = Vec::with_capacity(vectors.len());
    for (index, v) in vectors.iter().enumerate() {
        let mut w = v.clone();
        for (u, nu) in out.iter().zip(&norms) {
            let coef = inner(&w, u) / nu.clone();
            w = sub(&w, &scale(u, &coef));
        }
        let nw = inner(&w, &w);
        let scale_ref = inner(v, v).to_f64().max(1.0);
        if S::EXACT {
            if nw.is_zero() {
                return Err(Error::RankDeficient { index });
            }
        } else if nw.to_f64() <= tol * tol * scale_ref {
            return Err(Error::RankDeficient { index });
        }
        out.push(w);
        norms.push(nw);
    }
    Ok(out)
}

/// Gram–Schmidt with normalization (float mode).
pub fn orthonormalize(
    vectors: &[Vec<f64>],
    inner: impl Fn(&[f64], &[f64]) -> f64,
    tol: f64,
) -> Result<Vec<Vec<f64>>> {
    let orth = orthogonalize(vectors, &inner, tol)?;
    Ok(orth
        .into_iter()
        .map(|w| {
            let norm = inner(&w, &w).sqrt();
            w.iter().map(|x| x / norm).collect()
        })
        .collect())
}

pub(crate) fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    let mut acc = S::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc = acc + x.clone() * y.clone();
        }
    }
    acc
}

pub(crate) fn add<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub(crate) fn sub<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub(crate) fn scale<S: Scalar>(a: &[S], s: &S) -> Vec<S> {
    a.iter().map(|x| x.clone() * s.clone()).collect()
}
