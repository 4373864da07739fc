//! Symmetric spaces `G/K` given by bracket tables of `g = k ⊕ p` in frames
//! where the `p` frame is orthonormal.

use crate::algebra::{trace_product, Mat};
use crate::error::{check_dim, Error, Result};
use crate::scalar::Scalar;
use crate::tables::PairTable;

/// Bracket tables: `[P_i,P_j] = Σ_a pp[i][j][a] K_a`,
/// `[K_a,P_i] = Σ_j kp[a][i][j] P_j`, `[K_a,K_b] = Σ_c kk[a][b][c] K_c`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricSpaceData<S> {
    pub dim_p: usize,
    pub dim_k: usize,
    pub pp: Vec<Vec<Vec<S>>>,
    pub kp: Vec<Vec<Vec<S>>>,
    pub kk: Vec<Vec<Vec<S>>>,
}

impl<S: Scalar> SymmetricSpaceData<S> {
    /// Space form of curvature `c` as `g/k` with `[P_i,P_j] = −c K_ij` and
    /// `K_ij = E_ij`, `i < j`: the round sphere `so(n+1)/so(n)` for `c > 0`,
    /// hyperbolic space `so(1,n)/so(n)` for `c < 0`.
    pub fn space_form(n: usize, c: S) -> Self {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let q = pairs.len();
        let index = |i: usize, j: usize| pairs.iter().position(|&p| p == (i, j));
        let zero = || S::zero();

        let mut pp = vec![vec![vec![zero(); q]; n]; n];
        for (a, &(i, j)) in pairs.iter().enumerate() {
            pp[i][j][a] = -c.clone();
            pp[j][i][a] = c.clone();
        }
        // [E_ij, P_l] = δ_jl P_i − δ_il P_j
        let mut kp = vec![vec![vec![zero(); n]; n]; q];
        for (a, &(i, j)) in pairs.iter().enumerate() {
            kp[a][j][i] = S::one();
            kp[a][i][j] = -S::one();
        }
        // [E_ab, E_cd] = δ_bc E_ad − δ_ac E_bd − δ_bd E_ac + δ_ad E_bc
        let mut kk = vec![vec![vec![zero(); q]; q]; q];
        let add_e = |out: &mut Vec<S>, x: usize, y: usize, s: i64| {
            if x == y {
                return;
            }
            let (lo, hi, sign) = if x < y { (x, y, s) } else { (y, x, -s) };
            let idx = index(lo, hi).expect("pair exists");
            out[idx] = out[idx].clone() + S::from_i64(sign);
        };
        for (u, &(a, b)) in pairs.iter().enumerate() {
            for (v, &(cc, d)) in pairs.iter().enumerate() {
                let out = &mut kk[u][v];
                if b == cc {
                    add_e(out, a, d, 1);
                }
                if a == cc {
                    add_e(out, b, d, -1);
                }
                if b == d {
                    add_e(out, a, cc, -1);
                }
                if a == d {
                    add_e(out, b, cc, 1);
                }
            }
        }
        SymmetricSpaceData { dim_p: n, dim_k: q, pp, kp, kk }
    }

    /// `Φ_{K_a}`: restriction of `ad_{K_a}` to `p`, as a matrix on `p` coordinates.
    pub fn phi_basis(&self, a: usize) -> Mat<S> {
        Mat::from_fn(self.dim_p, self.dim_p, |j, i| self.kp[a][i][j].clone())
    }

    /// `Φ_U` for `U = Σ_a u_a K_a`.
    pub fn phi(&self, u: &[S]) -> Mat<S> {
        let mut acc = Mat::zeros(self.dim_p, self.dim_p);
        for (a, ua) in u.iter().enumerate() {
            if !ua.is_zero() {
                acc = acc.add(&self.phi_basis(a).scale(ua));
            }
        }
        acc
    }

    /// `[X, Y] ∈ k` for `X, Y ∈ p`.
    pub fn bracket_pp(&self, x: &[S], y: &[S]) -> Vec<S> {
        let mut out = vec![S::zero(); self.dim_k];
        for i in 0..self.dim_p {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.dim_p {
                if y[j].is_zero() {
                    continue;
                }
                let s = x[i].clone() * y[j].clone();
                for (a, o) in out.iter_mut().enumerate() {
                    *o = o.clone() + s.clone() * self.pp[i][j][a].clone();
                }
            }
        }
        out
    }

    /// `[U, X] ∈ p` for `U ∈ k`, `X ∈ p`.
    pub fn bracket_kp(&self, u: &[S], x: &[S]) -> Vec<S> {
        self.phi(u).apply(x)
    }

    /// `U(F) = Σ_i [X_i, F(X_i)] ∈ k`.
    pub fn u_of(&self, f: &Mat<S>) -> Vec<S> {
        let mut out = vec![S::zero(); self.dim_k];
        for i in 0..self.dim_p {
            let mut e = vec![S::zero(); self.dim_p];
            e[i] = S::one();
            let b = self.bracket_pp(&e, &f.column(i));
            for (o, bi) in out.iter_mut().zip(b) {
                *o = o.clone() + bi;
            }
        }
        out
    }

    /// Splits `F ∈ so(p)` as `Φ_{X^F} + F^⊥` with `Φ_{X^F}` the orthogonal
    /// projection onto `Φ_k` under `(A, B) ↦ −tr(AB)`.
    pub fn decompose(&self, f: &Mat<S>) -> (Mat<S>, Mat<S>) {
        let ip = |a: &Mat<S>, b: &Mat<S>| -trace_product(a, b);
        let mut basis: Vec<(Mat<S>, S)> = Vec::new();
        for a in 0..self.dim_k {
            let mut w = self.phi_basis(a);
            for (u, nu) in &basis {
                w = w.sub(&u.scale(&(ip(&w, u) / nu.clone())));
            }
            let nw = ip(&w, &w);
            let negligible = if S::EXACT { nw.is_zero() } else { nw.to_f64() <= 1e-24 };
            if !negligible {
                basis.push((w, nw));
            }
        }
        let mut proj = Mat::zeros(self.dim_p, self.dim_p);
        for (u, nu) in &basis {
            proj = proj.add(&u.scale(&(ip(f, u) / nu.clone())));
        }
        let perp = f.sub(&proj);
        (proj, perp)
    }

    /// `R(P_i, P_j) = Φ_{[P_i,P_j]}`.
    pub fn curvature_table(&self) -> PairTable<S> {
        PairTable::from_pairs(self.dim_p, self.dim_p, |i, j| self.phi(&self.pp[i][j]))
    }

    /// Bracket on `g = k ⊕ p` in coordinates `(k..., p...)`.
    fn bracket_g(&self, x: &[S], y: &[S]) -> Vec<S> {
        let (q, n) = (self.dim_k, self.dim_p);
        let (xk, xp) = x.split_at(q);
        let (yk, yp) = y.split_at(q);
        let mut k_part = self.bracket_pp(xp, yp);
        for a in 0..q {
            for b in 0..q {
                if xk[a].is_zero() || yk[b].is_zero() {
                    continue;
                }
                let s = xk[a].clone() * yk[b].clone();
                for (c, kc) in k_part.iter_mut().enumerate() {
                    *kc = kc.clone() + s.clone() * self.kk[a][b][c].clone();
                }
            }
        }
        let p1 = self.bracket_kp(xk, yp);
        let p2 = self.bracket_kp(yk, xp);
        let mut out = k_part;
        out.extend((0..n).map(|i| p1[i].clone() - p2[i].clone()));
        out
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let (n, q) = (self.dim_p, self.dim_k);
        check_dim(n, self.pp.len())?;
        for row in &self.pp {
            check_dim(n, row.len())?;
            for v in row {
                check_dim(q, v.len())?;
            }
        }
        check_dim(q, self.kp.len())?;
        for row in &self.kp {
            check_dim(n, row.len())?;
            for v in row {
                check_dim(n, v.len())?;
            }
        }
        check_dim(q, self.kk.len())?;
        for row in &self.kk {
            check_dim(q, row.len())?;
            for v in row {
                check_dim(q, v.len())?;
            }
        }
        let bad = |msg: String| Err(Error::InvalidModel(msg));
        for i in 0..n {
            for j in 0..n {
                for a in 0..q {
                    if !(self.pp[i][j][a].clone() + self.pp[j][i][a].clone()).is_negligible(tol) {
                        return bad(format!("[p,p] table not antisymmetric at ({i},{j})"));
                    }
                }
            }
        }
        for a in 0..q {
            for b in 0..q {
                for c in 0..q {
                    if !(self.kk[a][b][c].clone() + self.kk[b][a][c].clone()).is_negligible(tol) {
                        return bad(format!("[k,k] table not antisymmetric at ({a},{b})"));
                    }
                }
            }
            if let Some((i, j)) = self.phi_basis(a).skew_adjoint_violation(&vec![S::one(); n], tol) {
                return bad(format!("ad(K_{a}) is not skew on p at ({i},{j})"));
            }
        }
        let dim = q + n;
        let e = |i: usize| {
            let mut v = vec![S::zero(); dim];
            v[i] = S::one();
            v
        };
        for x in 0..dim {
            for y in x + 1..dim {
                for z in y + 1..dim {
                    let (ex, ey, ez) = (e(x), e(y), e(z));
                    let t1 = self.bracket_g(&ex, &self.bracket_g(&ey, &ez));
                    let t2 = self.bracket_g(&ey, &self.bracket_g(&ez, &ex));
                    let t3 = self.bracket_g(&ez, &self.bracket_g(&ex, &ey));
                    for c in 0..dim {
                        let s = t1[c].clone() + t2[c].clone() + t3[c].clone();
                        if !s.is_negligible(tol) {
                            return bad(format!("Jacobi identity fails on basis triple ({x},{y},{z})"));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}
