//! Left-invariant metrics on 3D unimodular Lie groups in a Milnor frame:
//! `[X1,X2] = m X3`, `[X1,X3] = n X2`, `[X2,X3] = p X1`.

use rayon::prelude::*;

use crate::algebra::{wedge, FiberVec, Mat, Skew, TangentVec};
use crate::error::{check_dim, Error, Result};
use crate::scalar::{sq, Rational, Scalar};
use crate::tables::{DerivTable, PairTable, SecondDerivTable};

#[derive(Clone, Debug, PartialEq)]
pub struct MilnorConstants<S> {
    pub m: S,
    pub n: S,
    pub p: S,
}

impl<S: Scalar> MilnorConstants<S> {
    pub fn new(m: S, n: S, p: S) -> Self {
        MilnorConstants { m, n, p }
    }

    /// Structure constants `c[i][j][l]` with `[X_i, X_j] = Σ_l c[i][j][l] X_l`.
    pub fn structure_constants(&self) -> [[[S; 3]; 3]; 3] {
        let z = S::zero;
        let mut c: [[[S; 3]; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| [z(), z(), z()]));
        c[0][1][2] = self.m.clone();
        c[1][0][2] = -self.m.clone();
        c[0][2][1] = self.n.clone();
        c[2][0][1] = -self.n.clone();
        c[1][2][0] = self.p.clone();
        c[2][1][0] = -self.p.clone();
        c
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> MilnorConstants<T> {
        MilnorConstants { m: f(&self.m), n: f(&self.n), p: f(&self.p) }
    }
}

/// Curvature constants `μ_ij` and the positivity indicators `λ_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureConstants<S> {
    pub mu12: S,
    pub mu13: S,
    pub mu23: S,
    pub lambda1: S,
    pub lambda2: S,
    pub lambda3: S,
}

impl<S: Scalar> CurvatureConstants<S> {
    pub fn mu(&self) -> [S; 3] {
        [self.mu12.clone(), self.mu13.clone(), self.mu23.clone()]
    }

    pub fn lambda(&self) -> [S; 3] {
        [self.lambda1.clone(), self.lambda2.clone(), self.lambda3.clone()]
    }

    /// `λ1+λ2+λ3 = 2(μ12²+μ13²+μ23²) + 12(μ12+μ13+μ23−1)`.
    pub fn lambda_sum_identity_holds(&self, tol: f64) -> bool {
        let lhs = self.lambda1.clone() + self.lambda2.clone() + self.lambda3.clone();
        let squares = sq(&self.mu12) + sq(&self.mu13) + sq(&self.mu23);
        let total = self.mu12.clone() + self.mu13.clone() + self.mu23.clone() - S::one();
        let rhs = S::from_i64(2) * squares + S::from_i64(12) * total;
        lhs.approx_eq(&rhs, tol)
    }
}

/// Coefficients `(a1, a2, a3)` of the Levi-Civita connection
/// `∇_{X1} = a1 X2∧X3`, `∇_{X2} = a2 X1∧X3`, `∇_{X3} = a3 X1∧X2`.
pub fn connection_coefficients<S: Scalar>(c: &MilnorConstants<S>) -> [S; 3] {
    let (m, n, p) = (c.m.clone(), c.n.clone(), c.p.clone());
    let h = S::half();
    [
        h.clone() * (-m.clone() + n.clone() + p.clone()),
        h.clone() * (m.clone() + n.clone() + p.clone()),
        h * (m + n - p),
    ]
}

/// The three connection matrices `∇_{X_i}` (acting on frame coordinates).
pub fn milnor_connection<S: Scalar>(c: &MilnorConstants<S>) -> [Skew<S>; 3] {
    let [a1, a2, a3] = connection_coefficients(c);
    let e = |i| TangentVec::<S>::basis(3, i);
    let w = |i, j| wedge(&e(i), &e(j)).expect("same dimension");
    [w(1, 2).scale(&a1), w(0, 2).scale(&a2), w(0, 1).scale(&a3)]
}

/// `μ_ij` by the closed-form expressions in `m, n, p`.
pub fn mu_closed_form<S: Scalar>(c: &MilnorConstants<S>) -> [S; 3] {
    let (m, n, p) = (c.m.clone(), c.n.clone(), c.p.clone());
    let spp = p.clone() + n.clone() + m.clone(); // p+n+m
    let mnp = -n.clone() - p.clone() + m.clone(); // -n-p+m
    let pmn = -p.clone() + m.clone() + n.clone(); // -p+m+n
    let q = S::ratio(1, 4);
    let mu12 = q.clone()
        * (spp.clone() * mnp.clone() + pmn.clone() * mnp.clone() + pmn.clone() * spp.clone());
    let mu13 = -q.clone()
        * (pmn.clone() * mnp.clone() + spp.clone() * mnp.clone() - pmn.clone() * spp.clone());
    let mu23 = -q * (pmn.clone() * spp.clone() - pmn * mnp.clone() + spp * mnp);
    [mu12, mu13, mu23]
}

/// Curvature table `R(X_i, X_j) = ∇_{[X_i,X_j]} − [∇_{X_i}, ∇_{X_j}]` computed
/// from the connection matrices.
pub fn curvature_from_connection<S: Scalar>(c: &MilnorConstants<S>) -> PairTable<S> {
    let d = milnor_connection(c);
    let sc = c.structure_constants();
    PairTable::from_pairs(3, 3, |i, j| {
        let mut bracket_term = Mat::zeros(3, 3);
        for (l, dl) in d.iter().enumerate() {
            if !sc[i][j][l].is_zero() {
                bracket_term = bracket_term.add(&dl.mat().scale(&sc[i][j][l]));
            }
        }
        bracket_term.sub(&d[i].mat().commutator(d[j].mat()))
    })
}

/// `μ_ij` read off the curvature computed from the connection; errors if the
/// curvature is not of the form `μ_ij X_i∧X_j`.
pub fn mu_rederived<S: Scalar>(c: &MilnorConstants<S>) -> Result<[S; 3]> {
    let table = curvature_from_connection(c);
    let mut out = Vec::with_capacity(3);
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        let r = table.get(i, j);
        let mu = r.get(i, j).clone();
        let expected = wedge(&TangentVec::basis(3, i), &TangentVec::basis(3, j))?.mat().scale(&mu);
        if !r.approx_eq(&expected, 1e-12) {
            return Err(Error::InvalidModel(format!(
                "curvature R(X{},X{}) is not a multiple of X{}∧X{}",
                i + 1,
                j + 1,
                i + 1,
                j + 1
            )));
        }
        out.push(mu);
    }
    Ok([out[0].clone(), out[1].clone(), out[2].clone()])
}

pub fn curvature_constants<S: Scalar>(c: &MilnorConstants<S>) -> CurvatureConstants<S> {
    let [mu12, mu13, mu23] = mu_closed_form(c);
    let four_total = S::from_i64(4) * (mu12.clone() + mu13.clone() + mu23.clone() - S::one());
    CurvatureConstants {
        lambda1: sq(&mu12) + sq(&mu13) + four_total.clone(),
        lambda2: sq(&mu12) + sq(&mu23) + four_total.clone(),
        lambda3: sq(&mu13) + sq(&mu23) + four_total,
        mu12,
        mu13,
        mu23,
    }
}

/// `τ > 0` on all of `T^(1)G` iff every `λ_i < 0`.
pub fn positive_scalar_verdict<S: Scalar>(c: &MilnorConstants<S>) -> bool {
    curvature_constants(c).lambda().iter().all(|l| *l < S::zero())
}

/// Curvature table `R(X_i,X_j) = μ_ij X_i∧X_j` of the Milnor metric.
pub fn curvature_table<S: Scalar>(c: &MilnorConstants<S>) -> PairTable<S> {
    let mu = mu_closed_form(c);
    PairTable::from_pairs(3, 3, |i, j| {
        let idx = if i == 0 { j - 1 } else { 2 };
        wedge(&TangentVec::basis(3, i), &TangentVec::basis(3, j))
            .expect("same dimension")
            .mat()
            .scale(&mu[idx])
    })
}

/// Covariant derivative of a left-invariant pair table along the frame:
/// `(∇_{X_w} T)(X_i,X_j) = [D_w, T(i,j)] − T(D_w X_i, X_j) − T(X_i, D_w X_j)`,
/// where `D_w` acts on the values through `act`.
pub(crate) fn derive_pair_table<S: Scalar>(
    table: &PairTable<S>,
    frame_conn: &[Mat<S>],
    value_conn: &[Mat<S>],
) -> DerivTable<S> {
    let n = table.n();
    frame_conn
        .iter()
        .zip(value_conn)
        .map(|(dw, vw)| {
            PairTable::from_pairs(n, table.size(), |i, j| {
                let mut out = vw.commutator(table.get(i, j));
                for l in 0..n {
                    let a = dw.get(l, i);
                    if !a.is_zero() {
                        out = out.sub(&table.get(l, j).scale(a));
                    }
                    let b = dw.get(l, j);
                    if !b.is_zero() {
                        out = out.sub(&table.get(i, l).scale(b));
                    }
                }
                out
            })
        })
        .collect()
}

/// Second derivative of a left-invariant pair table: derivative of the first
/// derivative viewed as a tensor with an extra frame slot.
pub(crate) fn derive_deriv_table<S: Scalar>(
    first: &DerivTable<S>,
    frame_conn: &[Mat<S>],
    value_conn: &[Mat<S>],
) -> SecondDerivTable<S> {
    let n = first.len();
    frame_conn
        .iter()
        .zip(value_conn)
        .map(|(dv, vv)| {
            let inner = derive_pair_table_slotless(first, dv, vv);
            (0..n)
                .map(|w| {
                    let mut t = inner[w].clone();
                    for l in 0..n {
                        let a = dv.get(l, w);
                        if !a.is_zero() {
                            t = t.add(&first[l].map(|m| m.scale(a).neg()));
                        }
                    }
                    t
                })
                .collect()
        })
        .collect()
}

fn derive_pair_table_slotless<S: Scalar>(first: &DerivTable<S>, dv: &Mat<S>, vv: &Mat<S>) -> DerivTable<S> {
    first
        .iter()
        .map(|t| derive_pair_table(t, std::slice::from_ref(dv), std::slice::from_ref(vv)).remove(0))
        .collect()
}

/// `(R, ∇R, ∇²R)` tables of the Milnor metric in its frame.
pub fn curvature_tables<S: Scalar>(c: &MilnorConstants<S>) -> (PairTable<S>, DerivTable<S>, SecondDerivTable<S>) {
    let r = curvature_table(c);
    let conn: Vec<Mat<S>> = milnor_connection(c).iter().map(|s| s.mat().clone()).collect();
    let d1 = derive_pair_table(&r, &conn, &conn);
    let d2 = derive_deriv_table(&d1, &conn, &conn);
    (r, d1, d2)
}

/// Scalar curvature of `(T^(1)G, h)` at `(x, a)`, `|a| = 1`:
/// `τ = s^G + 2 − ¼ξ(a,a)` with `s^G = −2(μ12+μ13+μ23)` and `ξ` diagonal in
/// the Milnor frame.
pub fn unimodular_scalar<S: Scalar>(c: &MilnorConstants<S>, a: &FiberVec<S>, tol: f64) -> Result<S> {
    check_dim(3, a.dim())?;
    let norm_sq = a.coords.iter().fold(S::zero(), |acc, x| acc + sq(x));
    if !(norm_sq.clone() - S::one()).is_negligible(tol) {
        return Err(Error::OffSphere { norm_sq: norm_sq.to_string(), radius_sq: "1".into() });
    }
    let k = curvature_constants(c);
    let two = S::from_i64(2);
    let xi_diag = [
        two.clone() * (sq(&k.mu12) + sq(&k.mu13)),
        two.clone() * (sq(&k.mu12) + sq(&k.mu23)),
        two.clone() * (sq(&k.mu13) + sq(&k.mu23)),
    ];
    let xi = (0..3).fold(S::zero(), |acc, i| acc + xi_diag[i].clone() * sq(&a.coords[i]));
    let total = k.mu12 + k.mu13 + k.mu23;
    Ok(two.clone() - two * total - S::ratio(1, 4) * xi)
}

/// Values of one Milnor parameter on a grid.
#[derive(Clone, Debug, PartialEq)]
pub enum ParamRange {
    Values(Vec<Rational>),
    Stepped { start: Rational, end: Rational, step: Rational },
}

impl ParamRange {
    pub fn values(&self) -> Result<Vec<Rational>> {
        match self {
            ParamRange::Values(v) => Ok(v.clone()),
            ParamRange::Stepped { start, end, step } => {
                if *step <= Rational::from_i64(0) {
                    return Err(Error::NonPositive { what: "grid step" });
                }
                let mut out = Vec::new();
                let mut x = start.clone();
                while x <= *end {
                    out.push(x.clone());
                    x += step.clone();
                }
                Ok(out)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MilnorGrid {
    /// Cartesian product of three parameter ranges.
    Product { m: ParamRange, n: ParamRange, p: ParamRange },
    /// Explicit tuples, duplicates kept.
    Tuples(Vec<MilnorConstants<Rational>>),
}

impl MilnorGrid {
    pub fn tuples(&self) -> Result<Vec<MilnorConstants<Rational>>> {
        let out = match self {
            MilnorGrid::Tuples(t) => t.clone(),
            MilnorGrid::Product { m, n, p } => {
                let (ms, ns, ps) = (m.values()?, n.values()?, p.values()?);
                let mut out = Vec::with_capacity(ms.len() * ns.len() * ps.len());
                for a in &ms {
                    for b in &ns {
                        for c in &ps {
                            out.push(MilnorConstants::new(a.clone(), b.clone(), c.clone()));
                        }
                    }
                }
                out
            }
        };
        if out.is_empty() {
            return Err(Error::EmptyGrid);
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub params: MilnorConstants<Rational>,
    pub constants: CurvatureConstants<Rational>,
    pub positive: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanReport {
    pub rows: Vec<ScanRow>,
    pub positive_count: usize,
    /// Componentwise `[min, max]` of `(m, n, p)` over positive rows.
    pub positive_box: Option<[(Rational, Rational); 3]>,
}

/// Exact evaluation over every grid tuple; rows sorted by `(m, n, p)`.
pub fn scan_parameters(grid: &MilnorGrid) -> Result<ScanReport> {
    let mut tuples = grid.tuples()?;
    tuples.sort_by(|a, b| (&a.m, &a.n, &a.p).partial_cmp(&(&b.m, &b.n, &b.p)).expect("rationals are ordered"));
    let rows: Vec<ScanRow> = tuples
        .into_par_iter()
        .map(|params| {
            let constants = curvature_constants(&params);
            let positive = constants.lambda().iter().all(|l| *l < Rational::from_i64(0));
            ScanRow { params, constants, positive }
        })
        .collect();
    let positive: Vec<&ScanRow> = rows.iter().filter(|r| r.positive).collect();
    let positive_box = if positive.is_empty() {
        None
    } else {
        let bounds = |get: fn(&MilnorConstants<Rational>) -> &Rational| {
            let vals: Vec<&Rational> = positive.iter().map(|r| get(&r.params)).collect();
            let min = vals.iter().copied().min().expect("nonempty").clone();
            let max = vals.iter().copied().max().expect("nonempty").clone();
            (min, max)
        };
        Some([bounds(|c| &c.m), bounds(|c| &c.n), bounds(|c| &c.p)])
    };
    Ok(ScanReport { positive_count: positive.len(), rows, positive_box })
}

/// The five parameter tuples of the positive-scalar case list (the fourth
/// repeats the third).
pub fn case_list_tuples() -> Vec<MilnorConstants<Rational>> {
    use crate::scalar::rational as q;
    vec![
        MilnorConstants::new(q(1, 2), q(1, 3), q(1, 4)),
        MilnorConstants::new(q(1, 2), q(1, 3), q(-1, 4)),
        MilnorConstants::new(q(1, 2), q(1, 3), q(0, 1)),
        MilnorConstants::new(q(1, 2), q(1, 3), q(0, 1)),
        MilnorConstants::new(q(1, 2), q(-1, 3), q(0, 1)),
    ]
}

/// Printed `λ` triples for the five cases, as `(numerator, denominator)`.
pub fn case_list_printed_lambdas() -> [[(i64, i64); 3]; 5] {
    let third = [(-33547, 10368), (-33347, 10368), (-33847, 10368)];
    [
        [(-543127, 165888), (-545675, 165888), (-542035, 165888)],
        [(-505879, 165888), (-504059, 165888), (-522259, 165888)],
        third,
        third,
        third,
    ]
}
