//! Pointwise models of the base manifold: curvature `R^M` in a fixed
//! orthonormal frame, its contractions, and its covariant derivatives.
//!
//! Sign convention: `R(X,Y) = ∇_{[X,Y]} − [∇_X, ∇_Y]`, so a space form of
//! curvature `c` has `R(X,Y)Z = −c X∧Y(Z)` and sectional curvature
//! `K(X,Y) = ⟨R(X,Y)X, Y⟩` for orthonormal `X, Y`.

mod symmetric;

pub use symmetric::SymmetricSpaceData;

use crate::algebra::{wedge, Mat, Skew, TangentVec};
use crate::error::{check_dim, Error, Result};
use crate::scalar::Scalar;
use crate::tables::{zero_deriv, zero_second_deriv, DerivTable, PairTable, SecondDerivTable};
use crate::unimodular3::{self, MilnorConstants};

/// Pointwise data of a surface with `R(X,Y) = −C X∧Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct SurfaceData<S> {
    pub c: S,
    pub grad_c: TangentVec<S>,
    /// Covariant Hessian of `C` at the point; `None` means zero.
    pub hess_c: Option<Mat<S>>,
}

/// User-supplied curvature tables.
#[derive(Clone, Debug, PartialEq)]
pub struct GenericData<S> {
    pub riemann: PairTable<S>,
    /// `(∇_{X_w} R)(X_i, X_j)`, indexed by `w`.
    pub nabla: Option<DerivTable<S>>,
    /// `(∇²_{X_v,X_w} R)(X_i, X_j)`, indexed `[v][w]`.
    pub nabla2: Option<SecondDerivTable<S>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PointModel<S> {
    SpaceForm { dim: usize, c: S },
    Product(Vec<PointModel<S>>),
    SymmetricSpace(SymmetricSpaceData<S>),
    /// Complex projective space of complex dimension `n` (real dimension `2n`)
    /// with holomorphic sectional curvature 4.
    ComplexProjective { n: usize, j: Skew<S> },
    Surface2D(SurfaceData<S>),
    Unimodular3(MilnorConstants<S>),
    Generic(GenericData<S>),
}

/// Ricci form, scalar curvature and (when known exactly) the infimum of the
/// sectional curvature.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseContractions<S> {
    pub ricci: Mat<S>,
    pub scalar: S,
    pub k_lower_bound: Option<S>,
}

/// The standard complex structure `J e_{2a} = e_{2a+1}` on `R^{2n}`.
pub fn standard_complex_structure<S: Scalar>(n: usize) -> Skew<S> {
    let mut m = Mat::zeros(2 * n, 2 * n);
    for a in 0..n {
        m.set(2 * a + 1, 2 * a, S::one());
        m.set(2 * a, 2 * a + 1, -S::one());
    }
    Skew::from_mat_unchecked(m)
}

/// `R(X,Y)Z = ⟨X,Z⟩Y − ⟨Y,Z⟩X − 2⟨JY,X⟩JZ + ⟨JZ,Y⟩JX − ⟨JZ,X⟩JY`.
pub fn complex_projective_riemann<S: Scalar>(
    j: &Skew<S>,
    x: &TangentVec<S>,
    y: &TangentVec<S>,
    z: &TangentVec<S>,
) -> TangentVec<S> {
    let (jx, jy, jz) = (j.apply(x), j.apply(y), j.apply(z));
    let two = S::from_i64(2);
    y.scale(&x.dot(z))
        .sub(&x.scale(&y.dot(z)))
        .sub(&jz.scale(&(two * jy.dot(x))))
        .add(&jx.scale(&jz.dot(y)))
        .sub(&jy.scale(&jz.dot(x)))
}

impl<S: Scalar> PointModel<S> {
    pub fn dim(&self) -> usize {
        match self {
            PointModel::SpaceForm { dim, .. } => *dim,
            PointModel::Product(factors) => factors.iter().map(|f| f.dim()).sum(),
            PointModel::SymmetricSpace(d) => d.dim_p,
            PointModel::ComplexProjective { n, .. } => 2 * n,
            PointModel::Surface2D(_) => 2,
            PointModel::Unimodular3(_) => 3,
            PointModel::Generic(g) => g.riemann.n(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            PointModel::SpaceForm { .. } => "space-form",
            PointModel::Product(_) => "product",
            PointModel::SymmetricSpace(_) => "symmetric-space",
            PointModel::ComplexProjective { .. } => "complex-projective",
            PointModel::Surface2D(_) => "surface",
            PointModel::Unimodular3(_) => "unimodular3",
            PointModel::Generic(_) => "generic",
        }
    }

    /// Flat space of dimension `dim`.
    pub fn flat(dim: usize) -> Self {
        PointModel::SpaceForm { dim, c: S::zero() }
    }

    /// Checks the structural invariants of the model.
    pub fn validate(&self, tol: f64) -> Result<()> {
        match self {
            PointModel::SpaceForm { dim, .. } => {
                if *dim == 0 {
                    return Err(Error::InvalidModel("space form of dimension 0".into()));
                }
                Ok(())
            }
            PointModel::Product(factors) => {
                if factors.is_empty() {
                    return Err(Error::InvalidModel("product without factors".into()));
                }
                factors.iter().try_for_each(|f| f.validate(tol))
            }
            PointModel::SymmetricSpace(d) => d.validate(tol),
            PointModel::ComplexProjective { n, j } => {
                if *n == 0 {
                    return Err(Error::InvalidModel("complex dimension 0".into()));
                }
                check_dim(2 * n, j.dim())?;
                if let Some((r, c)) = j.mat().skew_adjoint_violation(&vec![S::one(); 2 * n], tol) {
                    return Err(Error::NotSkew { row: r, col: c });
                }
                let sq = j.mat().mul(j.mat());
                if !sq.approx_eq(&Mat::identity(2 * n).neg(), tol) {
                    return Err(Error::InvalidModel("J∘J ≠ −Id".into()));
                }
                Ok(())
            }
            PointModel::Surface2D(s) => {
                check_dim(2, s.grad_c.dim())?;
                if let Some(h) = &s.hess_c {
                    check_dim(2, h.rows())?;
                    check_dim(2, h.cols())?;
                    if !h.approx_eq(&h.transpose(), tol) {
                        return Err(Error::InvalidModel("Hessian of C is not symmetric".into()));
                    }
                }
                Ok(())
            }
            PointModel::Unimodular3(_) => Ok(()),
            PointModel::Generic(g) => validate_curvature_table(&g.riemann, tol),
        }
    }

    /// `R(X_i, X_j)` for all frame pairs.
    pub fn curvature_table(&self) -> Result<PairTable<S>> {
        let n = self.dim();
        let e = |i| TangentVec::<S>::basis(n, i);
        Ok(match self {
            PointModel::SpaceForm { c, .. } => {
                PairTable::try_from_pairs(n, n, |i, j| Ok(wedge(&e(i), &e(j))?.mat().scale(&-c.clone())))?
            }
            PointModel::Product(factors) => {
                let mut table = PairTable::zeros(n, n);
                let mut offset = 0;
                for f in factors {
                    let ft = f.curvature_table()?;
                    table = table.add(&ft.embed(n, n, offset, offset));
                    offset += f.dim();
                }
                table
            }
            PointModel::SymmetricSpace(d) => d.curvature_table(),
            PointModel::ComplexProjective { j, .. } => PairTable::from_pairs(n, n, |a, b| {
                let cols: Vec<Vec<S>> =
                    (0..n).map(|l| complex_projective_riemann(j, &e(a), &e(b), &e(l)).coords).collect();
                Mat::from_columns(&cols)
            }),
            PointModel::Surface2D(s) => {
                PairTable::try_from_pairs(2, 2, |i, j| Ok(wedge(&e(i), &e(j))?.mat().scale(&-s.c.clone())))?
            }
            PointModel::Unimodular3(c) => unimodular3::curvature_table(c),
            PointModel::Generic(g) => g.riemann.clone(),
        })
    }

    /// `(∇_{X_w} R)(X_i, X_j)`.
    pub fn nabla_table(&self) -> Result<DerivTable<S>> {
        let n = self.dim();
        match self {
            PointModel::SpaceForm { .. }
            | PointModel::SymmetricSpace(_)
            | PointModel::ComplexProjective { .. } => Ok(zero_deriv(n, n)),
            PointModel::Product(factors) => {
                let mut out = zero_deriv(n, n);
                let mut offset = 0;
                for f in factors {
                    for (w, t) in f.nabla_table()?.into_iter().enumerate() {
                        out[offset + w] = t.embed(n, n, offset, offset);
                    }
                    offset += f.dim();
                }
                Ok(out)
            }
            PointModel::Surface2D(s) => {
                let area = wedge(&TangentVec::basis(2, 0), &TangentVec::basis(2, 1))?.into_mat();
                Ok((0..2)
                    .map(|w| PairTable::from_pairs(2, 2, |_, _| area.scale(&-s.grad_c.coords[w].clone())))
                    .collect())
            }
            PointModel::Unimodular3(c) => Ok(unimodular3::curvature_tables(c).1),
            PointModel::Generic(g) => g.nabla.clone().ok_or_else(|| {
                Error::MissingDerivativeData("generic base without a ∇R table".into())
            }),
        }
    }

    /// `(∇²_{X_v,X_w} R)(X_i, X_j)`.
    pub fn nabla2_table(&self) -> Result<SecondDerivTable<S>> {
        let n = self.dim();
        match self {
            PointModel::SpaceForm { .. }
            | PointModel::SymmetricSpace(_)
            | PointModel::ComplexProjective { .. } => Ok(zero_second_deriv(n, n)),
            PointModel::Product(factors) => {
                let mut out = zero_second_deriv(n, n);
                let mut offset = 0;
                for f in factors {
                    for (v, row) in f.nabla2_table()?.into_iter().enumerate() {
                        for (w, t) in row.into_iter().enumerate() {
                            out[offset + v][offset + w] = t.embed(n, n, offset, offset);
                        }
                    }
                    offset += f.dim();
                }
                Ok(out)
            }
            PointModel::Surface2D(s) => {
                let area = wedge(&TangentVec::basis(2, 0), &TangentVec::basis(2, 1))?.into_mat();
                let hess = s.hess_c.clone().unwrap_or_else(|| Mat::zeros(2, 2));
                Ok((0..2)
                    .map(|v| {
                        (0..2)
                            .map(|w| PairTable::from_pairs(2, 2, |_, _| area.scale(&-hess.get(v, w).clone())))
                            .collect()
                    })
                    .collect())
            }
            PointModel::Unimodular3(c) => Ok(unimodular3::curvature_tables(c).2),
            PointModel::Generic(g) => g.nabla2.clone().ok_or_else(|| {
                Error::MissingDerivativeData("generic base without a ∇²R table".into())
            }),
        }
    }

    /// `R^M(X,Y)Z` in frame coordinates.
    pub fn riemann(&self, x: &TangentVec<S>, y: &TangentVec<S>, z: &TangentVec<S>) -> Result<TangentVec<S>> {
        let n = self.dim();
        check_dim(n, z.dim())?;
        if let PointModel::ComplexProjective { j, .. } = self {
            check_dim(n, x.dim())?;
            check_dim(n, y.dim())?;
            return Ok(complex_projective_riemann(j, x, y, z));
        }
        let r = self.curvature_table()?.eval_vec(x, y)?;
        Ok(TangentVec::new(r.apply(&z.coords)))
    }

    /// Sectional curvature `⟨R(X,Y)X,Y⟩ / (|X|²|Y|² − ⟨X,Y⟩²)`.
    pub fn sectional(&self, x: &TangentVec<S>, y: &TangentVec<S>) -> Result<S> {
        let num = self.riemann(x, y, x)?.dot(y);
        let den = x.norm_sq() * y.norm_sq() - x.dot(y) * x.dot(y);
        if den.is_zero() {
            return Err(Error::DegeneratePlane);
        }
        Ok(num / den)
    }

    pub fn base_contractions(&self) -> Result<BaseContractions<S>> {
        let table = self.curvature_table()?;
        let ricci = ricci_from_table(&table);
        let scalar = ricci.trace();
        Ok(BaseContractions { ricci, scalar, k_lower_bound: self.k_lower_bound() })
    }

    /// Exact infimum of the sectional curvature where it is known in closed form.
    pub fn k_lower_bound(&self) -> Option<S> {
        match self {
            PointModel::SpaceForm { dim, c } => (*dim >= 2).then(|| c.clone()),
            PointModel::Surface2D(s) => Some(s.c.clone()),
            PointModel::ComplexProjective { n, .. } => Some(S::from_i64(if *n == 1 { 4 } else { 1 })),
            PointModel::Product(factors) => {
                let positive: Vec<&PointModel<S>> = factors.iter().filter(|f| f.dim() > 0).collect();
                if positive.len() == 1 {
                    return positive[0].k_lower_bound();
                }
                let mut lowest = S::zero();
                for f in positive {
                    if f.dim() >= 2 {
                        let b = f.k_lower_bound()?;
                        if b < lowest {
                            lowest = b;
                        }
                    }
                }
                Some(lowest)
            }
            _ => None,
        }
    }

    /// True when `∇R^M` vanishes at the point.
    pub fn nabla_vanishes(&self) -> Result<bool> {
        Ok(self.nabla_table()?.iter().all(|t| t.is_zero()))
    }
}

/// `ric(X_a, X_b) = Σ_i ⟨R(X_a, X_i) X_b, X_i⟩`.
pub fn ricci_from_table<S: Scalar>(table: &PairTable<S>) -> Mat<S> {
    let n = table.n();
    Mat::from_fn(n, n, |a, b| {
        (0..n).fold(S::zero(), |acc, i| acc + table.get(a, i).get(i, b).clone())
    })
}

/// Skew-adjointness and the first Bianchi identity for a curvature table.
pub fn validate_curvature_table<S: Scalar>(table: &PairTable<S>, tol: f64) -> Result<()> {
    if let Some(w) = skew_adjoint_witness(table, tol) {
        return Err(Error::InvalidModel(format!(
            "R(X{},X{}) is not skew-adjoint at entry ({},{})",
            w.0, w.1, w.2, w.3
        )));
    }
    let n = table.n();
    for i in 0..n {
        for j in 0..n {
            for l in 0..n {
                for out in 0..n {
                    let s = table.get(i, j).get(out, l).clone()
                        + table.get(j, l).get(out, i).clone()
                        + table.get(l, i).get(out, j).clone();
                    if !s.is_negligible(tol) {
                        return Err(Error::InvalidModel(format!(
                            "first Bianchi identity fails for (X{i},X{j},X{l})"
                        )));
                    }
                }
            }
        }
    }
    Ok(())
}

/// First `(i, j, row, col)` where `R(X_i,X_j)` fails to be skew-adjoint.
pub fn skew_adjoint_witness<S: Scalar>(table: &PairTable<S>, tol: f64) -> Option<(usize, usize, usize, usize)> {
    let n = table.n();
    let ones = vec![S::one(); table.size()];
    for i in 0..n {
        for j in i + 1..n {
            if let Some((r, c)) = table.get(i, j).skew_adjoint_violation(&ones, tol) {
                return Some((i, j, r, c));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rational, Rational};

    fn e(n: usize, i: usize) -> TangentVec<f64> {
        TangentVec::basis(n, i)
    }

    #[test]
    fn space_form_sign_convention() {
        let m = PointModel::SpaceForm { dim: 2, c: 1.0 };
        let r = m.riemann(&e(2, 0), &e(2, 1), &e(2, 1)).unwrap();
        assert_eq!(r, e(2, 0).scale(&-1.0));
        assert_eq!(m.sectional(&e(2, 0), &e(2, 1)).unwrap(), 1.0);
        assert!(m.riemann(&e(2, 0), &e(2, 0), &e(2, 1)).unwrap().is_zero());
    }

    #[test]
    fn space_form_contractions() {
        let m = PointModel::SpaceForm { dim: 2, c: rational(1, 1) };
        assert_eq!(m.base_contractions().unwrap().scalar, rational(2, 1));
        let c = rational(-5, 3);
        let m3 = PointModel::SpaceForm { dim: 3, c: c.clone() };
        let bc = m3.base_contractions().unwrap();
        assert_eq!(bc.scalar, rational(6, 1) * c.clone());
        assert_eq!(bc.ricci, Mat::identity(3).scale(&(rational(2, 1) * c.clone())));
        assert_eq!(bc.k_lower_bound, Some(c));
        let flat = PointModel::<Rational>::Unimodular3(MilnorConstants::new(
            rational(0, 1),
            rational(0, 1),
            rational(0, 1),
        ));
        assert_eq!(flat.base_contractions().unwrap().scalar, rational(0, 1));
    }

    #[test]
    fn unimodular_curvature_matches_mu() {
        let c = MilnorConstants::new(rational(1, 2), rational(1, 3), rational(1, 4));
        let m = PointModel::Unimodular3(c.clone());
        let mu = unimodular3::mu_closed_form(&c);
        let b = |i| TangentVec::<Rational>::basis(3, i);
        assert_eq!(m.riemann(&b(0), &b(1), &b(1)).unwrap(), b(0).scale(&mu[0]));
        assert_eq!(m.riemann(&b(0), &b(2), &b(2)).unwrap(), b(0).scale(&mu[1]));
        assert_eq!(m.riemann(&b(1), &b(2), &b(2)).unwrap(), b(1).scale(&mu[2]));
        let s = m.base_contractions().unwrap().scalar;
        assert_eq!(s, rational(-2, 1) * (mu[0].clone() + mu[1].clone() + mu[2].clone()));
    }

    #[test]
    fn product_is_block_diagonal() {
        let m = PointModel::Product(vec![
            PointModel::SpaceForm { dim: 2, c: 1.0 },
            PointModel::SpaceForm { dim: 2, c: -2.0 },
        ]);
        assert_eq!(m.sectional(&e(4, 0), &e(4, 1)).unwrap(), 1.0);
        assert_eq!(m.sectional(&e(4, 2), &e(4, 3)).unwrap(), -2.0);
        assert_eq!(m.sectional(&e(4, 0), &e(4, 2)).unwrap(), 0.0);
        assert!(m.riemann(&e(4, 0), &e(4, 2), &e(4, 0)).unwrap().is_zero());
        assert_eq!(m.k_lower_bound(), Some(-2.0));
    }

    #[test]
    fn sphere_symmetric_space_matches_space_form() {
        for (n, c) in [(2, rational(1, 1)), (3, rational(2, 3)), (4, rational(5, 1))] {
            let sym = PointModel::SymmetricSpace(SymmetricSpaceData::space_form(n, c.clone()));
            let sf = PointModel::SpaceForm { dim: n, c };
            assert_eq!(sym.curvature_table().unwrap(), sf.curvature_table().unwrap());
        }
    }

    #[test]
    fn complex_projective_curvatures() {
        let j = standard_complex_structure::<f64>(2);
        let m = PointModel::ComplexProjective { n: 2, j: j.clone() };
        m.validate(1e-12).unwrap();
        let x = e(4, 0);
        assert!((m.sectional(&x, &j.apply(&x)).unwrap() - 4.0).abs() < 1e-14);
        assert!((m.sectional(&e(4, 0), &e(4, 2)).unwrap() - 1.0).abs() < 1e-14);
        validate_curvature_table(&m.curvature_table().unwrap(), 1e-12).unwrap();
        let bc = m.base_contractions().unwrap();
        // Fubini–Study with holomorphic curvature 4: ric = 2(n+1) g.
        assert!(bc.ricci.approx_eq(&Mat::identity(4).scale(&6.0), 1e-12));
    }

    #[test]
    fn surface_derivative_tables() {
        let s = PointModel::Surface2D(SurfaceData {
            c: 0.5,
            grad_c: TangentVec::new(vec![1.0, 0.0]),
            hess_c: None,
        });
        let d1 = s.nabla_table().unwrap();
        assert_eq!(*d1[0].get(0, 1).get(0, 1), -1.0);
        assert!(d1[1].is_zero());
        assert!(s.nabla2_table().unwrap().iter().flatten().all(|t| t.is_zero()));
    }

    #[test]
    fn generic_validation_and_missing_derivatives() {
        let table = PointModel::SpaceForm { dim: 3, c: 1.0 }.curvature_table().unwrap();
        let g = PointModel::Generic(GenericData { riemann: table.clone(), nabla: None, nabla2: None });
        g.validate(1e-12).unwrap();
        assert!(matches!(g.nabla_table(), Err(Error::MissingDerivativeData(_))));
        let mut broken = table;
        let mut m = broken.get(0, 1).clone();
        m.set(0, 1, m.get(0, 1) + 0.5);
        broken.set(0, 1, m);
        assert!(skew_adjoint_witness(&broken, 1e-12).is_some());
        let g = PointModel::Generic(GenericData { riemann: broken, nabla: None, nabla2: None });
        assert!(g.validate(1e-12).is_err());
    }
}
