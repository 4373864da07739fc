//! Curvature of the sphere bundle `E^(r) = {a ∈ E : ⟨a,a⟩ = r²}` with the
//! Sasaki metric `h`, evaluated at a single point `(x, a)`.
//!
//! Horizontal vectors are written in the base's canonical orthonormal frame,
//! vertical vectors in the bundle's fiber coordinates. A tangent vector of
//! `E^(r)` is a pair `(X, α)` with `⟨α, a⟩ = 0`.

mod bounds;
mod plane;
mod sampling;
mod verdicts;

pub use bounds::{
    bound_holds, positivity_bounds, positivity_bounds_for, BoundConstants, BoundKind, BoundRange, PositivityReport,
};
pub use plane::{normalize_plane, sectional_higher_rank, sectional_rank_two, PlaneSpec};
pub use sampling::{random_fiber_point, random_plane, sample_sectional, seeded_rng, SectionalSummary};
pub use verdicts::{
    constant_scalar_check, einstein_check, einstein_check_frame, xi_matrix, ConstantScalarVerdict, EinsteinRoute,
    EinsteinVerdict, EinsteinWitness, XiWitness,
};

use crate::algebra::{dot, FiberMetric, FiberVec, Mat, TangentVec};
use crate::atiyah::{supra_derivatives, supra_table, AtiyahSpec};
use crate::base_geometry::{ricci_from_table, validate_curvature_table, PointModel};
use crate::error::{check_dim, Error, Result};
use crate::scalar::{sum, Scalar};
use crate::tables::{DerivTable, PairTable};

/// A bundle given directly by its curvature data at the point.
#[derive(Clone, Debug, PartialEq)]
pub struct GenericBundle<S> {
    /// Diagonal fiber metric.
    pub weights: Vec<S>,
    /// `R^E(X_i, X_j)` on fiber coordinates.
    pub curvature: PairTable<S>,
    /// `(∇^{M,E}_{X_w} R^E)(X_i, X_j)`, indexed by `w`.
    pub derivative: Option<DerivTable<S>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BundleKind<S> {
    /// `TM ⊕ so(TM)` with parameter `k`.
    Atiyah { k: S },
    /// `TM` with the Levi-Civita connection.
    Tangent,
    Generic(GenericBundle<S>),
}

impl<S> BundleKind<S> {
    pub fn name(&self) -> &'static str {
        match self {
            BundleKind::Atiyah { .. } => "atiyah",
            BundleKind::Tangent => "tangent",
            BundleKind::Generic(_) => "generic",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SphereBundleModel<S> {
    pub base: PointModel<S>,
    pub bundle: BundleKind<S>,
    pub r: S,
    pub a: FiberVec<S>,
    pub tol: f64,
}

/// A tangent vector `X^h + α^t` of `E^(r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentDir<S> {
    pub x: TangentVec<S>,
    pub alpha: FiberVec<S>,
}

impl<S: Scalar> TangentDir<S> {
    pub fn new(x: TangentVec<S>, alpha: FiberVec<S>) -> Self {
        TangentDir { x, alpha }
    }

    pub fn horizontal(x: TangentVec<S>, m: usize) -> Self {
        TangentDir { x, alpha: FiberVec::zeros(m) }
    }

    pub fn vertical(n: usize, alpha: FiberVec<S>) -> Self {
        TangentDir { x: TangentVec::zeros(n), alpha }
    }

    pub fn add(&self, other: &Self) -> Self {
        TangentDir { x: self.x.add(&other.x), alpha: self.alpha.add(&other.alpha) }
    }

    pub fn scale(&self, s: &S) -> Self {
        TangentDir { x: self.x.scale(s), alpha: self.alpha.scale(s) }
    }
}

impl<S: Scalar> SphereBundleModel<S> {
    pub fn new(base: PointModel<S>, bundle: BundleKind<S>, r: S, a: FiberVec<S>, tol: f64) -> Result<Self> {
        let model = SphereBundleModel { base, bundle, r, a, tol };
        model.validate()?;
        Ok(model)
    }

    /// Atiyah model with `a` chosen as `r` times the first unit frame vector.
    pub fn atiyah_at_first_axis(base: PointModel<S>, k: S, r: S, tol: f64) -> Result<Self> {
        let m = AtiyahSpec::new(base.clone(), k.clone())?.rank();
        let a = FiberVec::basis(m, 0).scale(&r);
        Self::new(base, BundleKind::Atiyah { k }, r, a, tol)
    }

    pub fn tangent_at_first_axis(base: PointModel<S>, r: S, tol: f64) -> Result<Self> {
        let a = FiberVec::basis(base.dim(), 0).scale(&r);
        Self::new(base, BundleKind::Tangent, r, a, tol)
    }

    pub fn rank(&self) -> usize {
        match &self.bundle {
            BundleKind::Atiyah { .. } => crate::algebra::atiyah_rank(self.base.dim()),
            BundleKind::Tangent => self.base.dim(),
            BundleKind::Generic(g) => g.weights.len(),
        }
    }

    pub fn metric(&self) -> FiberMetric<S> {
        match &self.bundle {
            BundleKind::Atiyah { k } => FiberMetric::atiyah(self.base.dim(), k),
            BundleKind::Tangent => FiberMetric::euclidean(self.base.dim()),
            BundleKind::Generic(g) => FiberMetric { weights: g.weights.clone() },
        }
    }

    pub fn atiyah_spec(&self) -> Option<AtiyahSpec<S>> {
        match &self.bundle {
            BundleKind::Atiyah { k } => Some(AtiyahSpec { base: self.base.clone(), k: k.clone() }),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.r <= S::zero() {
            return Err(Error::NonPositive { what: "r" });
        }
        let m = self.rank();
        if m < 2 {
            return Err(Error::InvalidModel(format!("bundle rank must be at least 2, got {m}")));
        }
        check_dim(m, self.a.dim())?;
        match &self.bundle {
            BundleKind::Atiyah { k } if *k <= S::zero() => return Err(Error::NonPositive { what: "k" }),
            BundleKind::Generic(g) => {
                if g.weights.iter().any(|w| *w <= S::zero()) {
                    return Err(Error::NonPositive { what: "fiber metric weight" });
                }
                check_dim(self.base.dim(), g.curvature.n())?;
                check_dim(m, g.curvature.size())?;
                if let Some(d) = &g.derivative {
                    check_dim(self.base.dim(), d.len())?;
                    for t in d {
                        check_dim(self.base.dim(), t.n())?;
                        check_dim(m, t.size())?;
                    }
                }
                for i in 0..g.curvature.n() {
                    for j in 0..g.curvature.n() {
                        if let Some((row, col)) = g.curvature.get(i, j).skew_adjoint_violation(&g.weights, self.tol) {
                            return Err(Error::InvalidModel(format!(
                                "bundle curvature R({i},{j}) is not skew-adjoint at ({row},{col})"
                            )));
                        }
                    }
                }
            }
            _ => {}
        }
        let norm_sq = self.metric().norm_sq(&self.a);
        let radius_sq = self.r.clone() * self.r.clone();
        let tol = self.tol * radius_sq.to_f64().max(1.0);
        if !norm_sq.approx_eq(&radius_sq, tol) {
            return Err(Error::OffSphere { norm_sq: norm_sq.to_string(), radius_sq: radius_sq.to_string() });
        }
        Ok(())
    }

    /// Curvature data at the point, computed once.
    pub fn point(&self) -> Result<BundlePoint<S>> {
        self.validate()?;
        let base_curvature = self.base.curvature_table()?;
        validate_curvature_table(&base_curvature, self.tol)?;
        let base_ricci = ricci_from_table(&base_curvature);
        let base_scalar = base_ricci.trace();
        let (curvature, derivative) = match &self.bundle {
            BundleKind::Atiyah { k } => {
                let spec = AtiyahSpec::new(self.base.clone(), k.clone())?;
                let derivative = match supra_derivatives(&spec) {
                    Ok(d) => Some(d.full),
                    Err(Error::MissingDerivativeData(_)) => None,
                    Err(e) => return Err(e),
                };
                (supra_table(&spec)?, derivative)
            }
            BundleKind::Tangent => {
                let derivative = match self.base.nabla_table() {
                    Ok(d) => Some(d),
                    Err(Error::MissingDerivativeData(_)) => None,
                    Err(e) => return Err(e),
                };
                (base_curvature.clone(), derivative)
            }
            BundleKind::Generic(g) => (g.curvature.clone(), g.derivative.clone()),
        };
        Ok(BundlePoint {
            n: self.base.dim(),
            m: self.rank(),
            base_curvature,
            base_ricci,
            base_scalar,
            curvature,
            derivative,
            metric: self.metric(),
            radius_sq: self.r.clone() * self.r.clone(),
            a: self.a.clone(),
            tol: self.tol,
        })
    }
}

/// Everything the curvature formulas need at `(x, a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BundlePoint<S> {
    pub n: usize,
    pub m: usize,
    pub base_curvature: PairTable<S>,
    pub base_ricci: Mat<S>,
    pub base_scalar: S,
    /// `R^E(X_i, X_j)`.
    pub curvature: PairTable<S>,
    /// `∇^{M,E}_{X_w} R^E`, when derivative data is available.
    pub derivative: Option<DerivTable<S>>,
    pub metric: FiberMetric<S>,
    pub radius_sq: S,
    pub a: FiberVec<S>,
    pub tol: f64,
}

impl<S: Scalar> BundlePoint<S> {
    /// Same tables at another point `a` of the same fiber sphere.
    pub fn at_fiber(&self, a: FiberVec<S>) -> Result<Self> {
        check_dim(self.m, a.dim())?;
        let norm_sq = self.metric.norm_sq(&a);
        if !norm_sq.approx_eq(&self.radius_sq, self.tol * self.radius_sq.to_f64().max(1.0)) {
            return Err(Error::OffSphere { norm_sq: norm_sq.to_string(), radius_sq: self.radius_sq.to_string() });
        }
        Ok(BundlePoint { a, ..self.clone() })
    }

    pub fn fiber_inner(&self, a: &FiberVec<S>, b: &FiberVec<S>) -> S {
        self.metric.inner(a, b)
    }

    /// `h((X,α),(Y,β)) = ⟨X,Y⟩ + ⟨α,β⟩_E`.
    pub fn h(&self, u: &TangentDir<S>, v: &TangentDir<S>) -> S {
        u.x.dot(&v.x) + self.fiber_inner(&u.alpha, &v.alpha)
    }

    /// `ᾱ = α − (⟨α,a⟩/r²) a`.
    pub fn tangential(&self, alpha: &FiberVec<S>) -> FiberVec<S> {
        let coef = self.fiber_inner(alpha, &self.a) / self.radius_sq.clone();
        if coef.is_zero() {
            alpha.clone()
        } else {
            alpha.sub(&self.a.scale(&coef))
        }
    }

    pub fn is_tangent(&self, u: &TangentDir<S>) -> bool {
        let scale = self.metric.norm_sq(&u.alpha).to_f64().sqrt() * self.radius_sq.to_f64().sqrt();
        self.fiber_inner(&u.alpha, &self.a).is_negligible(self.tol * scale.max(1.0))
    }

    pub(crate) fn check_tangent(&self, u: &TangentDir<S>, index: usize) -> Result<()> {
        check_dim(self.n, u.x.dim())?;
        check_dim(self.m, u.alpha.dim())?;
        if self.is_tangent(u) {
            Ok(())
        } else {
            Err(Error::NotTangent { index })
        }
    }

    /// `R^E(X, Y)` as a matrix on fiber coordinates.
    pub fn curvature_matrix(&self, x: &TangentVec<S>, y: &TangentVec<S>) -> Mat<S> {
        self.curvature.eval(&x.coords, &y.coords)
    }

    /// `R^E(X, X_i)` for the frame vector `X_i`.
    fn curvature_with_frame(&self, x: &TangentVec<S>, i: usize) -> Mat<S> {
        let mut acc = Mat::zeros(self.m, self.m);
        for (l, xl) in x.coords.iter().enumerate() {
            if !xl.is_zero() {
                acc = acc.add(&self.curvature.get(l, i).scale(xl));
            }
        }
        acc
    }

    fn apply(&self, mat: &Mat<S>, v: &FiberVec<S>) -> FiberVec<S> {
        FiberVec::new(mat.apply(&v.coords))
    }

    /// `(∇^{M,E}_W R^E)(X, Y)ξ`.
    pub fn nabla_curvature(
        &self,
        w: &TangentVec<S>,
        x: &TangentVec<S>,
        y: &TangentVec<S>,
        xi: &FiberVec<S>,
    ) -> Result<FiberVec<S>> {
        let table = self.derivative_table()?;
        let mut acc = FiberVec::zeros(self.m);
        for (l, wl) in w.coords.iter().enumerate() {
            if !wl.is_zero() {
                let v = self.apply(&table[l].eval(&x.coords, &y.coords), xi);
                acc = acc.add(&v.scale(wl));
            }
        }
        Ok(acc)
    }

    fn derivative_table(&self) -> Result<&DerivTable<S>> {
        self.derivative
            .as_ref()
            .ok_or_else(|| Error::MissingDerivativeData("derivative of the bundle curvature".into()))
    }

    /// `B_{X^h} Y^h = ½ (R^E(X,Y)a)^t`.
    pub fn oneill_b(&self, x: &TangentVec<S>, y: &TangentVec<S>) -> Result<FiberVec<S>> {
        check_dim(self.n, x.dim())?;
        check_dim(self.n, y.dim())?;
        let ra = self.apply(&self.curvature_matrix(x, y), &self.a);
        Ok(self.tangential(&ra).scale(&S::half()))
    }

    /// `B_{X^h} α^t = ½ Σ_i ⟨R^E(X,X_i)α, a⟩ X_i^h`.
    pub fn oneill_b_mixed(&self, x: &TangentVec<S>, alpha: &FiberVec<S>) -> Result<TangentVec<S>> {
        check_dim(self.n, x.dim())?;
        self.check_tangent(&TangentDir::vertical(self.n, alpha.clone()), 0)?;
        let coords = (0..self.n)
            .map(|i| S::half() * self.pairing(&self.curvature_with_frame(x, i), alpha))
            .collect();
        Ok(TangentVec::new(coords))
    }

    /// `⟨R α, a⟩`.
    fn pairing(&self, mat: &Mat<S>, alpha: &FiberVec<S>) -> S {
        self.fiber_inner(&self.apply(mat, alpha), &self.a)
    }

    /// `ξ(b, c) = Σ_{i,j} ⟨R^E(X_i,X_j)b, R^E(X_i,X_j)c⟩` over ordered pairs.
    pub fn xi_form(&self, b: &FiberVec<S>, c: &FiberVec<S>) -> Result<S> {
        check_dim(self.m, b.dim())?;
        check_dim(self.m, c.dim())?;
        let mut acc = S::zero();
        for i in 0..self.n {
            for j in i + 1..self.n {
                let mat = self.curvature.get(i, j);
                let rb = self.apply(mat, b);
                let rc = self.apply(mat, c);
                acc = acc + self.fiber_inner(&rb, &rc);
            }
        }
        Ok(S::from_i64(2) * acc)
    }

    /// `τ = s^M + (m−1)(m−2)/r² − ¼ ξ(a, a)`.
    pub fn scalar(&self) -> S {
        let m = S::from_i64(self.m as i64);
        let fiber = (m.clone() - S::one()) * (m - S::from_i64(2)) / self.radius_sq.clone();
        let xi = self.xi_form(&self.a, &self.a).expect("dimensions checked at construction");
        self.base_scalar.clone() + fiber - S::ratio(1, 4) * xi
    }

    /// Ricci curvature `ric(u, v)` of `h`.
    pub fn ricci(&self, u: &TangentDir<S>, v: &TangentDir<S>) -> Result<S> {
        self.check_tangent(u, 0)?;
        self.check_tangent(v, 1)?;
        let (x, y) = (&u.x, &v.x);
        let alpha = self.tangential(&u.alpha);
        let beta = self.tangential(&v.alpha);
        let n = self.n;

        let vertical = S::from_i64(self.m as i64 - 2) / self.radius_sq.clone() * self.fiber_inner(&alpha, &beta);
        let base = dot(&x.coords, &self.base_ricci.apply(&y.coords));

        let mut horizontal = S::zero();
        let mut mixed = S::zero();
        for i in 0..n {
            let rx = self.curvature_with_frame(x, i);
            let ry = self.curvature_with_frame(y, i);
            horizontal = horizontal + self.fiber_inner(&self.apply(&rx, &self.a), &self.apply(&ry, &self.a));
            if !beta.is_zero() || !alpha.is_zero() {
                let e = TangentVec::basis(n, i);
                let mut d = FiberVec::zeros(self.m);
                if !beta.is_zero() && !x.is_zero() {
                    d = d.add(&self.nabla_curvature(&e, &e, x, &beta)?);
                }
                if !alpha.is_zero() && !y.is_zero() {
                    d = d.add(&self.nabla_curvature(&e, &e, y, &alpha)?);
                }
                mixed = mixed + self.fiber_inner(&d, &self.a);
            }
        }

        let mut quartic = S::zero();
        if !alpha.is_zero() && !beta.is_zero() {
            for i in 0..n {
                for j in i + 1..n {
                    let ra = self.apply(self.curvature.get(i, j), &self.a);
                    quartic = quartic + self.fiber_inner(&ra, &alpha) * self.fiber_inner(&ra, &beta);
                }
            }
            quartic = S::from_i64(2) * quartic;
        }

        Ok(vertical + base - S::half() * horizontal - S::half() * mixed + S::ratio(1, 4) * quartic)
    }

    /// Orthogonal frame of `T_{(x,a)} E^(r)`: the `n` horizontal frame vectors
    /// followed by `m − 1` mutually orthogonal vectors of `a^⊥`. Vectors are
    /// unit length in float mode; in exact mode only orthogonal.
    pub fn tangent_frame(&self) -> Vec<TangentDir<S>> {
        let mut frame: Vec<TangentDir<S>> =
            (0..self.n).map(|i| TangentDir::horizontal(TangentVec::basis(self.n, i), self.m)).collect();
        let mut kept: Vec<(FiberVec<S>, S)> = vec![(self.a.clone(), self.radius_sq.clone())];
        for u in 0..self.m {
            if kept.len() == self.m {
                break;
            }
            let mut w = FiberVec::basis(self.m, u);
            for (v, nv) in &kept {
                let coef = self.fiber_inner(&w, v) / nv.clone();
                w = w.sub(&v.scale(&coef));
            }
            let nw = self.metric.norm_sq(&w);
            let negligible = if S::EXACT { nw.is_zero() } else { nw.to_f64() <= 1e-12 * self.metric.weights[u].to_f64() };
            if !negligible {
                match nw.try_sqrt().filter(|_| !S::EXACT) {
                    Some(norm) => {
                        let unit = w.scale(&(S::one() / norm));
                        let nu = self.metric.norm_sq(&unit);
                        kept.push((unit, nu));
                    }
                    None => kept.push((w, nw)),
                }
            }
        }
        frame.extend(kept.into_iter().skip(1).map(|(v, _)| TangentDir::vertical(self.n, v)));
        frame
    }

    /// `(ric(e_u, e_v), h(e_u, e_v))` on [`Self::tangent_frame`].
    pub fn ricci_matrix(&self) -> Result<(Vec<TangentDir<S>>, Mat<S>, Vec<S>)> {
        let frame = self.tangent_frame();
        let dim = frame.len();
        let mut ric = Mat::zeros(dim, dim);
        for u in 0..dim {
            for v in u..dim {
                let value = self.ricci(&frame[u], &frame[v])?;
                ric.set(v, u, value.clone());
                ric.set(u, v, value);
            }
        }
        let norms = frame.iter().map(|e| self.h(e, e)).collect();
        Ok((frame, ric, norms))
    }

    /// `Σ_u ric(e_u, e_u) / h(e_u, e_u)` over the tangent frame.
    pub fn ricci_trace(&self) -> Result<S> {
        let frame = self.tangent_frame();
        let terms = frame
            .iter()
            .map(|e| Ok(self.ricci(e, e)? / self.h(e, e)))
            .collect::<Result<Vec<S>>>()?;
        Ok(sum(terms))
    }

    /// Sectional curvature of the plane spanned by `plane`.
    pub fn sectional(&self, plane: &PlaneSpec<S>) -> Result<S> {
        let normalized = normalize_plane(self, plane)?;
        if self.m == 2 {
            sectional_rank_two(self, &normalized)
        } else {
            sectional_higher_rank(self, &normalized)
        }
    }
}

#[cfg(test)]
mod tests;
