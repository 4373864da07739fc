use super::{BundlePoint, TangentDir};
use crate::algebra::{dot, FiberVec, Mat, TangentVec};
use crate::error::{Error, Result};
use crate::scalar::{sq, Scalar};

/// Two tangent vectors `X^h + α^t`, `Y^h + β^t` of `E^(r)` spanning a plane.
#[derive(Clone, Debug, PartialEq)]
pub struct PlaneSpec<S> {
    pub first: TangentDir<S>,
    pub second: TangentDir<S>,
}

impl<S: Scalar> PlaneSpec<S> {
    pub fn new(first: TangentDir<S>, second: TangentDir<S>) -> Self {
        PlaneSpec { first, second }
    }

    /// `|X|²+|α|² = |Y|²+|β|² = 1`, `⟨X,Y⟩ = 0`, `⟨α,β⟩ = 0`.
    pub fn is_normalized(&self, point: &BundlePoint<S>, tol: f64) -> bool {
        let (u, v) = (&self.first, &self.second);
        let one = S::one();
        point.h(u, u).approx_eq(&one, tol)
            && point.h(v, v).approx_eq(&one, tol)
            && u.x.dot(&v.x).is_negligible(tol)
            && point.fiber_inner(&u.alpha, &v.alpha).is_negligible(tol)
    }
}

fn root<S: Scalar>(value: &S) -> Result<S> {
    value.try_sqrt().ok_or_else(|| {
        Error::Unsupported(format!(
            "normalizing this plane needs the square root of {value}, which is not rational; use float mode"
        ))
    })
}

/// Rank-2 bundles: order the basis so the second fiber part vanishes.
fn order_for_rank<S: Scalar>(point: &BundlePoint<S>, plane: PlaneSpec<S>) -> PlaneSpec<S> {
    if point.m == 2 && point.metric.norm_sq(&plane.second.alpha) > point.metric.norm_sq(&plane.first.alpha) {
        PlaneSpec { first: plane.second, second: plane.first }
    } else {
        plane
    }
}

/// Rotates an orthonormalized basis of the plane so that the horizontal parts
/// become orthogonal; the fiber parts then are orthogonal as well.
pub fn normalize_plane<S: Scalar>(point: &BundlePoint<S>, raw: &PlaneSpec<S>) -> Result<PlaneSpec<S>> {
    point.check_tangent(&raw.first, 0)?;
    point.check_tangent(&raw.second, 1)?;
    let u = TangentDir::new(raw.first.x.clone(), point.tangential(&raw.first.alpha));
    let v = TangentDir::new(raw.second.x.clone(), point.tangential(&raw.second.alpha));
    let projected = PlaneSpec::new(u, v);
    if S::EXACT && projected.is_normalized(point, 0.0) {
        return Ok(order_for_rank(point, projected));
    }
    let (u, v) = (projected.first, projected.second);

    let tol = point.tol;
    let nu = point.h(&u, &u);
    if nu.is_negligible(tol * tol) {
        return Err(Error::DegeneratePlane);
    }
    let u1 = u.scale(&(S::one() / root(&nu)?));
    let v_perp = v.add(&u1.scale(&(-point.h(&v, &u1))));
    let nv = point.h(&v_perp, &v_perp);
    if nv.is_negligible(tol * tol * point.h(&v, &v).to_f64().max(1.0)) {
        return Err(Error::DegeneratePlane);
    }
    let v1 = v_perp.scale(&(S::one() / root(&nv)?));

    let p = S::half() * (u1.x.norm_sq() - v1.x.norm_sq());
    let q = u1.x.dot(&v1.x);
    let rho_sq = sq(&p) + sq(&q);
    if rho_sq.is_negligible(tol * tol) {
        return Ok(order_for_rank(point, PlaneSpec::new(u1, v1)));
    }
    let cos_mu = p / root(&rho_sq)?;
    let cos_theta = root(&((S::one() + cos_mu.clone()) * S::half()))?;
    let mut sin_theta = root(&((S::one() - cos_mu) * S::half()))?;
    if q < S::zero() {
        sin_theta = -sin_theta;
    }
    let first = u1.scale(&cos_theta).add(&v1.scale(&sin_theta));
    let second = u1.scale(&(-sin_theta)).add(&v1.scale(&cos_theta));
    Ok(order_for_rank(point, PlaneSpec::new(first, second)))
}

fn base_sectional<S: Scalar>(point: &BundlePoint<S>, x: &TangentVec<S>, y: &TangentVec<S>) -> S {
    let rxy = point.base_curvature.eval(&x.coords, &y.coords);
    dot(&rxy.apply(&x.coords), &y.coords)
}

fn frame_pairings<S: Scalar>(point: &BundlePoint<S>, x: &TangentVec<S>, alpha: &FiberVec<S>) -> Vec<S> {
    if alpha.is_zero() {
        return vec![S::zero(); point.n];
    }
    (0..point.n)
        .map(|i| {
            let e = TangentVec::basis(point.n, i);
            let mat: Mat<S> = point.curvature_matrix(x, &e);
            point.fiber_inner(&FiberVec::new(mat.apply(&alpha.coords)), &point.a)
        })
        .collect()
}

/// Rank-2 formula on a normalized basis `(X^h + α^t, Y^h)`; `β` is ignored.
pub fn sectional_rank_two<S: Scalar>(point: &BundlePoint<S>, plane: &PlaneSpec<S>) -> Result<S> {
    let (x, alpha) = (&plane.first.x, &plane.first.alpha);
    let y = &plane.second.x;
    let rxy_a = FiberVec::new(point.curvature_matrix(x, y).apply(&point.a.coords));

    let mut k = base_sectional(point, x, y) - S::ratio(3, 4) * point.metric.norm_sq(&rxy_a);
    let pairings = frame_pairings(point, y, alpha);
    k = k + S::ratio(1, 4) * pairings.iter().fold(S::zero(), |acc, b| acc + sq(b));
    if !alpha.is_zero() {
        let d = point.nabla_curvature(y, x, y, alpha)?;
        k = k + point.fiber_inner(&d, &point.a);
    }
    Ok(k)
}

/// Rank ≥ 3 formula on a normalized basis.
pub fn sectional_higher_rank<S: Scalar>(point: &BundlePoint<S>, plane: &PlaneSpec<S>) -> Result<S> {
    let (x, alpha) = (&plane.first.x, &plane.first.alpha);
    let (y, beta) = (&plane.second.x, &plane.second.alpha);
    let rxy = point.curvature_matrix(x, y);
    let rxy_a = FiberVec::new(rxy.apply(&point.a.coords));
    let rxy_alpha = FiberVec::new(rxy.apply(&alpha.coords));

    let vertical = point.metric.norm_sq(alpha) * point.metric.norm_sq(beta) / point.radius_sq.clone();
    let mut k = base_sectional(point, x, y) + vertical + S::from_i64(3) * point.fiber_inner(&rxy_alpha, beta)
        - S::ratio(3, 4) * point.metric.norm_sq(&rxy_a);

    let x_beta = frame_pairings(point, x, beta);
    let y_alpha = frame_pairings(point, y, alpha);
    let x_alpha = frame_pairings(point, x, alpha);
    let y_beta = frame_pairings(point, y, beta);
    for i in 0..point.n {
        let s = x_beta[i].clone() + y_alpha[i].clone();
        k = k + S::ratio(1, 4) * sq(&s) - x_alpha[i].clone() * y_beta[i].clone();
    }

    let mut d = FiberVec::zeros(point.m);
    if !alpha.is_zero() {
        d = d.add(&point.nabla_curvature(y, x, y, alpha)?);
    }
    if !beta.is_zero() {
        d = d.sub(&point.nabla_curvature(x, x, y, beta)?);
    }
    Ok(k + point.fiber_inner(&d, &point.a))
}
