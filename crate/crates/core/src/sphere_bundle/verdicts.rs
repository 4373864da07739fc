use nalgebra::{DMatrix, SymmetricEigen};

use super::{BundlePoint, TangentDir};
use crate::algebra::{FiberVec, Mat};
use crate::error::Result;
use crate::scalar::Scalar;

/// Outcome of testing `M = λ W` for a symmetric form `M` and a diagonal
/// positive form `W` on the same basis.
struct Proportionality<S> {
    holds: bool,
    lambda: S,
    spread: f64,
    /// Coefficient vectors of two directions with different ratios `M(v,v)/W(v,v)`.
    witness: Option<(Vec<S>, S, Vec<S>, S)>,
}

fn ratio<S: Scalar>(form: &Mat<S>, weights: &[S], v: &[S]) -> S {
    let mv = form.apply(v);
    let num = v.iter().zip(&mv).fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone());
    let den = v.iter().zip(weights).fold(S::zero(), |acc, (a, w)| acc + a.clone() * a.clone() * w.clone());
    num / den
}

fn unit<S: Scalar>(dim: usize, u: usize) -> Vec<S> {
    let mut v = vec![S::zero(); dim];
    v[u] = S::one();
    v
}

fn proportionality<S: Scalar>(form: &Mat<S>, weights: &[S], rel_tol: f64) -> Proportionality<S> {
    let dim = weights.len();
    if dim == 0 {
        return Proportionality { holds: true, lambda: S::zero(), spread: 0.0, witness: None };
    }
    if S::EXACT {
        let diag: Vec<S> = (0..dim).map(|u| form.get(u, u).clone() / weights[u].clone()).collect();
        let lambda = diag[0].clone();
        let lo = diag.iter().map(|d| d.to_f64()).fold(f64::INFINITY, f64::min);
        let hi = diag.iter().map(|d| d.to_f64()).fold(f64::NEG_INFINITY, f64::max);
        if let Some(v) = (1..dim).find(|&v| diag[v] != lambda) {
            let (e0, ev) = (unit(dim, 0), unit(dim, v));
            let witness = Some((e0, lambda.clone(), ev, diag[v].clone()));
            return Proportionality { holds: false, lambda, spread: hi - lo, witness };
        }
        for u in 0..dim {
            for v in u + 1..dim {
                if !form.get(u, v).is_zero() {
                    let eu: Vec<S> = unit(dim, u);
                    let mix: Vec<S> = eu.iter().zip(unit::<S>(dim, v)).map(|(a, b)| a.clone() + b).collect();
                    let mixed_ratio = ratio(form, weights, &mix);
                    let witness = Some((eu, lambda.clone(), mix, mixed_ratio.clone()));
                    let spread = (mixed_ratio - lambda.clone()).abs().to_f64();
                    return Proportionality { holds: false, lambda, spread, witness };
                }
            }
        }
        return Proportionality { holds: true, lambda, spread: 0.0, witness: None };
    }

    let scales: Vec<f64> = weights.iter().map(|w| w.to_f64().sqrt()).collect();
    let normalized = DMatrix::from_fn(dim, dim, |u, v| form.get(u, v).to_f64() / (scales[u] * scales[v]));
    let eigen = SymmetricEigen::new(normalized);
    let values = eigen.eigenvalues.as_slice();
    let (mut lo, mut hi) = (0, 0);
    for (i, x) in values.iter().enumerate() {
        if *x < values[lo] {
            lo = i;
        }
        if *x > values[hi] {
            hi = i;
        }
    }
    let spread = values[hi] - values[lo];
    let size = values.iter().fold(1.0_f64, |acc, x| acc.max(x.abs()));
    let lambda = values.iter().sum::<f64>() / dim as f64;
    let holds = spread <= rel_tol * size;
    let coefficients = |col: usize| -> Vec<S> {
        (0..dim).map(|u| S::from_f64(eigen.eigenvectors[(u, col)] / scales[u])).collect()
    };
    let witness = (!holds).then(|| {
        (coefficients(lo), S::from_f64(values[lo]), coefficients(hi), S::from_f64(values[hi]))
    });
    Proportionality { holds, lambda: S::from_f64(lambda), spread, witness }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EinsteinRoute {
    /// Decided from `R^E = 0` and the base Ricci tensor (fiber rank large
    /// compared with the base dimension).
    Analytic,
    /// Decided from the Ricci matrix on a tangent frame.
    Frame,
}

/// Two tangent vectors with different Ricci ratios `ric(u,u)/h(u,u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct EinsteinWitness<S> {
    pub first: TangentDir<S>,
    pub first_ratio: S,
    pub second: TangentDir<S>,
    pub second_ratio: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EinsteinVerdict<S> {
    pub einstein: bool,
    /// Einstein constant, or the mean Ricci ratio when not Einstein.
    pub lambda: S,
    pub route: EinsteinRoute,
    /// Eigenvalue spread of the normalized Ricci matrix (float) or the
    /// largest ratio gap found (exact).
    pub spread: f64,
    pub witness: Option<EinsteinWitness<S>>,
}

fn combine<S: Scalar>(frame: &[TangentDir<S>], coefficients: &[S]) -> TangentDir<S> {
    let mut acc = frame[0].scale(&S::zero());
    for (e, c) in frame.iter().zip(coefficients) {
        if !c.is_zero() {
            acc = acc.add(&e.scale(c));
        }
    }
    acc
}

/// Einstein test on the Ricci matrix over the tangent frame.
pub fn einstein_check_frame<S: Scalar>(point: &BundlePoint<S>, rel_tol: f64) -> Result<EinsteinVerdict<S>> {
    let (frame, ric, norms) = point.ricci_matrix()?;
    let p = proportionality(&ric, &norms, rel_tol);
    let witness = p.witness.map(|(c1, r1, c2, r2)| EinsteinWitness {
        first: combine(&frame, &c1),
        first_ratio: r1,
        second: combine(&frame, &c2),
        second_ratio: r2,
    });
    Ok(EinsteinVerdict { einstein: p.holds, lambda: p.lambda, route: EinsteinRoute::Frame, spread: p.spread, witness })
}

/// Decides whether `h` is Einstein at the point. When `m − 1 > n(n−1)/2`
/// the verdict is `R^E = 0` and `ric^M = (m−2)/r² g`; otherwise the Ricci
/// matrix on a tangent frame is tested for proportionality to `h`.
pub fn einstein_check<S: Scalar>(point: &BundlePoint<S>, rel_tol: f64) -> Result<EinsteinVerdict<S>> {
    let (n, m) = (point.n, point.m);
    if 2 * (m - 1) <= n * n.saturating_sub(1) {
        return einstein_check_frame(point, rel_tol);
    }
    let lambda = S::from_i64(m as i64 - 2) / point.radius_sq.clone();
    let flat = if S::EXACT { point.curvature.is_zero() } else { point.curvature.max_abs() <= point.tol };
    let target = Mat::identity(n).scale(&lambda);
    let base_einstein = if S::EXACT {
        point.base_ricci == target
    } else {
        point.base_ricci.approx_eq(&target, rel_tol * lambda.to_f64().abs().max(1.0))
    };
    let einstein = flat && base_einstein;
    let (witness, spread) = if einstein {
        (None, 0.0)
    } else {
        let frame = einstein_check_frame(point, rel_tol)?;
        (frame.witness, frame.spread)
    };
    Ok(EinsteinVerdict { einstein, lambda, route: EinsteinRoute::Analytic, spread, witness })
}

/// Two fiber vectors with different values of `ξ(v,v)/|v|²`.
#[derive(Clone, Debug, PartialEq)]
pub struct XiWitness<S> {
    pub first: FiberVec<S>,
    pub first_ratio: S,
    pub second: FiberVec<S>,
    pub second_ratio: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConstantScalarVerdict<S> {
    /// `ξ = (|R^E|²/m) ⟨,⟩_E` on the whole fiber.
    pub s1_holds: bool,
    /// `|R^E|² = Σ_{i,j} |R^E(X_i,X_j)|²`.
    pub curvature_norm_sq: S,
    /// `|R^E|²/m`.
    pub ratio: S,
    /// `4m s^M − r²|R^E|²`, to be compared across base points by the caller.
    pub s2: S,
    pub spread: f64,
    pub witness: Option<XiWitness<S>>,
}

/// Matrix of `ξ` on fiber coordinates.
pub fn xi_matrix<S: Scalar>(point: &BundlePoint<S>) -> Result<Mat<S>> {
    let m = point.m;
    let mut out = Mat::zeros(m, m);
    for u in 0..m {
        for v in u..m {
            let value = point.xi_form(&FiberVec::basis(m, u), &FiberVec::basis(m, v))?;
            out.set(v, u, value.clone());
            out.set(u, v, value);
        }
    }
    Ok(out)
}

/// Tests the pointwise condition for constant scalar curvature of `h` along
/// the fiber sphere, and reports the base-direction quantity `s2`.
pub fn constant_scalar_check<S: Scalar>(point: &BundlePoint<S>, rel_tol: f64) -> Result<ConstantScalarVerdict<S>> {
    let m = point.m;
    let xi = xi_matrix(point)?;
    let weights = &point.metric.weights;
    let norm_sq = (0..m).fold(S::zero(), |acc, u| acc + xi.get(u, u).clone() / weights[u].clone());
    let ratio = norm_sq.clone() / S::from_i64(m as i64);
    let p = proportionality(&xi, weights, rel_tol);
    let s2 = S::from_i64(4 * m as i64) * point.base_scalar.clone() - point.radius_sq.clone() * norm_sq.clone();
    let witness = p.witness.map(|(c1, r1, c2, r2)| XiWitness {
        first: FiberVec::new(c1),
        first_ratio: r1,
        second: FiberVec::new(c2),
        second_ratio: r2,
    });
    Ok(ConstantScalarVerdict { s1_holds: p.holds, curvature_norm_sq: norm_sq, ratio, s2, spread: p.spread, witness })
}
