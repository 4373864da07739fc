//! Sufficient conditions on the radius `r` for positivity of the sectional,
//! Ricci and scalar curvature of `h`, written in `t = r²`.

use serde::Serialize;

use super::SphereBundleModel;
use crate::atiyah::{supra_bound, supra_derivatives, AtiyahSpec};
use crate::error::{Error, Result};
use crate::scalar::{sq, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// Nonnegative sectional curvature.
    Sectional,
    /// Positive Ricci curvature from `ρ` and `𝐊`.
    Ricci,
    /// Positive Ricci curvature from `ε`, `L₁`, `L₂`.
    RicciDerivative,
    /// Positive scalar curvature from `L₁`, `L₂`.
    Scalar,
}

impl BoundKind {
    pub const ALL: [BoundKind; 4] = [BoundKind::Sectional, BoundKind::Ricci, BoundKind::RicciDerivative, BoundKind::Scalar];

    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Sectional => "sectional",
            BoundKind::Ricci => "ricci",
            BoundKind::RicciDerivative => "ricci-derivative",
            BoundKind::Scalar => "scalar",
        }
    }
}

/// Constants entering the bounds. `C` bounds the base sectional curvature from
/// below, `ρ` the base Ricci curvature from below, `𝐊` the bundle curvature
/// from above (`|R^E(X,Y)ξ| ≤ 𝐊|X||Y||ξ|`).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoundConstants<S> {
    pub sectional_lower: Option<S>,
    pub ricci_lower: Option<S>,
    pub curvature_bound: Option<S>,
    pub l1: Option<S>,
    pub l2: Option<S>,
    pub epsilon: Option<S>,
}

/// Admissible radii `0 < r² < t_max` (or `≤` when `inclusive`).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundRange {
    pub kind: BoundKind,
    pub formula: &'static str,
    /// No radius is admissible.
    pub empty: bool,
    /// `None` when every radius is admissible.
    pub r_squared_max: Option<f64>,
    pub r_max: Option<f64>,
    pub inclusive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PositivityReport {
    pub base_dim: usize,
    pub rank: usize,
    /// Whether `∇^{M,E}R^E` vanishes at the point, a hypothesis of the
    /// sectional and first Ricci bounds; `None` when unknown.
    pub derivative_vanishes: Option<bool>,
    pub ranges: Vec<BoundRange>,
}

const EQCURV_NOTE: &str = "higher-rank sectional predicate uses the curvature bound with mixed powers, evaluated as stated";

fn need<'a, S>(value: &'a Option<S>, name: &'static str) -> Result<&'a S> {
    value.as_ref().ok_or(Error::MissingConstant(name))
}

fn non_negative<S: Scalar>(value: &S, what: &'static str) -> Result<()> {
    if *value < S::zero() {
        Err(Error::InvalidModel(format!("{what} must be non-negative")))
    } else {
        Ok(())
    }
}

/// `C − ¾t𝐊²(4 + 3t(n−2)𝐊 + ¾t²(n−2)²𝐊²)`.
fn higher_rank_sectional<S: Scalar>(n: usize, c: &S, kb: &S, t: &S) -> S {
    let nm2 = S::from_i64(n as i64 - 2);
    let inner = S::from_i64(4)
        + S::from_i64(3) * t.clone() * nm2.clone() * kb.clone()
        + S::ratio(3, 4) * sq(t) * sq(&nm2) * sq(kb);
    c.clone() - S::ratio(3, 4) * t.clone() * sq(kb) * inner
}

/// Exact predicate of `kind` at radius `r`, for base dimension `n` and bundle rank `m`.
pub fn bound_holds<S: Scalar>(kind: BoundKind, n: usize, m: usize, constants: &BoundConstants<S>, r: &S) -> Result<bool> {
    if *r <= S::zero() {
        return Err(Error::NonPositive { what: "r" });
    }
    let t = sq(r);
    let nn = S::from_i64(n as i64);
    let mm = S::from_i64(m as i64);
    let two = S::from_i64(2);
    Ok(match kind {
        BoundKind::Sectional => {
            let c = need(&constants.sectional_lower, "C")?;
            let kb = need(&constants.curvature_bound, "K")?;
            non_negative(kb, "K")?;
            if m == 2 {
                S::from_i64(3) * kb.clone() * t <= S::from_i64(4) * c.clone()
            } else {
                higher_rank_sectional(n, c, kb, &t) >= S::zero()
            }
        }
        BoundKind::Ricci => {
            let rho = need(&constants.ricci_lower, "rho")?;
            let kb = need(&constants.curvature_bound, "K")?;
            non_negative(kb, "K")?;
            let lhs = nn * sq(kb) * t;
            let rhs = two * rho.clone();
            if m == 2 {
                lhs <= rhs && *rho > S::zero()
            } else {
                lhs < rhs
            }
        }
        BoundKind::RicciDerivative => {
            let eps = need(&constants.epsilon, "epsilon")?;
            let l1 = need(&constants.l1, "L1")?;
            let l2 = need(&constants.l2, "L2")?;
            let a = eps.clone() - S::half() * t.clone() * nn.clone() * sq(l1);
            a > S::zero() && S::from_i64(4) * (mm - two) * a - sq(&t) * sq(&nn) * sq(l2) > S::zero()
        }
        BoundKind::Scalar => {
            let l1 = need(&constants.l1, "L1")?;
            let l2 = need(&constants.l2, "L2")?;
            let nn1 = nn.clone() * (nn - S::one());
            let value = (mm.clone() - S::one()) * (mm - two)
                - nn1.clone() * l1.clone() * t.clone()
                - S::ratio(1, 4) * nn1 * sq(l2) * sq(&t);
            value > S::zero()
        }
    })
}

/// Positive root of `a t² + b t − c` with `a, c ≥ 0`.
fn positive_root(a: f64, b: f64, c: f64) -> Option<f64> {
    if a == 0.0 {
        return (b > 0.0).then(|| c / b);
    }
    Some((-b + (b * b + 4.0 * a * c).sqrt()) / (2.0 * a))
}

fn range(kind: BoundKind, formula: &'static str, t_max: Option<f64>, inclusive: bool) -> BoundRange {
    let empty = t_max.is_some_and(|t| t <= 0.0);
    let r_squared_max = if empty { Some(0.0) } else { t_max };
    BoundRange {
        kind,
        formula,
        empty,
        r_squared_max,
        r_max: r_squared_max.map(f64::sqrt),
        inclusive,
        note: None,
    }
}

fn empty_range(kind: BoundKind, formula: &'static str) -> BoundRange {
    range(kind, formula, Some(-1.0), false)
}

/// Largest `t` with `f(t) ≥ 0` for a decreasing `f` with `f(0) ≥ 0`.
fn bisect_decreasing(f: impl Fn(f64) -> f64) -> f64 {
    let mut hi = 1.0;
    while f(hi) >= 0.0 && hi < 1e300 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn bound_range<S: Scalar>(kind: BoundKind, n: usize, m: usize, constants: &BoundConstants<S>) -> Result<BoundRange> {
    let f = |x: &S| x.to_f64();
    let nf = n as f64;
    let mf = m as f64;
    Ok(match kind {
        BoundKind::Sectional => {
            let c = f(need(&constants.sectional_lower, "C")?);
            let kb_exact = need(&constants.curvature_bound, "K")?;
            non_negative(kb_exact, "K")?;
            let kb = f(kb_exact);
            if m == 2 {
                if c < 0.0 {
                    empty_range(kind, "rank-two")
                } else if kb_exact.is_zero() {
                    range(kind, "rank-two", None, true)
                } else {
                    range(kind, "rank-two", Some(4.0 * c / (3.0 * kb)), true)
                }
            } else {
                let mut out = if c < 0.0 {
                    empty_range(kind, "higher-rank")
                } else if kb_exact.is_zero() {
                    range(kind, "higher-rank", None, true)
                } else {
                    let g = |t: f64| {
                        c - 0.75 * t * kb * kb * (4.0 + 3.0 * t * (nf - 2.0) * kb + 0.75 * t * t * (nf - 2.0).powi(2) * kb * kb)
                    };
                    range(kind, "higher-rank", Some(bisect_decreasing(g)), true)
                };
                out.note = Some(EQCURV_NOTE.to_string());
                out
            }
        }
        BoundKind::Ricci => {
            let rho = f(need(&constants.ricci_lower, "rho")?);
            let kb_exact = need(&constants.curvature_bound, "K")?;
            non_negative(kb_exact, "K")?;
            let kb = f(kb_exact);
            let inclusive = m == 2;
            if rho <= 0.0 {
                empty_range(kind, "curvature-bound")
            } else if kb_exact.is_zero() {
                range(kind, "curvature-bound", None, inclusive)
            } else {
                range(kind, "curvature-bound", Some(2.0 * rho / (nf * kb * kb)), inclusive)
            }
        }
        BoundKind::RicciDerivative => {
            let eps = f(need(&constants.epsilon, "epsilon")?);
            let l1 = f(need(&constants.l1, "L1")?);
            let l2 = f(need(&constants.l2, "L2")?);
            if eps <= 0.0 || m <= 2 {
                empty_range(kind, "derivative-bound")
            } else if l2 == 0.0 {
                let t = (l1 != 0.0).then(|| 2.0 * eps / (nf * l1 * l1));
                range(kind, "derivative-bound", t, false)
            } else {
                let t = positive_root(nf * nf * l2 * l2, 2.0 * (mf - 2.0) * nf * l1 * l1, 4.0 * (mf - 2.0) * eps);
                range(kind, "derivative-bound", t, false)
            }
        }
        BoundKind::Scalar => {
            let l1 = f(need(&constants.l1, "L1")?);
            let l2 = f(need(&constants.l2, "L2")?);
            let nn1 = nf * (nf - 1.0);
            if m <= 2 {
                empty_range(kind, "scalar")
            } else {
                let t = positive_root(0.25 * nn1 * l2 * l2, nn1 * l1, (mf - 1.0) * (mf - 2.0));
                range(kind, "scalar", t, false)
            }
        }
    })
}

fn available<S>(kind: BoundKind, c: &BoundConstants<S>) -> bool {
    match kind {
        BoundKind::Sectional => c.sectional_lower.is_some() && c.curvature_bound.is_some(),
        BoundKind::Ricci => c.ricci_lower.is_some() && c.curvature_bound.is_some(),
        BoundKind::RicciDerivative => c.epsilon.is_some() && c.l1.is_some() && c.l2.is_some(),
        BoundKind::Scalar => c.l1.is_some() && c.l2.is_some(),
    }
}

/// Admissible radius ranges. An empty `kinds` evaluates every bound whose
/// constants are present; an explicitly requested bound with missing
/// constants is an error.
pub fn positivity_bounds<S: Scalar>(
    n: usize,
    m: usize,
    constants: &BoundConstants<S>,
    kinds: &[BoundKind],
) -> Result<PositivityReport> {
    let requested: Vec<BoundKind> = if kinds.is_empty() {
        BoundKind::ALL.into_iter().filter(|k| available(*k, constants)).collect()
    } else {
        kinds.to_vec()
    };
    let ranges = requested.into_iter().map(|k| bound_range(k, n, m, constants)).collect::<Result<Vec<_>>>()?;
    Ok(PositivityReport { base_dim: n, rank: m, derivative_vanishes: None, ranges })
}

/// [`positivity_bounds`] for a model, filling `C` from the base's known
/// sectional infimum and `𝐊` from the Atiyah space-form constant when they
/// are not supplied.
pub fn positivity_bounds_for<S: Scalar>(
    model: &SphereBundleModel<S>,
    constants: &BoundConstants<S>,
    kinds: &[BoundKind],
) -> Result<PositivityReport> {
    let mut filled = constants.clone();
    if filled.sectional_lower.is_none() {
        filled.sectional_lower = model.base.k_lower_bound();
    }
    let spec: Option<AtiyahSpec<S>> = model.atiyah_spec();
    if filled.curvature_bound.is_none() {
        filled.curvature_bound = spec.as_ref().and_then(|s| supra_bound(s).ok());
    }
    let mut report = positivity_bounds(model.base.dim(), model.rank(), &filled, kinds)?;
    report.derivative_vanishes = match &spec {
        Some(s) => supra_derivatives(s).ok().map(|d| d.full.iter().all(|t| t.max_abs() <= model.tol)),
        None => model.point().ok().and_then(|p| p.derivative.map(|d| d.iter().all(|t| t.max_abs() <= model.tol))),
    };
    Ok(report)
}
