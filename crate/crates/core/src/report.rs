//! Structured curvature report for one model document.

use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::document::{ModelDocument, NumericMode};
use crate::error::Result;
use crate::scalar::{format_float, Rational, Scalar};
use crate::sphere_bundle::{
    constant_scalar_check, einstein_check, positivity_bounds_for, sample_sectional, EinsteinRoute, PositivityReport,
    SectionalSummary, SphereBundleModel, TangentDir,
};

pub const DEFAULT_SAMPLES: usize = 1000;
pub const DEFAULT_SEED: u64 = 2718;

#[derive(Clone, Debug, PartialEq)]
pub struct ReportOptions {
    pub samples: usize,
    pub seed: u64,
    /// Overrides the document tolerance.
    pub tolerance: Option<f64>,
    pub timing: bool,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions { samples: DEFAULT_SAMPLES, seed: DEFAULT_SEED, tolerance: None, timing: false }
    }
}

/// Rendering of a scalar: exact rationals as `num/den`, floats with 17
/// significant digits.
pub fn render<S: Scalar>(x: &S) -> String {
    if S::EXACT {
        let text = x.to_string();
        if text.contains('/') {
            text
        } else {
            format!("{text}/1")
        }
    } else {
        format_float(x.to_f64())
    }
}

fn render_all<S: Scalar>(xs: &[S]) -> Vec<String> {
    xs.iter().map(render).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Value {
    pub value: String,
    pub approx: f64,
}

impl Value {
    fn of<S: Scalar>(x: &S) -> Self {
        Value { value: render(x), approx: x.to_f64() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Inputs {
    pub mode: &'static str,
    pub tolerance: f64,
    pub base: String,
    pub base_dim: usize,
    pub bundle: &'static str,
    pub rank: usize,
    pub k: Option<String>,
    pub r: String,
    pub a: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Direction {
    pub horizontal: Vec<String>,
    pub vertical: Vec<String>,
}

impl Direction {
    fn of<S: Scalar>(u: &TangentDir<S>) -> Self {
        Direction { horizontal: render_all(&u.x.coords), vertical: render_all(&u.alpha.coords) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RatioWitness {
    pub first: Direction,
    pub first_ratio: Value,
    pub second: Direction,
    pub second_ratio: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RicciSummary {
    /// `Σ_u ric(e_u,e_u)/h(e_u,e_u)` over a tangent frame.
    pub trace: Value,
    /// Eigenvalues of the Ricci form relative to `h`, ascending.
    pub eigenvalues: Vec<f64>,
    pub spread: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EinsteinSummary {
    pub einstein: bool,
    pub lambda: Value,
    pub route: &'static str,
    pub spread: f64,
    pub witness: Option<RatioWitness>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiberWitness {
    pub first: Vec<String>,
    pub first_ratio: Value,
    pub second: Vec<String>,
    pub second_ratio: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstantScalarSummary {
    pub fiber_condition: bool,
    pub curvature_norm_sq: Value,
    pub ratio: Value,
    pub base_quantity: Value,
    pub spread: f64,
    pub witness: Option<FiberWitness>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub inputs: Inputs,
    pub seed: u64,
    pub samples: usize,
    pub scalar_curvature: Value,
    pub sectional: SectionalSummary,
    pub ricci: RicciSummary,
    pub einstein: EinsteinSummary,
    pub constant_scalar: ConstantScalarSummary,
    pub bounds: Option<PositivityReport>,
    pub bounds_error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }
}

struct ExactPart {
    inputs: Inputs,
    scalar_curvature: Value,
    ricci: RicciSummary,
    einstein: EinsteinSummary,
    constant_scalar: ConstantScalarSummary,
    bounds: Option<PositivityReport>,
    bounds_error: Option<String>,
}

fn ricci_summary<S: Scalar>(model: &SphereBundleModel<S>) -> Result<RicciSummary> {
    let point = model.point()?;
    let (_, ric, norms) = point.ricci_matrix()?;
    let dim = norms.len();
    let scales: Vec<f64> = norms.iter().map(|w| w.to_f64().sqrt()).collect();
    let normalized = DMatrix::from_fn(dim, dim, |u, v| ric.get(u, v).to_f64() / (scales[u] * scales[v]));
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(normalized).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    let spread = eigenvalues.last().copied().unwrap_or(0.0) - eigenvalues.first().copied().unwrap_or(0.0);
    Ok(RicciSummary { trace: Value::of(&point.ricci_trace()?), eigenvalues, spread })
}

fn evaluate<S: Scalar>(doc: &ModelDocument) -> Result<ExactPart> {
    let model = doc.build::<S>()?;
    let point = model.point()?;
    let rel_tol = doc.tolerance;
    let inputs = Inputs {
        mode: doc.mode.name(),
        tolerance: doc.tolerance,
        base: model.base.kind().to_string(),
        base_dim: model.base.dim(),
        bundle: model.bundle.name(),
        rank: model.rank(),
        k: model.atiyah_spec().map(|s| render(&s.k)),
        r: render(&model.r),
        a: render_all(&model.a.coords),
    };

    let einstein = einstein_check(&point, rel_tol)?;
    let einstein = EinsteinSummary {
        einstein: einstein.einstein,
        lambda: Value::of(&einstein.lambda),
        route: match einstein.route {
            EinsteinRoute::Analytic => "analytic",
            EinsteinRoute::Frame => "frame",
        },
        spread: einstein.spread,
        witness: einstein.witness.map(|w| RatioWitness {
            first: Direction::of(&w.first),
            first_ratio: Value::of(&w.first_ratio),
            second: Direction::of(&w.second),
            second_ratio: Value::of(&w.second_ratio),
        }),
    };

    let scalar_check = constant_scalar_check(&point, rel_tol)?;
    let constant_scalar = ConstantScalarSummary {
        fiber_condition: scalar_check.s1_holds,
        curvature_norm_sq: Value::of(&scalar_check.curvature_norm_sq),
        ratio: Value::of(&scalar_check.ratio),
        base_quantity: Value::of(&scalar_check.s2),
        spread: scalar_check.spread,
        witness: scalar_check.witness.map(|w| FiberWitness {
            first: render_all(&w.first.coords),
            first_ratio: Value::of(&w.first_ratio),
            second: render_all(&w.second.coords),
            second_ratio: Value::of(&w.second_ratio),
        }),
    };

    let (bounds, bounds_error) = match positivity_bounds_for(&model, &doc.bound_constants::<S>()?, &[]) {
        Ok(b) => (Some(b), None),
        Err(e) => (None, Some(e.to_string())),
    };

    Ok(ExactPart {
        inputs,
        scalar_curvature: Value::of(&point.scalar()),
        ricci: ricci_summary(&model)?,
        einstein,
        constant_scalar,
        bounds,
        bounds_error,
    })
}

/// Evaluates the document in its numeric mode; sectional curvature is always
/// sampled in float mode at the document's evaluation point.
pub fn build_report(doc: &ModelDocument, options: &ReportOptions) -> Result<Report> {
    let start = Instant::now();
    let doc = match options.tolerance {
        Some(t) => doc.clone().with_tolerance(t),
        None => doc.clone(),
    };
    let part = match doc.mode {
        NumericMode::Exact => evaluate::<Rational>(&doc)?,
        NumericMode::Float => evaluate::<f64>(&doc)?,
    };
    let float_point = doc.build::<f64>()?.point()?;
    let sectional = sample_sectional(&float_point, options.samples, options.seed, false)?;
    Ok(Report {
        inputs: part.inputs,
        seed: options.seed,
        samples: options.samples,
        scalar_curvature: part.scalar_curvature,
        sectional,
        ricci: part.ricci,
        einstein: part.einstein,
        constant_scalar: part.constant_scalar,
        bounds: part.bounds,
        bounds_error: part.bounds_error,
        timing_ms: options.timing.then(|| start.elapsed().as_secs_f64() * 1e3),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::BUILTIN;

    fn builtin(name: &str) -> ModelDocument {
        let text = BUILTIN.iter().find(|(n, _)| *n == name).unwrap().1;
        ModelDocument::parse(text).unwrap()
    }

    #[test]
    fn unit_tangent_sphere_report_has_constant_sectional_curvature() {
        let report = build_report(&builtin("tangent-sphere"), &ReportOptions::default()).unwrap();
        assert_eq!(report.scalar_curvature.value, "3/2");
        assert!((report.sectional.min - 0.25).abs() < 1e-10);
        assert!((report.sectional.max - 0.25).abs() < 1e-10);
        assert!(report.einstein.einstein);
        assert_eq!(report.einstein.lambda.value, "1/2");
    }

    #[test]
    fn atiyah_sphere_scalar_matches_the_closed_form_of_xi() {
        // c = k = 1: ϖ = ¼c(2 − ck) = 1/4, and with a = e_1 (|F| = 0)
        // ξ(a,a) = 8ϖ²(n−1)|a|² = 1/2, so τ = c·n(n−1) + (m−1)(m−2) − ¼ξ = 2 + 2 − 1/8.
        let report = build_report(&builtin("atiyah-sphere"), &ReportOptions::default()).unwrap();
        assert_eq!(report.scalar_curvature.value, "31/8");
    }

    #[test]
    fn reports_are_deterministic_and_timing_is_opt_in() {
        let doc = builtin("surface");
        let options = ReportOptions { samples: 64, ..ReportOptions::default() };
        let first = build_report(&doc, &options).unwrap().to_json();
        let second = build_report(&doc, &options).unwrap().to_json();
        assert_eq!(first, second);
        assert!(!first.contains("timing_ms"));
        let timed = build_report(&doc, &ReportOptions { timing: true, ..options }).unwrap().to_json();
        assert!(timed.contains("timing_ms"));
    }

    #[test]
    fn every_builtin_model_reports() {
        for (name, text) in BUILTIN {
            let doc = ModelDocument::parse(text).unwrap();
            let report = build_report(&doc, &ReportOptions { samples: 32, ..ReportOptions::default() })
                .unwrap_or_else(|e| panic!("{name}: {e}"));
            assert!((report.ricci.trace.approx - report.scalar_curvature.approx).abs() < 1e-8, "{name}");
        }
    }

    #[test]
    fn tolerance_override_reaches_the_model() {
        let options = ReportOptions { tolerance: Some(1e-6), samples: 8, ..ReportOptions::default() };
        let report = build_report(&builtin("surface"), &options).unwrap();
        assert_eq!(report.inputs.tolerance, 1e-6);
    }
}
