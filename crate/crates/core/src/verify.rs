//! Named property suites run by `sasaki verify`.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{FiberVec, TangentVec};
use crate::atiyah::{supra_curvature, supra_table_assembled, supra_vanishes, AtiyahSpec};
use crate::base_geometry::{skew_adjoint_witness, standard_complex_structure, PointModel};
use crate::catalog::builtin_float_models;
use crate::document::ModelDocument;
use crate::error::{Error, Result};
use crate::report::{render, DEFAULT_SEED};
use crate::scalar::{rational as q, Rational, Scalar};
use crate::sphere_bundle::{random_fiber_point, random_plane, seeded_rng, PlaneSpec, SphereBundleModel};
use crate::unimodular3::{
    case_list_printed_lambdas, case_list_tuples, curvature_constants, mu_closed_form, mu_rederived, MilnorConstants,
};

pub const SUITES: &[&str] = &[
    "trace-identity",
    "basis-invariance",
    "unit-tangent-sphere",
    "supra-vanishing",
    "complex-projective-trace",
    "milnor-tables",
    "milnor-double-entry",
    "lambda-sum",
    "skew-adjoint",
];

#[derive(Clone, Debug, Default, PartialEq)]
pub struct VerifyOptions {
    /// Samples per model; each suite has its own default.
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    /// Pass tolerance; each suite has its own default.
    pub tolerance: Option<f64>,
    /// Model document audited instead of the built-in models (skew-adjoint only).
    pub model: Option<std::path::PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub counterexample: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteOutcome {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    /// Observations that do not affect the verdict.
    pub notes: Vec<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            out.push_str(&format!("[{}] {}: {}\n", if c.passed { "pass" } else { "FAIL" }, c.name, c.detail));
            if let Some(ce) = &c.counterexample {
                out.push_str(&format!("    counterexample: {ce}\n"));
            }
        }
        for n in &self.notes {
            out.push_str(&format!("note: {n}\n"));
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        out.push_str(&format!(
            "{}: {} checks, {} failed (seed {})\n",
            self.suite,
            self.checks.len(),
            failed,
            self.seed
        ));
        out
    }
}

fn check(name: impl Into<String>, passed: bool, detail: String, counterexample: Option<String>) -> Check {
    Check { name: name.into(), passed, detail, counterexample }
}

fn gaussian_vec(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Worst sample of `f` over `samples` seeded streams: `(index, value)`.
fn worst(samples: usize, f: impl Fn(usize) -> Result<f64> + Sync) -> Result<(usize, f64)> {
    let values = (0..samples).into_par_iter().map(&f).collect::<Result<Vec<f64>>>()?;
    Ok(values.into_iter().enumerate().fold((0, 0.0), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc }))
}

fn trace_identity(options: &VerifyOptions, seed: u64) -> Result<Vec<Check>> {
    let samples = options.samples.unwrap_or(20);
    let tol = options.tolerance.unwrap_or(1e-8);
    builtin_float_models()?
        .into_iter()
        .map(|(name, model)| {
            let point = model.point()?;
            let (i, gap) = worst(samples, |i| {
                let mut rng = seeded_rng(seed, i as u64);
                let local = point.at_fiber(random_fiber_point(&point, &mut rng))?;
                Ok((local.ricci_trace()? - local.scalar()).abs() / local.scalar().abs().max(1.0))
            })?;
            let counterexample = (gap > tol).then(|| format!("model {name}, sample {i}"));
            Ok(check(name, gap <= tol, format!("max |tr ric − τ| = {gap:.3e} over {samples} points"), counterexample))
        })
        .collect()
}

fn basis_invariance(options: &VerifyOptions, seed: u64) -> Result<Vec<Check>> {
    let samples = options.samples.unwrap_or(500);
    let tol = options.tolerance.unwrap_or(1e-8);
    builtin_float_models()?
        .into_iter()
        .map(|(name, model)| {
            let point = model.point()?;
            let (i, gap) = worst(samples, |i| {
                let mut rng = seeded_rng(seed, i as u64);
                let plane = random_plane(&point, &mut rng);
                let c = gaussian_vec(&mut rng, 4);
                if (c[0] * c[3] - c[1] * c[2]).abs() < 1e-3 {
                    return Ok(0.0);
                }
                let mixed = PlaneSpec::new(
                    plane.first.scale(&c[0]).add(&plane.second.scale(&c[1])),
                    plane.first.scale(&c[2]).add(&plane.second.scale(&c[3])),
                );
                let (k1, k2) = (point.sectional(&plane)?, point.sectional(&mixed)?);
                Ok((k1 - k2).abs() / k1.abs().max(1.0))
            })?;
            let counterexample = (gap > tol).then(|| format!("model {name}, sample {i}"));
            Ok(check(name, gap <= tol, format!("max |K(P) − K(P')| = {gap:.3e} over {samples} planes"), counterexample))
        })
        .collect()
}

fn unit_tangent_sphere(options: &VerifyOptions, seed: u64) -> Result<Vec<Check>> {
    let samples = options.samples.unwrap_or(1000);
    let tol = options.tolerance.unwrap_or(1e-10);
    let model = SphereBundleModel::tangent_at_first_axis(PointModel::SpaceForm { dim: 2, c: 1.0 }, 1.0, 1e-12)?;
    let point = model.point()?;
    let (i, gap) = worst(samples, |i| {
        let mut rng = seeded_rng(seed, i as u64);
        let local = point.at_fiber(random_fiber_point(&point, &mut rng))?;
        Ok((local.sectional(&random_plane(&local, &mut rng))? - 0.25).abs())
    })?;
    Ok(vec![check(
        "sectional curvature of T¹S² is 1/4",
        gap <= tol,
        format!("max |K − 1/4| = {gap:.3e} over {samples} planes"),
        (gap > tol).then(|| format!("sample {i}")),
    )])
}

fn supra_vanishing(options: &VerifyOptions, seed: u64) -> Result<Vec<Check>> {
    let samples = options.samples.unwrap_or(10_000);
    let tol = options.tolerance.unwrap_or(1e-12);
    let mut checks = Vec::new();
    for n in [2usize, 3, 4] {
        for k in [q(1, 2), q(1, 1), q(3, 1)] {
            let c = Rational::from_i64(2) / k.clone();
            let exact = AtiyahSpec::new(PointModel::SpaceForm { dim: n, c: c.clone() }, k.clone())?;
            let analytic = supra_vanishes(&exact, 0.0)?;
            let spec = AtiyahSpec::new(PointModel::SpaceForm { dim: n, c: c.to_f64() }, k.to_f64())?;
            let m = spec.rank();
            let assembled = supra_table_assembled(&spec)?;
            let (i, size) = worst(samples, |i| {
                let mut rng = seeded_rng(seed, i as u64);
                let x = TangentVec::new(gaussian_vec(&mut rng, n));
                let y = TangentVec::new(gaussian_vec(&mut rng, n));
                let xi = FiberVec::new(gaussian_vec(&mut rng, m));
                let closed = supra_curvature(&spec, &x, &y, &xi)?;
                let general = assembled.eval(&x.coords, &y.coords).apply(&xi.coords);
                Ok(closed.coords.iter().chain(&general).fold(0.0_f64, |a, v| a.max(v.abs())))
            })?;
            let passed = size < tol && analytic.vanishes;
            checks.push(check(
                format!("n = {n}, k = {}", render(&k)),
                passed,
                format!(
                    "max |R^E(X,Y)ξ| = {size:.3e} over {samples} samples (closed form and assembled table); analytic verdict {}",
                    analytic.vanishes
                ),
                (!passed).then(|| format!("sample {i}")),
            ));
        }
    }
    Ok(checks)
}

fn complex_projective_trace(options: &VerifyOptions, seed: u64) -> Result<Vec<Check>> {
    let samples = options.samples.unwrap_or(1000);
    let tol = options.tolerance.unwrap_or(1e-10);
    [1usize, 2, 3]
        .into_iter()
        .map(|n| {
            let j = standard_complex_structure::<f64>(n);
            let model = PointModel::ComplexProjective { n, j: j.clone() };
            let table = model.curvature_table()?;
            let (i, gap) = worst(samples, |i| {
                let mut rng = seeded_rng(seed, i as u64);
                let x = TangentVec::new(gaussian_vec(&mut rng, 2 * n));
                let y = TangentVec::new(gaussian_vec(&mut rng, 2 * n));
                let lhs = j.mat().mul(&table.eval(&x.coords, &y.coords)).trace();
                let rhs = 4.0 * (n as f64 + 1.0) * j.apply(&y).dot(&x);
                Ok((lhs - rhs).abs() / rhs.abs().max(1.0))
            })?;
            Ok(check(
                format!("CP^{n}"),
                gap <= tol,
                format!("max |tr(J∘R(X,Y)) − 4(n+1)⟨JY,X⟩| = {gap:.3e} over {samples} pairs"),
                (gap > tol).then(|| format!("sample {i}")),
            ))
        })
        .collect()
}

fn milnor_tables(notes: &mut Vec<String>) -> Vec<Check> {
    let printed = case_list_printed_lambdas();
    let mut checks = Vec::new();
    for (idx, (params, printed)) in case_list_tuples().iter().zip(printed.iter()).enumerate() {
        let computed = curvature_constants(params).lambda();
        let expected: Vec<Rational> = printed.iter().map(|&(a, b)| q(a, b)).collect();
        let label = format!("case {} (m, n, p) = ({}, {}, {})", idx + 1, render(&params.m), render(&params.n), render(&params.p));
        let shown = computed.iter().map(render).collect::<Vec<_>>().join(", ");
        if idx < 3 {
            let passed = computed.iter().zip(&expected).all(|(c, e)| c == e);
            checks.push(check(label, passed, format!("λ = ({shown})"), (!passed).then(|| label_of(&expected))));
        } else if computed.iter().zip(&expected).any(|(c, e)| c != e) {
            notes.push(format!("{label}: computed λ = ({shown}) differs from the printed ({})", label_of(&expected)));
        } else {
            notes.push(format!("{label}: computed λ = ({shown}) equals the printed values"));
        }
    }
    checks
}

fn label_of(values: &[Rational]) -> String {
    values.iter().map(render).collect::<Vec<_>>().join(", ")
}

fn rational_grid() -> Vec<Rational> {
    [(-2, 1), (-1, 1), (-1, 2), (-1, 3), (0, 1), (1, 4), (1, 2), (1, 1), (3, 2)].iter().map(|&(a, b)| q(a, b)).collect()
}

fn milnor_grid_tuples() -> Vec<MilnorConstants<Rational>> {
    let g = rational_grid();
    let mut out = Vec::with_capacity(g.len().pow(3));
    for m in &g {
        for n in &g {
            for p in &g {
                out.push(MilnorConstants::new(m.clone(), n.clone(), p.clone()));
            }
        }
    }
    out
}

fn milnor_double_entry() -> Result<Vec<Check>> {
    let tuples = milnor_grid_tuples();
    let mismatches: Vec<String> = tuples
        .par_iter()
        .map(|c| -> Result<Option<String>> {
            let closed = mu_closed_form(c);
            let rederived = mu_rederived(c)?;
            Ok((closed != rederived).then(|| format!("({}, {}, {})", render(&c.m), render(&c.n), render(&c.p))))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(vec![check(
        "μ closed form equals μ from the connection",
        mismatches.is_empty(),
        format!("{} tuples, {} mismatches", tuples.len(), mismatches.len()),
        mismatches.first().cloned(),
    )])
}

fn lambda_sum() -> Vec<Check> {
    let tuples = milnor_grid_tuples();
    let bad = tuples.iter().find(|c| !curvature_constants(*c).lambda_sum_identity_holds(0.0));
    vec![check(
        "λ₁+λ₂+λ₃ = 2Σμ² + 12(Σμ − 1)",
        bad.is_none(),
        format!("{} tuples", tuples.len()),
        bad.map(|c| format!("({}, {}, {})", render(&c.m), render(&c.n), render(&c.p))),
    )]
}

fn skew_adjoint_check<S: Scalar>(name: &str, base: &PointModel<S>, tol: f64) -> Result<Check> {
    let table = base.curvature_table()?;
    let witness = skew_adjoint_witness(&table, tol);
    Ok(match witness {
        None => check(name, true, "every R(X_i,X_j) is skew-adjoint".into(), None),
        Some((i, j, r, c)) => {
            let m = table.get(i, j);
            check(
                name,
                false,
                format!("R(X_{i},X_{j}) is not skew-adjoint"),
                Some(format!(
                    "entries ({r},{c}) = {} and ({c},{r}) = {}",
                    render(m.get(r, c)),
                    render(m.get(c, r))
                )),
            )
        }
    })
}

fn skew_adjoint(options: &VerifyOptions) -> Result<Vec<Check>> {
    let tol = options.tolerance.unwrap_or(1e-12);
    if let Some(path) = &options.model {
        let doc = ModelDocument::from_path(path)?;
        let name = path.file_name().map_or("model".into(), |f| f.to_string_lossy().into_owned());
        return Ok(vec![match doc.mode {
            crate::document::NumericMode::Exact => skew_adjoint_check(&name, &doc.base_unchecked::<Rational>()?, 0.0)?,
            crate::document::NumericMode::Float => skew_adjoint_check(&name, &doc.base_unchecked::<f64>()?, tol)?,
        }]);
    }
    builtin_float_models()?.iter().map(|(name, model)| skew_adjoint_check(name, &model.base, tol)).collect()
}

/// Runs one suite (or `all`).
pub fn run_suite(suite: &str, options: &VerifyOptions) -> Result<SuiteOutcome> {
    let seed = options.seed.unwrap_or(DEFAULT_SEED);
    let mut notes = Vec::new();
    let checks = match suite {
        "trace-identity" => trace_identity(options, seed)?,
        "basis-invariance" => basis_invariance(options, seed)?,
        "unit-tangent-sphere" => unit_tangent_sphere(options, seed)?,
        "supra-vanishing" => supra_vanishing(options, seed)?,
        "complex-projective-trace" => complex_projective_trace(options, seed)?,
        "milnor-tables" => milnor_tables(&mut notes),
        "milnor-double-entry" => milnor_double_entry()?,
        "lambda-sum" => lambda_sum(),
        "skew-adjoint" => skew_adjoint(options)?,
        "all" => {
            let mut checks = Vec::new();
            for s in SUITES {
                let outcome = run_suite(s, options)?;
                checks.extend(outcome.checks.into_iter().map(|c| Check { name: format!("{s}: {}", c.name), ..c }));
                notes.extend(outcome.notes);
            }
            checks
        }
        other => {
            return Err(Error::Unsupported(format!("unknown suite `{other}`; known suites: {}, all", SUITES.join(", "))))
        }
    };
    Ok(SuiteOutcome { suite: suite.to_string(), seed, checks, notes })
}
