//! TOML model documents describing a sphere bundle at a point.
//!
//! ```toml
//! mode = "exact"          # or "float" (default)
//! tolerance = 1e-9
//! r = "1"
//! a = ["1", "0", "0"]     # optional; defaults to r times the first unit frame vector
//!
//! [base]
//! kind = "space-form"
//! dim = 2
//! c = 1
//!
//! [bundle]
//! kind = "atiyah"
//! k = "1/2"
//!
//! [bounds]                # optional constants for the positivity bounds
//! ricci_lower = "1"
//! ```
//!
//! Numbers are integers, decimals, or strings holding `p/q` fractions or
//! decimals; all of them are read as exact rationals first.

use std::ops::Range;

use serde::Deserialize;
use toml::Spanned;

use crate::algebra::{FiberVec, Mat, TangentVec};
use crate::base_geometry::{standard_complex_structure, GenericData, PointModel, SurfaceData, SymmetricSpaceData};
use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Rational, Scalar};
use crate::sphere_bundle::{BoundConstants, BundleKind, GenericBundle, SphereBundleModel};
use crate::tables::{DerivTable, PairTable, SecondDerivTable};
use crate::unimodular3::MilnorConstants;

pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NumericMode {
    Exact,
    Float,
}

impl NumericMode {
    pub fn name(self) -> &'static str {
        match self {
            NumericMode::Exact => "exact",
            NumericMode::Float => "float",
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub(crate) enum Number {
    Integer(i64),
    Float(f64),
    Text(String),
}

impl Number {
    /// Exact value; floats are read through their shortest decimal form.
    pub(crate) fn rational(&self) -> std::result::Result<Rational, String> {
        let text = match self {
            Number::Integer(i) => return Ok(Rational::from_integer((*i).into())),
            Number::Float(f) => f.to_string(),
            Number::Text(t) => t.clone(),
        };
        parse_rational(&text).map_err(|e| match e {
            Error::Parse { message, .. } => message,
            other => other.to_string(),
        })
    }
}

/// Line and column (1-based) of a byte offset.
pub(crate) fn position(source: &str, offset: usize) -> (usize, usize) {
    let before = &source[..offset.min(source.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

pub(crate) fn toml_error(source: &str, e: toml::de::Error) -> Error {
    let (line, column) = e.span().map_or((1, 1), |s| position(source, s.start));
    Error::Parse { line, column, message: e.message().to_string() }
}

type Num = Spanned<Number>;
type Rows = Spanned<Vec<Vec<Number>>>;

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    mode: Option<Spanned<String>>,
    tolerance: Option<Spanned<f64>>,
    r: Num,
    a: Option<Spanned<Vec<Number>>>,
    base: Spanned<RawBase>,
    bundle: Spanned<RawBundle>,
    bounds: Option<Spanned<RawBounds>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBase {
    kind: Spanned<String>,
    dim: Option<Spanned<usize>>,
    c: Option<Num>,
    grad_c: Option<Spanned<Vec<Number>>>,
    hess_c: Option<Rows>,
    complex_dim: Option<Spanned<usize>>,
    m: Option<Num>,
    n: Option<Num>,
    p: Option<Num>,
    factors: Option<Vec<Spanned<RawBase>>>,
    dim_p: Option<Spanned<usize>>,
    dim_k: Option<Spanned<usize>>,
    pp: Option<Spanned<Vec<Vec<Vec<Number>>>>>,
    kp: Option<Spanned<Vec<Vec<Vec<Number>>>>>,
    kk: Option<Spanned<Vec<Vec<Vec<Number>>>>>,
    riemann: Option<Vec<Spanned<RawEntry>>>,
    nabla: Option<Vec<Spanned<RawEntry>>>,
    nabla2: Option<Vec<Spanned<RawEntry>>>,
}

/// One matrix of a frame-indexed table: `T(X_i, X_j)`, optionally
/// differentiated along `X_w` (and `X_v`).
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    i: usize,
    j: usize,
    w: Option<usize>,
    v: Option<usize>,
    matrix: Rows,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBundle {
    kind: Spanned<String>,
    k: Option<Num>,
    weights: Option<Spanned<Vec<Number>>>,
    curvature: Option<Vec<Spanned<RawEntry>>>,
    derivative: Option<Vec<Spanned<RawEntry>>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBounds {
    sectional_lower: Option<Num>,
    ricci_lower: Option<Num>,
    curvature_bound: Option<Num>,
    l1: Option<Num>,
    l2: Option<Num>,
    epsilon: Option<Num>,
}

/// A parsed model document; build it in either numeric mode with [`ModelDocument::build`].
#[derive(Clone, Debug)]
pub struct ModelDocument {
    source: String,
    raw: RawDocument,
    pub mode: NumericMode,
    pub tolerance: f64,
}

impl ModelDocument {
    pub fn parse(source: &str) -> Result<Self> {
        let raw: RawDocument = toml::from_str(source).map_err(|e| toml_error(source, e))?;
        let mut doc = ModelDocument { source: source.to_string(), raw, mode: NumericMode::Float, tolerance: DEFAULT_TOLERANCE };
        if let Some(mode) = &doc.raw.mode {
            doc.mode = match mode.get_ref().as_str() {
                "exact" => NumericMode::Exact,
                "float" => NumericMode::Float,
                other => return Err(doc.error(mode.span(), format!("unknown mode `{other}` (expected exact or float)"))),
            };
        }
        if let Some(tol) = &doc.raw.tolerance {
            if !(*tol.get_ref() >= 0.0) {
                return Err(doc.error(tol.span(), "tolerance must be non-negative".into()));
            }
            doc.tolerance = *tol.get_ref();
        }
        Ok(doc)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn base_kind(&self) -> &str {
        self.raw.base.get_ref().kind.get_ref()
    }

    pub fn bundle_kind(&self) -> &str {
        self.raw.bundle.get_ref().kind.get_ref()
    }

    fn error(&self, span: Range<usize>, message: String) -> Error {
        let (line, column) = position(&self.source, span.start);
        Error::Parse { line, column, message }
    }

    /// Attaches the position of `span` to an engine error.
    fn locate(&self, span: Range<usize>, err: Error) -> Error {
        match err {
            Error::Parse { .. } => err,
            other => self.error(span, other.to_string()),
        }
    }

    fn number<S: Scalar>(&self, value: &Number, span: Range<usize>) -> Result<S> {
        let q = value.rational().map_err(|message| self.error(span, message))?;
        Ok(S::from_rational(&q))
    }

    fn num<S: Scalar>(&self, value: &Num) -> Result<S> {
        self.number(value.get_ref(), value.span())
    }

    fn vector<S: Scalar>(&self, value: &Spanned<Vec<Number>>) -> Result<Vec<S>> {
        value.get_ref().iter().map(|x| self.number(x, value.span())).collect()
    }

    fn matrix<S: Scalar>(&self, rows: &[Vec<Number>], span: Range<usize>, size: usize) -> Result<Mat<S>> {
        if rows.len() != size || rows.iter().any(|r| r.len() != size) {
            return Err(self.error(span, format!("expected a {size}×{size} matrix")));
        }
        let parsed: Vec<Vec<S>> = rows
            .iter()
            .map(|r| r.iter().map(|x| self.number(x, span.clone())).collect::<Result<Vec<S>>>())
            .collect::<Result<_>>()?;
        Mat::from_rows(parsed).map_err(|e| self.locate(span, e))
    }

    fn required<'a, T>(&self, field: &'a Option<T>, name: &str, owner: Range<usize>) -> Result<&'a T> {
        field.as_ref().ok_or_else(|| self.error(owner, format!("missing field `{name}`")))
    }

    fn table<S: Scalar>(&self, entries: &[Spanned<RawEntry>], n: usize, size: usize) -> Result<PairTable<S>> {
        let mut table = PairTable::zeros(n, size);
        for entry in entries {
            let e = entry.get_ref();
            if e.i >= n || e.j >= n || e.i == e.j {
                return Err(self.error(entry.span(), format!("invalid frame pair ({}, {}) for dimension {n}", e.i, e.j)));
            }
            let m = self.matrix(e.matrix.get_ref(), e.matrix.span(), size)?;
            table.set(e.i, e.j, m);
        }
        Ok(table)
    }

    fn deriv_table<S: Scalar>(&self, entries: &[Spanned<RawEntry>], n: usize, size: usize) -> Result<DerivTable<S>> {
        let mut grouped: Vec<Vec<Spanned<RawEntry>>> = vec![Vec::new(); n];
        for entry in entries {
            match entry.get_ref().w {
                Some(w) if w < n => grouped[w].push(entry.clone()),
                _ => return Err(self.error(entry.span(), format!("entry needs a direction `w` below {n}"))),
            }
        }
        grouped.iter().map(|g| self.table(g, n, size)).collect()
    }

    fn second_deriv_table<S: Scalar>(&self, entries: &[Spanned<RawEntry>], n: usize) -> Result<SecondDerivTable<S>> {
        let mut grouped: Vec<Vec<Vec<Spanned<RawEntry>>>> = vec![vec![Vec::new(); n]; n];
        for entry in entries {
            match (entry.get_ref().v, entry.get_ref().w) {
                (Some(v), Some(w)) if v < n && w < n => grouped[v][w].push(entry.clone()),
                _ => return Err(self.error(entry.span(), format!("entry needs directions `v`, `w` below {n}"))),
            }
        }
        grouped.iter().map(|row| row.iter().map(|g| self.table(g, n, n)).collect()).collect()
    }

    fn brackets<S: Scalar>(&self, value: &Spanned<Vec<Vec<Vec<Number>>>>, shape: [usize; 3]) -> Result<Vec<Vec<Vec<S>>>> {
        let data = value.get_ref();
        let fits = data.len() == shape[0]
            && data.iter().all(|a| a.len() == shape[1] && a.iter().all(|b| b.len() == shape[2]));
        if !fits {
            return Err(self.error(value.span(), format!("expected a {}×{}×{} array", shape[0], shape[1], shape[2])));
        }
        data.iter()
            .map(|a| a.iter().map(|b| b.iter().map(|x| self.number(x, value.span())).collect()).collect())
            .collect()
    }

    fn base<S: Scalar>(&self, raw: &Spanned<RawBase>, validate: bool) -> Result<PointModel<S>> {
        let b = raw.get_ref();
        let span = raw.span();
        let model = match b.kind.get_ref().as_str() {
            "space-form" => PointModel::SpaceForm {
                dim: *self.required(&b.dim, "dim", span.clone())?.get_ref(),
                c: self.num(self.required(&b.c, "c", span.clone())?)?,
            },
            "flat" => PointModel::flat(*self.required(&b.dim, "dim", span.clone())?.get_ref()),
            "product" => {
                let factors = self.required(&b.factors, "factors", span.clone())?;
                PointModel::Product(factors.iter().map(|f| self.base(f, validate)).collect::<Result<_>>()?)
            }
            "complex-projective" => {
                let n = *self.required(&b.complex_dim, "complex_dim", span.clone())?.get_ref();
                PointModel::ComplexProjective { n, j: standard_complex_structure(n) }
            }
            "surface" => {
                let grad = self.required(&b.grad_c, "grad_c", span.clone())?;
                let grad_c = self.vector(grad)?;
                if grad_c.len() != 2 {
                    return Err(self.error(grad.span(), "grad_c must have 2 entries".into()));
                }
                let hess_c = b.hess_c.as_ref().map(|h| self.matrix(h.get_ref(), h.span(), 2)).transpose()?;
                PointModel::Surface2D(SurfaceData {
                    c: self.num(self.required(&b.c, "c", span.clone())?)?,
                    grad_c: TangentVec::new(grad_c),
                    hess_c,
                })
            }
            "unimodular3" => PointModel::Unimodular3(MilnorConstants::new(
                self.num(self.required(&b.m, "m", span.clone())?)?,
                self.num(self.required(&b.n, "n", span.clone())?)?,
                self.num(self.required(&b.p, "p", span.clone())?)?,
            )),
            "symmetric-space" => {
                let dim_p = *self.required(&b.dim_p, "dim_p", span.clone())?.get_ref();
                let dim_k = *self.required(&b.dim_k, "dim_k", span.clone())?.get_ref();
                PointModel::SymmetricSpace(SymmetricSpaceData {
                    dim_p,
                    dim_k,
                    pp: self.brackets(self.required(&b.pp, "pp", span.clone())?, [dim_p, dim_p, dim_k])?,
                    kp: self.brackets(self.required(&b.kp, "kp", span.clone())?, [dim_k, dim_p, dim_p])?,
                    kk: self.brackets(self.required(&b.kk, "kk", span.clone())?, [dim_k, dim_k, dim_k])?,
                })
            }
            "generic" => {
                let n = *self.required(&b.dim, "dim", span.clone())?.get_ref();
                let riemann = self.table(self.required(&b.riemann, "riemann", span.clone())?, n, n)?;
                let nabla = b.nabla.as_ref().map(|e| self.deriv_table(e, n, n)).transpose()?;
                let nabla2 = b.nabla2.as_ref().map(|e| self.second_deriv_table(e, n)).transpose()?;
                PointModel::Generic(GenericData { riemann, nabla, nabla2 })
            }
            other => return Err(self.error(b.kind.span(), format!("unknown base kind `{other}`"))),
        };
        if validate {
            model.validate(self.tolerance).map_err(|e| self.locate(span, e))?;
        }
        Ok(model)
    }

    fn bundle<S: Scalar>(&self, n: usize) -> Result<BundleKind<S>> {
        let raw = &self.raw.bundle;
        let b = raw.get_ref();
        let span = raw.span();
        Ok(match b.kind.get_ref().as_str() {
            "atiyah" => BundleKind::Atiyah { k: self.num(self.required(&b.k, "k", span.clone())?)? },
            "tangent" => BundleKind::Tangent,
            "generic" => {
                let weights = self.vector(self.required(&b.weights, "weights", span.clone())?)?;
                let size = weights.len();
                let curvature = self.table(self.required(&b.curvature, "curvature", span.clone())?, n, size)?;
                let derivative = b.derivative.as_ref().map(|e| self.deriv_table(e, n, size)).transpose()?;
                BundleKind::Generic(GenericBundle { weights, curvature, derivative })
            }
            other => return Err(self.error(b.kind.span(), format!("unknown bundle kind `{other}`"))),
        })
    }

    /// Builds the model with every number converted into the scalar type `S`.
    pub fn build<S: Scalar>(&self) -> Result<SphereBundleModel<S>> {
        let base = self.base::<S>(&self.raw.base, true)?;
        let bundle = self.bundle::<S>(base.dim())?;
        let r: S = self.num(&self.raw.r)?;
        let probe = SphereBundleModel { base, bundle, r: r.clone(), a: FiberVec::zeros(0), tol: self.tolerance };
        let m = probe.rank();
        let (a, span) = match &self.raw.a {
            Some(a) => (FiberVec::new(self.vector(a)?), a.span()),
            None => {
                let weight = probe.metric().weights.first().cloned().unwrap_or_else(S::one);
                let root = weight
                    .try_sqrt()
                    .ok_or_else(|| self.error(self.raw.r.span(), "default `a` needs a rational square root of the first fiber weight; give `a` explicitly".into()))?;
                (FiberVec::basis(m, 0).scale(&(r / root)), self.raw.r.span())
            }
        };
        SphereBundleModel::new(probe.base, probe.bundle, probe.r, a, self.tolerance).map_err(|e| {
            let at = match e {
                Error::OffSphere { .. } | Error::DimensionMismatch { .. } => span,
                _ => self.raw.bundle.span(),
            };
            self.locate(at, e)
        })
    }

    /// The base model without its structural checks, for auditing
    /// user-supplied tables.
    pub fn base_unchecked<S: Scalar>(&self) -> Result<PointModel<S>> {
        self.base(&self.raw.base, false)
    }

    /// Bound constants from the optional `[bounds]` table.
    pub fn bound_constants<S: Scalar>(&self) -> Result<BoundConstants<S>> {
        let Some(raw) = &self.raw.bounds else {
            return Ok(BoundConstants {
                sectional_lower: None,
                ricci_lower: None,
                curvature_bound: None,
                l1: None,
                l2: None,
                epsilon: None,
            });
        };
        let b = raw.get_ref();
        let get = |v: &Option<Num>| v.as_ref().map(|x| self.num::<S>(x)).transpose();
        Ok(BoundConstants {
            sectional_lower: get(&b.sectional_lower)?,
            ricci_lower: get(&b.ricci_lower)?,
            curvature_bound: get(&b.curvature_bound)?,
            l1: get(&b.l1)?,
            l2: get(&b.l2)?,
            epsilon: get(&b.epsilon)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational as q;

    const T_S2: &str = "mode = \"exact\"\nr = 1\n\n[base]\nkind = \"space-form\"\ndim = 2\nc = 1\n\n[bundle]\nkind = \"tangent\"\n";

    #[test]
    fn exact_document_builds_the_described_model() {
        let doc = ModelDocument::parse(T_S2).unwrap();
        assert_eq!(doc.mode, NumericMode::Exact);
        let model = doc.build::<Rational>().unwrap();
        assert_eq!(model.base, PointModel::SpaceForm { dim: 2, c: q(1, 1) });
        assert_eq!(model.a, FiberVec::new(vec![q(1, 1), q(0, 1)]));
        assert_eq!(model.point().unwrap().scalar(), q(3, 2));
    }

    #[test]
    fn fractions_and_decimals_are_read_exactly() {
        let text = "r = \"3/2\"\n[base]\nkind = \"space-form\"\ndim = 3\nc = 0.1\n[bundle]\nkind = \"atiyah\"\nk = \"1/3\"\n";
        let model = ModelDocument::parse(text).unwrap().build::<Rational>().unwrap();
        assert_eq!(model.r, q(3, 2));
        assert_eq!(model.base, PointModel::SpaceForm { dim: 3, c: q(1, 10) });
        assert_eq!(model.bundle, BundleKind::Atiyah { k: q(1, 3) });
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = ModelDocument::parse("r = 1\n[base\nkind = 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn semantic_errors_point_at_the_offending_value() {
        let text = "r = 1\n[base]\nkind = \"space-form\"\ndim = 2\nc = \"1/0\"\n[bundle]\nkind = \"tangent\"\n";
        let err = ModelDocument::parse(text).unwrap().build::<f64>().unwrap_err();
        assert_eq!(err, Error::Parse { line: 5, column: 5, message: "invalid number `1/0`: zero denominator".into() });

        let text = "r = 1\n[base]\nkind = \"sphere\"\n[bundle]\nkind = \"tangent\"\n";
        let err = ModelDocument::parse(text).unwrap().build::<f64>().unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, column: 8, .. }), "{err:?}");
    }

    #[test]
    fn off_sphere_evaluation_point_is_rejected_with_position() {
        let text = "r = 1\na = [1, 1]\n[base]\nkind = \"space-form\"\ndim = 2\nc = 1\n[bundle]\nkind = \"tangent\"\n";
        let err = ModelDocument::parse(text).unwrap().build::<Rational>().unwrap_err();
        assert!(matches!(&err, Error::Parse { line: 2, message, .. } if message.contains("not on the sphere")), "{err:?}");
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let err = ModelDocument::parse("r = 1\nradius = 2\n[base]\nkind = \"flat\"\ndim = 2\n[bundle]\nkind = \"tangent\"\n")
            .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err:?}");
    }

    #[test]
    fn generic_tables_are_assembled_antisymmetrically() {
        let text = r#"
r = 1
[base]
kind = "generic"
dim = 2
riemann = [{ i = 0, j = 1, matrix = [[0, -1], [1, 0]] }]
nabla = [{ w = 0, i = 0, j = 1, matrix = [[0, 0], [0, 0]] }, { w = 1, i = 0, j = 1, matrix = [[0, 0], [0, 0]] }]
[bundle]
kind = "tangent"
"#;
        let model = ModelDocument::parse(text).unwrap().build::<Rational>().unwrap();
        let PointModel::Generic(g) = &model.base else { panic!("generic base expected") };
        assert_eq!(g.riemann.get(1, 0), &g.riemann.get(0, 1).neg());
        assert_eq!(model.point().unwrap().scalar(), q(3, 2));
    }

    #[test]
    fn default_point_needs_a_rational_root_in_exact_mode() {
        let text = "r = 1\n[base]\nkind = \"flat\"\ndim = 2\n[bundle]\nkind = \"generic\"\nweights = [2, 1]\ncurvature = []\n";
        let doc = ModelDocument::parse(text).unwrap();
        assert!(doc.build::<f64>().is_ok());
        assert!(matches!(doc.build::<Rational>(), Err(Error::Parse { line: 1, .. })));
    }
}
