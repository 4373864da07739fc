//! Parameter scans written as CSV: Milnor-frame grids and sweeps of the
//! positivity bounds over `k` and `r`.
//!
//! Grid files are TOML:
//!
//! ```toml
//! kind = "milnor"
//! m = { start = "-1/2", end = "1/2", step = "1/4" }
//! n = ["1/3"]
//! p = [0]
//! # or: tuples = [["1/2", "1/3", "1/4"]]
//! ```
//!
//! ```toml
//! kind = "k-sweep"
//! model = "atiyah-space-form.toml"   # relative to the grid file
//! k = { start = "1/20", end = 2, step = "1/20" }
//! r = ["1/2", 1]                      # optional: evaluate the predicates at these radii
//! ```

use std::io::Write;
use std::ops::Range;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;
use toml::Spanned;

use crate::document::{position, toml_error, ModelDocument, Number};
use crate::error::{Error, Result};
use crate::report::render;
use crate::scalar::{format_float, Rational};
use crate::sphere_bundle::{bound_holds, positivity_bounds_for, BundleKind, SphereBundleModel};
use crate::unimodular3::{scan_parameters, MilnorConstants, MilnorGrid, ParamRange, ScanReport};

#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
enum RawRange {
    Stepped { start: Number, end: Number, step: Number },
    Values(Vec<Number>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    kind: Spanned<String>,
    m: Option<Spanned<RawRange>>,
    n: Option<Spanned<RawRange>>,
    p: Option<Spanned<RawRange>>,
    tuples: Option<Spanned<Vec<Vec<Number>>>>,
    model: Option<Spanned<String>>,
    k: Option<Spanned<RawRange>>,
    r: Option<Spanned<RawRange>>,
}

#[derive(Clone, Debug)]
pub enum GridSpec {
    Milnor(MilnorGrid),
    KSweep {
        model: ModelDocument,
        k: Vec<Rational>,
        r: Option<Vec<Rational>>,
    },
}

struct GridSource<'a> {
    text: &'a str,
}

impl GridSource<'_> {
    fn error(&self, span: Range<usize>, message: String) -> Error {
        let (line, column) = position(self.text, span.start);
        Error::Parse { line, column, message }
    }

    fn number(&self, n: &Number, span: Range<usize>) -> Result<Rational> {
        n.rational().map_err(|m| self.error(span, m))
    }

    fn range(&self, raw: &Spanned<RawRange>) -> Result<ParamRange> {
        let span = raw.span();
        Ok(match raw.get_ref() {
            RawRange::Values(v) => {
                ParamRange::Values(v.iter().map(|x| self.number(x, span.clone())).collect::<Result<_>>()?)
            }
            RawRange::Stepped { start, end, step } => ParamRange::Stepped {
                start: self.number(start, span.clone())?,
                end: self.number(end, span.clone())?,
                step: self.number(step, span.clone())?,
            },
        })
    }

    fn values(&self, raw: &Spanned<RawRange>) -> Result<Vec<Rational>> {
        self.range(raw)?.values().map_err(|e| self.error(raw.span(), e.to_string()))
    }
}

impl GridSpec {
    /// Parses a grid file; `dir` resolves relative model paths.
    pub fn parse(text: &str, dir: &Path) -> Result<Self> {
        let raw: RawGrid = toml::from_str(text).map_err(|e| toml_error(text, e))?;
        let src = GridSource { text };
        let missing = |name: &str| src.error(raw.kind.span(), format!("missing field `{name}`"));
        match raw.kind.get_ref().as_str() {
            "milnor" => {
                if let Some(tuples) = &raw.tuples {
                    let parsed = tuples
                        .get_ref()
                        .iter()
                        .map(|t| {
                            if t.len() != 3 {
                                return Err(src.error(tuples.span(), "each tuple needs three entries (m, n, p)".into()));
                            }
                            let q = |i: usize| src.number(&t[i], tuples.span());
                            Ok(MilnorConstants::new(q(0)?, q(1)?, q(2)?))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    return Ok(GridSpec::Milnor(MilnorGrid::Tuples(parsed)));
                }
                let get = |r: &Option<Spanned<RawRange>>, name: &str| {
                    r.as_ref().map(|x| src.range(x)).transpose()?.ok_or_else(|| missing(name))
                };
                Ok(GridSpec::Milnor(MilnorGrid::Product { m: get(&raw.m, "m")?, n: get(&raw.n, "n")?, p: get(&raw.p, "p")? }))
            }
            "k-sweep" => {
                let path = raw.model.as_ref().ok_or_else(|| missing("model"))?;
                let full: PathBuf = dir.join(path.get_ref());
                let model = ModelDocument::from_path(&full).map_err(|e| match e {
                    Error::Io(m) => src.error(path.span(), m),
                    other => other,
                })?;
                if model.bundle_kind() != "atiyah" {
                    return Err(src.error(path.span(), "k-sweep needs an atiyah model".into()));
                }
                let k = src.values(raw.k.as_ref().ok_or_else(|| missing("k"))?)?;
                let r = raw.r.as_ref().map(|r| src.values(r)).transpose()?;
                Ok(GridSpec::KSweep { model, k, r })
            }
            other => Err(src.error(raw.kind.span(), format!("unknown grid kind `{other}` (expected milnor or k-sweep)"))),
        }
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }
}

/// CSV text of a Milnor scan.
pub fn milnor_csv(report: &ScanReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["m", "n", "p", "mu12", "mu13", "mu23", "lambda1", "lambda2", "lambda3", "verdict"]).map_err(io)?;
    for row in &report.rows {
        let c = &row.constants;
        let mut record: Vec<String> = [&row.params.m, &row.params.n, &row.params.p].iter().map(|x| render(*x)).collect();
        record.extend([&c.mu12, &c.mu13, &c.mu23, &c.lambda1, &c.lambda2, &c.lambda3].iter().map(|x| render(*x)));
        record.push(row.positive.to_string());
        w.write_record(&record).map_err(io)?;
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn with_k(model: &SphereBundleModel<Rational>, k: &Rational) -> SphereBundleModel<Rational> {
    SphereBundleModel { bundle: BundleKind::Atiyah { k: k.clone() }, ..model.clone() }
}

fn optional_float(x: Option<f64>) -> String {
    x.map(format_float).unwrap_or_default()
}

/// Rows of a bound sweep, one per `(k, kind)` or per `(k, r, kind)`.
pub fn k_sweep_csv(model: &ModelDocument, ks: &[Rational], radii: Option<&[Rational]>) -> Result<String> {
    if ks.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let base = model.build::<Rational>()?;
    let constants = model.bound_constants::<Rational>()?;
    let (n, m) = (base.base.dim(), base.rank());
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_writer(Vec::new());
    let blocks: Vec<Vec<Vec<String>>> = ks
        .par_iter()
        .map(|k| {
            let model = with_k(&base, k);
            let report = positivity_bounds_for(&model, &constants, &[])?;
            match radii {
                None => Ok(report
                    .ranges
                    .iter()
                    .map(|range| {
                        vec![
                            render(k),
                            range.kind.name().to_string(),
                            (!range.empty).to_string(),
                            optional_float(range.r_squared_max),
                            optional_float(range.r_max),
                            range.inclusive.to_string(),
                            range.note.clone().unwrap_or_default(),
                        ]
                    })
                    .collect()),
                Some(radii) => {
                    let mut filled = constants.clone();
                    filled.sectional_lower = filled.sectional_lower.or_else(|| model.base.k_lower_bound());
                    filled.curvature_bound = filled
                        .curvature_bound
                        .or_else(|| model.atiyah_spec().and_then(|s| crate::atiyah::supra_bound(&s).ok()));
                    let mut rows = Vec::new();
                    for r in radii {
                        for range in &report.ranges {
                            let holds = bound_holds(range.kind, n, m, &filled, r)?;
                            rows.push(vec![render(k), render(r), range.kind.name().to_string(), holds.to_string()]);
                        }
                    }
                    Ok(rows)
                }
            }
        })
        .collect::<Result<_>>()?;
    let header: &[&str] = match radii {
        None => &["k", "bound", "satisfiable", "r_squared_max", "r_max", "inclusive", "note"],
        Some(_) => &["k", "r", "bound", "holds"],
    };
    w.write_record(header).map_err(io)?;
    for row in blocks.into_iter().flatten() {
        w.write_record(&row).map_err(io)?;
    }
    finish(w)
}

/// Runs a scan and returns its CSV text.
pub fn run_scan(spec: &GridSpec) -> Result<String> {
    match spec {
        GridSpec::Milnor(grid) => milnor_csv(&scan_parameters(grid)?),
        GridSpec::KSweep { model, k, r } => k_sweep_csv(model, k, r.as_deref()),
    }
}

/// Runs a scan and writes the CSV to `out`.
pub fn scan_to_file(spec: &GridSpec, out: &Path) -> Result<usize> {
    let text = run_scan(spec)?;
    let mut file = std::fs::File::create(out).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
    file.write_all(text.as_bytes()).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
    Ok(text.lines().count().saturating_sub(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rational as q;

    fn models_dir() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("models")
    }

    #[test]
    fn case_list_grid_gives_five_positive_rows() {
        let text = r#"
kind = "milnor"
tuples = [["1/2", "1/3", "1/4"], ["1/2", "1/3", "-1/4"], ["1/2", "1/3", 0], ["1/2", "1/3", 0], ["1/2", "-1/3", 0]]
"#;
        let csv = run_scan(&GridSpec::parse(text, Path::new(".")).unwrap()).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "m,n,p,mu12,mu13,mu23,lambda1,lambda2,lambda3,verdict");
        assert_eq!(lines.len(), 6);
        assert!(lines[1..].iter().all(|l| l.ends_with(",true")));
        assert!(csv.contains("1/2,1/3,1/4,"));
        assert!(csv.contains("-543127/165888,-545675/165888,-542035/165888,true"));
    }

    #[test]
    fn stepped_grid_is_exhaustive_and_sorted() {
        let text = "kind = \"milnor\"\nm = { start = \"-1/2\", end = \"1/2\", step = \"1/4\" }\nn = [0, 1]\np = [\"1/3\"]\n";
        let csv = run_scan(&GridSpec::parse(text, Path::new(".")).unwrap()).unwrap();
        let rows: Vec<&str> = csv.lines().skip(1).collect();
        assert_eq!(rows.len(), 10);
        assert!(rows[0].starts_with("-1/2,0/1,1/3,"));
        assert!(rows[9].starts_with("1/2,1/1,1/3,"));
    }

    #[test]
    fn empty_grid_is_an_error() {
        let text = "kind = \"milnor\"\nm = []\nn = [0]\np = [0]\n";
        assert_eq!(run_scan(&GridSpec::parse(text, Path::new(".")).unwrap()), Err(Error::EmptyGrid));
    }

    #[test]
    fn grid_errors_are_positioned() {
        let err = GridSpec::parse("kind = \"milnor\"\nm = [\"1/0\"]\nn = [0]\np = [0]\n", Path::new(".")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, column: 5, .. }), "{err:?}");
        let err = GridSpec::parse("kind = \"lattice\"\n", Path::new(".")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, column: 8, .. }), "{err:?}");
    }

    #[test]
    fn sectional_range_widens_as_k_approaches_two() {
        let text = "kind = \"k-sweep\"\nmodel = \"atiyah-space-form.toml\"\nk = { start = \"1\", end = \"2\", step = \"1/4\" }\n";
        let csv = run_scan(&GridSpec::parse(text, &models_dir()).unwrap()).unwrap();
        let sectional: Vec<f64> = csv
            .lines()
            .filter(|l| l.contains(",sectional,"))
            .map(|l| l.split(',').nth(3).unwrap().parse::<f64>().unwrap_or(f64::INFINITY))
            .collect();
        assert_eq!(sectional.len(), 5);
        assert!(sectional.windows(2).all(|w| w[0] <= w[1]), "{sectional:?}");
    }

    #[test]
    fn radius_sweep_evaluates_each_predicate() {
        let doc = ModelDocument::from_path(&models_dir().join("atiyah-space-form.toml")).unwrap();
        let csv = k_sweep_csv(&doc, &[q(2, 1)], Some(&[q(1, 2), q(10, 1)])).unwrap();
        assert!(csv.starts_with("k,r,bound,holds\n"));
        assert!(csv.contains("2/1,1/2,sectional,true"));
    }
}
