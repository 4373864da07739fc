//! Built-in model documents, one per model class; the same files ship in
//! `models/`.

use crate::document::ModelDocument;
use crate::error::Result;
use crate::sphere_bundle::SphereBundleModel;

pub const BUILTIN: &[(&str, &str)] = &[
    ("tangent-sphere", include_str!("../models/tangent-sphere.toml")),
    ("atiyah-sphere", include_str!("../models/atiyah-sphere.toml")),
    ("atiyah-space-form", include_str!("../models/atiyah-space-form.toml")),
    ("product", include_str!("../models/product.toml")),
    ("symmetric-space", include_str!("../models/symmetric-space.toml")),
    ("complex-projective", include_str!("../models/complex-projective.toml")),
    ("surface", include_str!("../models/surface.toml")),
    ("unimodular3", include_str!("../models/unimodular3.toml")),
    ("generic", include_str!("../models/generic.toml")),
];

pub fn builtin_documents() -> Result<Vec<(&'static str, ModelDocument)>> {
    BUILTIN.iter().map(|(name, text)| Ok((*name, ModelDocument::parse(text)?))).collect()
}

/// Every built-in model in float mode.
pub fn builtin_float_models() -> Result<Vec<(&'static str, SphereBundleModel<f64>)>> {
    builtin_documents()?.into_iter().map(|(name, doc)| Ok((name, doc.build::<f64>()?))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::NumericMode;
    use crate::scalar::Rational;

    #[test]
    fn every_builtin_document_builds_in_its_own_mode_and_in_float() {
        for (name, doc) in builtin_documents().unwrap() {
            let float = doc.build::<f64>().unwrap_or_else(|e| panic!("{name}: {e}"));
            float.point().unwrap_or_else(|e| panic!("{name}: {e}"));
            if doc.mode == NumericMode::Exact {
                let exact = doc.build::<Rational>().unwrap_or_else(|e| panic!("{name}: {e}"));
                exact.point().unwrap_or_else(|e| panic!("{name}: {e}"));
            }
        }
    }

    #[test]
    fn builtins_cover_every_base_and_bundle_class() {
        let docs = builtin_documents().unwrap();
        for kind in ["space-form", "product", "symmetric-space", "complex-projective", "surface", "unimodular3", "generic"] {
            assert!(docs.iter().any(|(_, d)| d.base_kind() == kind), "{kind}");
        }
        for kind in ["atiyah", "tangent", "generic"] {
            assert!(docs.iter().any(|(_, d)| d.bundle_kind() == kind), "{kind}");
        }
    }
}
