//! Curvature of sphere bundles of Euclidean vector bundles with the Sasaki
//! metric, evaluated pointwise over a library of base geometries.

pub mod algebra;
pub mod atiyah;
pub mod base_geometry;
pub mod catalog;
pub mod document;
pub mod error;
pub mod report;
pub mod scan;
pub mod scalar;
pub mod sphere_bundle;
pub mod tables;
pub mod unimodular3;
pub mod verify;

pub use error::{Error, Result};
