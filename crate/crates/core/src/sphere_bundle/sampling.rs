//! Seeded random planes and fiber points (float mode).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::{BundlePoint, PlaneSpec, TangentDir};
use crate::algebra::{FiberVec, TangentVec};
use crate::error::Result;

/// Generator for sample `stream`; each sample owns its stream so results do
/// not depend on scheduling.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn gaussian(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

/// Uniformly distributed point of the fiber sphere of radius `r`.
pub fn random_fiber_point(point: &BundlePoint<f64>, rng: &mut impl Rng) -> FiberVec<f64> {
    let r = point.radius_sq.sqrt();
    loop {
        let g = gaussian(rng, point.m);
        let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            let unit: Vec<f64> = g.iter().map(|x| r * x / norm).collect();
            return point.metric.from_orthonormal(&unit);
        }
    }
}

fn random_direction(point: &BundlePoint<f64>, rng: &mut impl Rng) -> TangentDir<f64> {
    let x = TangentVec::new(gaussian(rng, point.n));
    let alpha = point.metric.from_orthonormal(&gaussian(rng, point.m));
    TangentDir::new(x, point.tangential(&alpha))
}

/// Gaussian pair of tangent vectors at the point (not normalized).
pub fn random_plane(point: &BundlePoint<f64>, rng: &mut impl Rng) -> PlaneSpec<f64> {
    let first = random_direction(point, rng);
    let second = random_direction(point, rng);
    PlaneSpec::new(first, second)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SectionalSummary {
    pub samples: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub argmin: usize,
    pub argmax: usize,
}

/// Sectional curvature over `samples` random planes; with `vary_point` each
/// sample also draws a fresh point of the fiber sphere.
pub fn sample_sectional(point: &BundlePoint<f64>, samples: usize, seed: u64, vary_point: bool) -> Result<SectionalSummary> {
    let values = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeded_rng(seed, i as u64);
            let local = if vary_point {
                point.at_fiber(random_fiber_point(point, &mut rng))?
            } else {
                point.clone()
            };
            let plane = random_plane(&local, &mut rng);
            local.sectional(&plane)
        })
        .collect::<Result<Vec<f64>>>()?;
    let mut summary = SectionalSummary {
        samples,
        min: f64::INFINITY,
        max: f64::NEG_INFINITY,
        mean: 0.0,
        argmin: 0,
        argmax: 0,
    };
    for (i, v) in values.iter().enumerate() {
        if *v < summary.min {
            summary.min = *v;
            summary.argmin = i;
        }
        if *v > summary.max {
            summary.max = *v;
            summary.argmax = i;
        }
    }
    summary.mean = values.iter().sum::<f64>() / samples.max(1) as f64;
    Ok(summary)
}
