use super::*;
use crate::algebra::{atiyah_rank, wedge, AtiyahFiber};
use crate::atiyah::{supra_curvature, varpi_space_form};
use crate::base_geometry::{standard_complex_structure, SurfaceData};
use crate::scalar::{rational, Rational};
use crate::unimodular3::MilnorConstants;

fn sphere(dim: usize, c: f64) -> PointModel<f64> {
    PointModel::SpaceForm { dim, c }
}

fn float_models() -> Vec<SphereBundleModel<f64>> {
    let tol = 1e-10;
    let surface = PointModel::Surface2D(SurfaceData {
        c: 0.7,
        grad_c: TangentVec::new(vec![0.3, -0.2]),
        hess_c: Some(Mat::from_rows(vec![vec![0.1, 0.05], vec![0.05, -0.4]]).unwrap()),
    });
    let product = PointModel::Product(vec![sphere(2, 1.0), sphere(1, 0.0)]);
    let cp = PointModel::ComplexProjective { n: 2, j: standard_complex_structure(2) };
    let milnor = PointModel::Unimodular3(MilnorConstants { m: 0.5, n: 1.0 / 3.0, p: 0.25 });
    vec![
        SphereBundleModel::tangent_at_first_axis(sphere(2, 1.0), 1.0, tol).unwrap(),
        SphereBundleModel::atiyah_at_first_axis(sphere(3, 1.0), 1.0, 1.0, tol).unwrap(),
        SphereBundleModel::atiyah_at_first_axis(surface, 0.8, 1.3, tol).unwrap(),
        SphereBundleModel::atiyah_at_first_axis(product, 0.5, 0.9, tol).unwrap(),
        SphereBundleModel::tangent_at_first_axis(cp, 1.2, tol).unwrap(),
        SphereBundleModel::tangent_at_first_axis(milnor.clone(), 1.0, tol).unwrap(),
        SphereBundleModel::atiyah_at_first_axis(milnor, 1.5, 0.7, tol).unwrap(),
    ]
}

fn random_point(model: &SphereBundleModel<f64>, stream: u64) -> BundlePoint<f64> {
    let point = model.point().unwrap();
    let mut rng = seeded_rng(7, stream);
    let a = random_fiber_point(&point, &mut rng);
    point.at_fiber(a).unwrap()
}

#[test]
fn unit_tangent_bundle_of_round_sphere_exact_scalar() {
    let model = SphereBundleModel::tangent_at_first_axis(
        PointModel::SpaceForm { dim: 2, c: rational(1, 1) },
        rational(1, 1),
        0.0,
    )
    .unwrap();
    let point = model.point().unwrap();
    assert_eq!(point.scalar(), rational(3, 2));
    let horizontal = PlaneSpec::new(
        TangentDir::horizontal(TangentVec::basis(2, 0), 2),
        TangentDir::horizontal(TangentVec::basis(2, 1), 2),
    );
    assert_eq!(point.sectional(&horizontal).unwrap(), rational(1, 4));
    let mixed = PlaneSpec::new(
        TangentDir::vertical(2, FiberVec::basis(2, 1)),
        TangentDir::horizontal(TangentVec::basis(2, 0), 2),
    );
    assert_eq!(point.sectional(&mixed).unwrap(), rational(1, 4));
}

#[test]
fn unit_tangent_bundle_of_round_sphere_is_a_quarter_everywhere() {
    let model = SphereBundleModel::tangent_at_first_axis(sphere(2, 1.0), 1.0, 1e-12).unwrap();
    let summary = sample_sectional(&model.point().unwrap(), 300, 11, true).unwrap();
    assert!((summary.min - 0.25).abs() < 1e-10, "{summary:?}");
    assert!((summary.max - 0.25).abs() < 1e-10, "{summary:?}");
}

#[test]
fn mixed_shape_tensor_of_tangent_bundle() {
    let model = SphereBundleModel::tangent_at_first_axis(sphere(2, 1.0), 1.0, 1e-12).unwrap();
    let point = random_point(&model, 3);
    let mut rng = seeded_rng(1, 2);
    let plane = random_plane(&point, &mut rng);
    let x = plane.first.x.clone();
    let alpha = plane.second.alpha.clone();
    let got = point.oneill_b_mixed(&x, &alpha).unwrap();
    let base = model.base.clone();
    let rax = base
        .riemann(&TangentVec::new(alpha.coords.clone()), &TangentVec::new(point.a.coords.clone()), &x)
        .unwrap();
    for i in 0..2 {
        assert!((got.coords[i] - 0.5 * rax.coords[i]).abs() < 1e-12);
    }
}

#[test]
fn horizontal_shape_tensor_is_half_the_supra_curvature() {
    let model = SphereBundleModel::atiyah_at_first_axis(sphere(3, 1.0), 1.0, 1.0, 1e-12).unwrap();
    let point = random_point(&model, 5);
    let (e1, e2) = (TangentVec::basis(3, 0), TangentVec::basis(3, 1));
    let got = point.oneill_b(&e1, &e2).unwrap();
    let spec = model.atiyah_spec().unwrap();
    let full = supra_curvature(&spec, &e1, &e2, &point.a).unwrap();
    let varpi = varpi_space_form(&1.0, &1.0);
    let closed = AtiyahFiber::from_flat(3, &point.a).unwrap();
    let wedge12 = wedge(&e1, &e2).unwrap();
    let z = wedge12.apply(&closed.tangent).scale(&(-2.0 * varpi));
    for u in 0..6 {
        assert!((got.coords[u] - 0.5 * full.coords[u]).abs() < 1e-12);
    }
    for i in 0..3 {
        assert!((full.coords[i] - z.coords[i]).abs() < 1e-12);
    }
}

#[test]
fn vertical_plane_has_curvature_inverse_radius_squared() {
    for model in float_models().into_iter().filter(|m| m.rank() >= 3) {
        let point = random_point(&model, 9);
        let frame = point.tangent_frame();
        let vertical: Vec<&TangentDir<f64>> = frame.iter().filter(|e| e.x.is_zero()).collect();
        let plane = PlaneSpec::new(vertical[0].clone(), vertical[1].clone());
        let k = point.sectional(&plane).unwrap();
        assert!((k - 1.0 / point.radius_sq).abs() < 1e-10, "{k}");
    }
}

#[test]
fn flat_bundle_is_locally_a_product() {
    // c = 2/k makes the supra-curvature vanish.
    let model = SphereBundleModel::atiyah_at_first_axis(sphere(3, 2.0), 1.0, 0.8, 1e-12).unwrap();
    let point = random_point(&model, 1);
    assert!(point.curvature.max_abs() < 1e-14);
    let mut rng = seeded_rng(3, 0);
    for _ in 0..20 {
        let plane = random_plane(&point, &mut rng);
        let horizontal = PlaneSpec::new(
            TangentDir::horizontal(plane.first.x.clone(), point.m),
            TangentDir::horizontal(plane.second.x.clone(), point.m),
        );
        assert!((point.sectional(&horizontal).unwrap() - 2.0).abs() < 1e-10);
        let mixed = PlaneSpec::new(
            TangentDir::horizontal(plane.first.x.clone(), point.m),
            TangentDir::vertical(3, plane.second.alpha.clone()),
        );
        assert!(point.sectional(&mixed).unwrap().abs() < 1e-10);
    }
}

#[test]
fn trace_of_ricci_is_the_scalar_curvature() {
    for model in float_models() {
        for stream in 0..5 {
            let point = random_point(&model, stream);
            let trace = point.ricci_trace().unwrap();
            let tau = point.scalar();
            assert!((trace - tau).abs() < 1e-8, "{} {} vs {}", model.base.kind(), trace, tau);
        }
    }
}

#[test]
fn trace_identity_holds_exactly() {
    let base = PointModel::SpaceForm { dim: 3, c: rational(1, 1) };
    let k = rational(1, 1);
    let m = atiyah_rank(3);
    let mut a = FiberVec::zeros(m);
    a.coords[0] = rational(3, 5);
    a.coords[1] = rational(4, 5);
    let model = SphereBundleModel::new(base, BundleKind::Atiyah { k }, rational(1, 1), a, 0.0).unwrap();
    let point = model.point().unwrap();
    assert_eq!(point.ricci_trace().unwrap(), point.scalar());
}

#[test]
fn ricci_is_symmetric_and_xi_is_nonnegative() {
    for model in float_models() {
        let point = random_point(&model, 4);
        let mut rng = seeded_rng(2, 8);
        for _ in 0..10 {
            let plane = random_plane(&point, &mut rng);
            let uv = point.ricci(&plane.first, &plane.second).unwrap();
            let vu = point.ricci(&plane.second, &plane.first).unwrap();
            assert!((uv - vu).abs() < 1e-10 * uv.abs().max(1.0));
            let b = plane.first.alpha.clone();
            assert!(point.xi_form(&b, &b).unwrap() >= -1e-12);
        }
    }
}

#[test]
fn rank_two_branch_agrees_with_general_branch_when_beta_vanishes() {
    for model in float_models().into_iter().filter(|m| m.rank() >= 3) {
        let point = random_point(&model, 6);
        let mut rng = seeded_rng(5, 1);
        let raw = random_plane(&point, &mut rng);
        let (mut x, mut y) = (raw.first.x.clone(), raw.second.x.clone());
        y = y.scale(&(1.0 / y.norm_sq().sqrt()));
        x = x.sub(&y.scale(&x.dot(&y)));
        let alpha = raw.first.alpha.clone();
        let total = x.norm_sq() + point.metric.norm_sq(&alpha);
        let s = 1.0 / total.sqrt();
        let plane = PlaneSpec::new(
            TangentDir::new(x.scale(&s), alpha.scale(&s)),
            TangentDir::horizontal(y, point.m),
        );
        assert!(plane.is_normalized(&point, 1e-12));
        let general = sectional_higher_rank(&point, &plane).unwrap();
        let two = sectional_rank_two(&point, &plane).unwrap();
        assert!((general - two).abs() < 1e-10, "{} {general} {two}", model.base.kind());
    }
}

#[test]
fn sectional_curvature_does_not_depend_on_the_basis() {
    for model in float_models() {
        let point = random_point(&model, 2);
        let mut rng = seeded_rng(4, 4);
        for _ in 0..20 {
            let plane = random_plane(&point, &mut rng);
            let k1 = point.sectional(&plane).unwrap();
            let (c, s) = (0.3_f64.cos() * 2.0, 0.3_f64.sin() * 2.0);
            let rotated = PlaneSpec::new(
                plane.first.scale(&c).add(&plane.second.scale(&s)),
                plane.first.scale(&(-0.5)).add(&plane.second.scale(&1.7)),
            );
            let k2 = point.sectional(&rotated).unwrap();
            assert!((k1 - k2).abs() < 1e-8, "{} {k1} {k2}", model.base.kind());
        }
    }
}

#[test]
fn normalization_satisfies_the_relations_and_keeps_the_span() {
    for model in float_models() {
        let point = random_point(&model, 12);
        let mut rng = seeded_rng(6, 6);
        for _ in 0..10 {
            let raw = random_plane(&point, &mut rng);
            let plane = normalize_plane(&point, &raw).unwrap();
            assert!(plane.is_normalized(&point, 1e-10));
            let (u, v) = (&raw.first, &raw.second);
            let gram = [[point.h(u, u), point.h(u, v)], [point.h(v, u), point.h(v, v)]];
            let det = gram[0][0] * gram[1][1] - gram[0][1] * gram[1][0];
            for w in [&plane.first, &plane.second] {
                let (b0, b1) = (point.h(w, u), point.h(w, v));
                let c0 = (gram[1][1] * b0 - gram[0][1] * b1) / det;
                let c1 = (gram[0][0] * b1 - gram[1][0] * b0) / det;
                let residual = w.add(&u.scale(&-c0)).add(&v.scale(&-c1));
                assert!(point.h(&residual, &residual) < 1e-18);
            }
        }
    }
}

#[test]
fn normalization_of_a_horizontal_pair() {
    let model = SphereBundleModel::tangent_at_first_axis(sphere(2, 1.0), 1.0, 1e-12).unwrap();
    let point = model.point().unwrap();
    let raw = PlaneSpec::new(
        TangentDir::horizontal(TangentVec::new(vec![1.0, 0.0]), 2),
        TangentDir::horizontal(TangentVec::new(vec![1.0, 1.0]), 2),
    );
    let plane = normalize_plane(&point, &raw).unwrap();
    assert!(plane.is_normalized(&point, 1e-12));
    assert!(plane.first.alpha.is_zero() && plane.second.alpha.is_zero());
}

#[test]
fn exact_normalization_needs_rational_roots() {
    let base = PointModel::SpaceForm { dim: 2, c: rational(1, 1) };
    let model = SphereBundleModel::tangent_at_first_axis(base, rational(1, 1), 0.0).unwrap();
    let point = model.point().unwrap();
    let scaled = PlaneSpec::new(
        TangentDir::horizontal(TangentVec::new(vec![rational(3, 1), rational(0, 1)]), 2),
        TangentDir::horizontal(TangentVec::new(vec![rational(0, 1), rational(5, 1)]), 2),
    );
    assert_eq!(point.sectional(&scaled).unwrap(), rational(1, 4));
    let skewed = PlaneSpec::new(
        TangentDir::horizontal(TangentVec::new(vec![rational(1, 1), rational(1, 1)]), 2),
        TangentDir::horizontal(TangentVec::new(vec![rational(1, 1), rational(0, 1)]), 2),
    );
    assert!(matches!(point.sectional(&skewed), Err(Error::Unsupported(_))));
}

#[test]
fn off_sphere_and_non_tangent_inputs_are_rejected() {
    let base = sphere(2, 1.0);
    let bad = SphereBundleModel::new(base.clone(), BundleKind::Tangent, 1.0, FiberVec::new(vec![2.0, 0.0]), 1e-12);
    assert!(matches!(bad, Err(Error::OffSphere { .. })));
    let model = SphereBundleModel::tangent_at_first_axis(base, 1.0, 1e-12).unwrap();
    let point = model.point().unwrap();
    let u = TangentDir::vertical(2, FiberVec::new(vec![1.0, 0.0]));
    assert!(matches!(point.ricci(&u, &u), Err(Error::NotTangent { index: 0 })));
}

#[test]
fn flat_bundle_ricci_splits() {
    let model = SphereBundleModel::atiyah_at_first_axis(sphere(3, 2.0), 1.0, 0.8, 1e-12).unwrap();
    let point = random_point(&model, 10);
    let frame = point.tangent_frame();
    for e in &frame {
        let ric = point.ricci(e, e).unwrap();
        let expected = if e.x.is_zero() { (point.m as f64 - 2.0) / point.radius_sq } else { 4.0 };
        assert!((ric - expected).abs() < 1e-10);
    }
    // Mixed entries vanish on a locally symmetric base with R^E = 0.
    assert!(point.ricci(&frame[0], &frame[4]).unwrap().abs() < 1e-12);
}

#[test]
fn xi_of_space_form_atiyah_bundle_matches_closed_form() {
    for (n, c, k) in [(2, 1.0, 1.0), (3, 0.5, 1.0), (4, -1.0, 0.5)] {
        let model = SphereBundleModel::atiyah_at_first_axis(sphere(n, c), k, 1.0, 1e-12).unwrap();
        let point = random_point(&model, 13);
        let varpi = varpi_space_form(&c, &k);
        let fiber = AtiyahFiber::from_flat(n, &point.a).unwrap();
        let f_norm = -2.0 * k * fiber.skew.trace_product(&fiber.skew) / 2.0;
        let total = point.metric.norm_sq(&point.a);
        let expected = 8.0 * varpi * varpi * (n as f64 - 1.0) * total + 8.0 * varpi * varpi * (n as f64 - 3.0) * f_norm;
        let got = point.xi_form(&point.a, &point.a).unwrap();
        assert!((got - expected).abs() < 1e-10, "n={n}: {got} vs {expected}");
    }
}

#[test]
fn einstein_space_form_bundles() {
    for (p, k) in [(2usize, 1.0_f64), (2, 2.0), (3, 1.0), (3, 2.0)] {
        let m = atiyah_rank(p) as f64;
        let lambda = 2.0 * (p as f64 - 1.0) / k;
        let r = ((m - 2.0) / lambda).sqrt();
        let model = SphereBundleModel::atiyah_at_first_axis(sphere(p, 2.0 / k), k, r, 1e-10).unwrap();
        let point = model.point().unwrap();
        let verdict = einstein_check(&point, 1e-9).unwrap();
        assert!(verdict.einstein);
        assert_eq!(verdict.route, EinsteinRoute::Analytic);
        assert!((verdict.lambda - lambda).abs() < 1e-10);
        let frame = einstein_check_frame(&point, 1e-9).unwrap();
        assert!(frame.einstein);
        assert!((frame.lambda - lambda).abs() < 1e-10);
    }
}

#[test]
fn einstein_fails_over_flat_base_with_witness() {
    let model = SphereBundleModel::atiyah_at_first_axis(
        PointModel::SpaceForm { dim: 3, c: rational(0, 1) },
        rational(1, 1),
        rational(1, 1),
        0.0,
    )
    .unwrap();
    let point = model.point().unwrap();
    let verdict = einstein_check(&point, 0.0).unwrap();
    assert!(!verdict.einstein);
    let w = verdict.witness.unwrap();
    assert_ne!(w.first_ratio, w.second_ratio);
    let check = |d: &TangentDir<Rational>, ratio: &Rational| {
        assert_eq!(point.ricci(d, d).unwrap() / point.h(d, d), *ratio);
    };
    check(&w.first, &w.first_ratio);
    check(&w.second, &w.second_ratio);
}

#[test]
fn einstein_fails_off_the_critical_curvature() {
    let model = SphereBundleModel::atiyah_at_first_axis(sphere(3, 1.0), 1.0, 1.0, 1e-12).unwrap();
    let point = model.point().unwrap();
    let verdict = einstein_check(&point, 1e-9).unwrap();
    assert!(!verdict.einstein);
    let w = verdict.witness.unwrap();
    let r1 = point.ricci(&w.first, &w.first).unwrap() / point.h(&w.first, &w.first);
    let r2 = point.ricci(&w.second, &w.second).unwrap() / point.h(&w.second, &w.second);
    assert!((r1 - r2).abs() > 1e-6);
}

#[test]
fn constant_scalar_condition_on_space_forms() {
    let check = |n: usize, c: Rational, k: Rational| {
        let model = SphereBundleModel::atiyah_at_first_axis(PointModel::SpaceForm { dim: n, c }, k, rational(1, 1), 0.0)
            .unwrap();
        constant_scalar_check(&model.point().unwrap(), 0.0).unwrap()
    };
    for c in [-1, 0, 1, 5] {
        assert!(check(3, rational(c, 1), rational(1, 1)).s1_holds);
    }
    assert!(check(2, rational(0, 1), rational(1, 1)).s1_holds);
    assert!(check(2, rational(4, 3), rational(3, 2)).s1_holds);
    let failing = check(2, rational(1, 1), rational(1, 1));
    assert!(!failing.s1_holds);
    let w = failing.witness.unwrap();
    assert_ne!(w.first_ratio, w.second_ratio);
}

#[test]
fn constant_scalar_float_mode_agrees() {
    let model = SphereBundleModel::atiyah_at_first_axis(sphere(2, 1.0), 1.0, 1.0, 1e-12).unwrap();
    let verdict = constant_scalar_check(&model.point().unwrap(), 1e-7).unwrap();
    assert!(!verdict.s1_holds);
    let model = SphereBundleModel::atiyah_at_first_axis(sphere(3, 5.0), 1.0, 1.0, 1e-12).unwrap();
    assert!(constant_scalar_check(&model.point().unwrap(), 1e-7).unwrap().s1_holds);
}

#[test]
fn scalar_is_constant_along_the_fiber_for_three_dimensional_space_forms() {
    let model = SphereBundleModel::atiyah_at_first_axis(sphere(3, 1.0), 1.0, 1.0, 1e-12).unwrap();
    let reference = model.point().unwrap().scalar();
    for stream in 0..100 {
        assert!((random_point(&model, stream).scalar() - reference).abs() < 1e-10);
    }
}

#[test]
fn generic_bundle_reproduces_tangent_bundle() {
    let base = sphere(3, 1.0);
    let tangent = SphereBundleModel::tangent_at_first_axis(base.clone(), 1.0, 1e-12).unwrap();
    let generic = SphereBundleModel::new(
        base.clone(),
        BundleKind::Generic(GenericBundle {
            weights: vec![1.0; 3],
            curvature: base.curvature_table().unwrap(),
            derivative: Some(base.nabla_table().unwrap()),
        }),
        1.0,
        FiberVec::basis(3, 0),
        1e-12,
    )
    .unwrap();
    let (p, q) = (tangent.point().unwrap(), generic.point().unwrap());
    assert_eq!(p.scalar(), q.scalar());
    let mut rng = seeded_rng(0, 0);
    let plane = random_plane(&p, &mut rng);
    assert_eq!(p.sectional(&plane).unwrap(), q.sectional(&plane).unwrap());
}

#[test]
fn generic_bundle_rejects_non_skew_curvature() {
    let mut table = PairTable::zeros(2, 2);
    table.set(0, 1, Mat::identity(2));
    let bundle = BundleKind::Generic(GenericBundle { weights: vec![1.0, 1.0], curvature: table, derivative: None });
    let err = SphereBundleModel::new(sphere(2, 0.0), bundle, 1.0, FiberVec::basis(2, 0), 1e-12);
    assert!(matches!(err, Err(Error::InvalidModel(_))));
}

#[test]
fn missing_derivative_data_is_reported_only_when_needed() {
    let mut table = PairTable::zeros(2, 3);
    let mut m = Mat::zeros(3, 3);
    m.set(1, 2, 1.0);
    m.set(2, 1, -1.0);
    table.set(0, 1, m);
    let bundle = BundleKind::Generic(GenericBundle { weights: vec![1.0; 3], curvature: table, derivative: None });
    let model = SphereBundleModel::new(sphere(2, 1.0), bundle, 1.0, FiberVec::basis(3, 1), 1e-12).unwrap();
    let point = model.point().unwrap();
    point.scalar();
    let horizontal = PlaneSpec::new(
        TangentDir::horizontal(TangentVec::basis(2, 0), 3),
        TangentDir::horizontal(TangentVec::basis(2, 1), 3),
    );
    assert!(point.sectional(&horizontal).is_ok());
    let mixed = PlaneSpec::new(
        TangentDir::horizontal(TangentVec::basis(2, 0), 3),
        TangentDir::vertical(2, FiberVec::basis(3, 2)),
    );
    assert!(matches!(point.sectional(&mixed), Err(Error::MissingDerivativeData(_))));
}

#[test]
fn rank_two_sectional_bound_is_exact() {
    let constants = BoundConstants {
        sectional_lower: Some(rational(1, 1)),
        curvature_bound: Some(rational(2, 1)),
        ..Default::default()
    };
    let report = positivity_bounds(2, 2, &constants, &[BoundKind::Sectional]).unwrap();
    let range = &report.ranges[0];
    assert!((range.r_squared_max.unwrap() - 2.0 / 3.0).abs() < 1e-15);
    assert!(range.inclusive);
    for num in 1..40 {
        let r = rational(num, 30);
        let holds = bound_holds(BoundKind::Sectional, 2, 2, &constants, &r).unwrap();
        assert_eq!(holds, r.clone() * r <= rational(2, 3));
    }
}

#[test]
fn zero_curvature_bound_admits_every_radius() {
    let constants = BoundConstants {
        sectional_lower: Some(1.0),
        ricci_lower: Some(1.0),
        curvature_bound: Some(0.0),
        l1: Some(0.0),
        l2: Some(0.0),
        epsilon: Some(1.0),
    };
    let report = positivity_bounds(3, 6, &constants, &[]).unwrap();
    assert_eq!(report.ranges.len(), 4);
    for range in &report.ranges {
        assert!(!range.empty && range.r_squared_max.is_none(), "{range:?}");
        for r in [0.1, 1.0, 10.0, 1e3] {
            assert!(bound_holds(range.kind, 3, 6, &constants, &r).unwrap());
        }
    }
}

#[test]
fn ranges_match_predicates_at_their_edges() {
    let constants = BoundConstants {
        sectional_lower: Some(1.0),
        ricci_lower: Some(2.0),
        curvature_bound: Some(0.4),
        l1: Some(0.3),
        l2: Some(0.7),
        epsilon: Some(0.5),
    };
    for (n, m) in [(3usize, 6usize), (2, 2), (4, 10)] {
        let report = positivity_bounds(n, m, &constants, &[]).unwrap();
        for range in &report.ranges {
            if range.empty {
                continue;
            }
            let t = range.r_squared_max.unwrap();
            let inside = (t * (1.0 - 1e-9)).sqrt();
            let outside = (t * (1.0 + 1e-9)).sqrt();
            assert!(bound_holds(range.kind, n, m, &constants, &inside).unwrap(), "{range:?}");
            assert!(!bound_holds(range.kind, n, m, &constants, &outside).unwrap(), "{range:?}");
        }
    }
}

#[test]
fn missing_constants_are_errors_when_requested() {
    let constants = BoundConstants::<f64> { curvature_bound: Some(1.0), ..Default::default() };
    assert!(matches!(
        positivity_bounds(3, 6, &constants, &[BoundKind::Sectional]),
        Err(Error::MissingConstant("C"))
    ));
    assert!(positivity_bounds(3, 6, &constants, &[]).unwrap().ranges.is_empty());
}

#[test]
fn model_bounds_fill_space_form_constants() {
    let model = SphereBundleModel::atiyah_at_first_axis(sphere(3, 1.0), 1.9, 1.0, 1e-12).unwrap();
    let report = positivity_bounds_for(&model, &BoundConstants::default(), &[BoundKind::Sectional]).unwrap();
    assert_eq!(report.rank, 6);
    assert_eq!(report.derivative_vanishes, Some(false));
    assert!(report.ranges[0].note.is_some());
    let critical = SphereBundleModel::atiyah_at_first_axis(sphere(3, 2.0), 1.0, 1.0, 1e-12).unwrap();
    let report = positivity_bounds_for(&critical, &BoundConstants::default(), &[BoundKind::Sectional]).unwrap();
    assert_eq!(report.derivative_vanishes, Some(true));
    assert!(report.ranges[0].r_squared_max.is_none());
}
