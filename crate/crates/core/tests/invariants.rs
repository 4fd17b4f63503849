//! Property tests over randomly drawn metrics, spheres and surfaces.

use std::f64::consts::PI;

use caplab::capacity::capacity_radial;
use caplab::geometry::{
    adm_mass, area_radius, mean_curvature_sphere, scalar_curvature_radial, CoordinateSphere, RadialConformalMetric,
    RadialProfile, SchwarzschildSpec,
};
use caplab::gluing::{minkowski_gap, GluedManifold};
use caplab::harness::{rigidity_radius, verify_lc1};
use caplab::quasilocal::{embed_revolution, quasilocal_report, MeanCurvatureConvention, RevolutionSurfaceMetric};
use caplab::surface::MeridianCurve;
use caplab::symmetrization::{symmetric_counterpart, IsoperimetricProfile};
use proptest::prelude::*;

fn schwarzschild(m: f64, r_min: f64) -> RadialConformalMetric {
    SchwarzschildSpec::with_r_min(m, r_min).unwrap().metric()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn horizon_reflection_preserves_area_radius(m in 0.1f64..10.0, x in 0.05f64..5.0) {
        let r0 = x * m;
        let mirror = m * m / (4.0 * r0);
        let spec = SchwarzschildSpec::with_r_min(m, 0.5 * r0.min(mirror)).unwrap();
        let a = area_radius(&spec, CoordinateSphere::new(r0)).unwrap();
        let b = area_radius(&spec, CoordinateSphere::new(mirror)).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a, "{a} vs {b}");
    }

    #[test]
    fn mean_curvature_sign_flips_at_horizon(m in 0.1f64..10.0, x in 0.05f64..5.0) {
        prop_assume!((x - 0.5).abs() > 1e-6);
        let r0 = x * m;
        let spec = SchwarzschildSpec::with_r_min(m, 0.5 * r0).unwrap();
        let h = mean_curvature_sphere(&spec, CoordinateSphere::new(r0)).unwrap();
        prop_assert_eq!(h > 0.0, r0 > 0.5 * m);
    }

    #[test]
    fn harmonically_flat_profiles_are_scalar_flat(a in -0.4f64..3.0, s in 0.0f64..1.0) {
        let metric = RadialConformalMetric::new(RadialProfile::laurent(vec![(1.0, 0.0), (a, -1.0)]), 1.0, 1.0).unwrap();
        let r = 1.0 + 50.0 * s;
        prop_assert!(scalar_curvature_radial(&metric, r).unwrap().abs() < 1e-10);
    }

    #[test]
    fn adm_mass_of_schwarzschild(m in -0.5f64..10.0) {
        let metric = schwarzschild(m, if m < 0.0 { m.abs() } else { 0.1 });
        prop_assert!((adm_mass(&metric).unwrap() - m).abs() < 1e-8);
    }

    #[test]
    fn kelvin_transform_is_an_involution(a in -0.4f64..3.0, b in -0.1f64..0.1, r in 1.0f64..20.0) {
        let p = RadialProfile::laurent(vec![(1.0, 0.0), (a, -1.0), (b, -3.0)]);
        let back = p.kelvin().kelvin();
        prop_assert!((back.value(r) - p.value(r)).abs() < 1e-13 * p.value(r).abs().max(1.0));
    }

    #[test]
    fn hawking_mass_is_constant_on_both_sides(m in 0.1f64..5.0, x in 0.1f64..4.0) {
        let r0 = x * m;
        let metric = schwarzschild(m, 0.5 * r0);
        let q = quasilocal_report(&metric, &MeridianCurve::sphere(r0), MeanCurvatureConvention::TowardInfinity).unwrap();
        prop_assert!((q.hawking - m).abs() < 1e-10 * m.max(1.0), "{} vs {m}", q.hawking);
    }

    #[test]
    fn shi_tam_direction(m in 0.1f64..5.0, x in 0.51f64..10.0) {
        let r0 = x * m;
        let metric = schwarzschild(m, 0.5 * r0);
        let q = quasilocal_report(&metric, &MeridianCurve::sphere(r0), MeanCurvatureConvention::TowardInfinity).unwrap();
        prop_assert!(q.total_h_g <= q.total_h_g0.unwrap());
    }

    #[test]
    fn gauss_bonnet_on_spheroids(a in 0.2f64..3.0, c in 0.2f64..3.0) {
        let s = RevolutionSurfaceMetric::spheroid(a, c).unwrap();
        prop_assert!((s.total_gauss_curvature() - 4.0 * PI).abs() < 1e-6);
    }

    #[test]
    fn gauss_bonnet_on_schwarzschild_surfaces(m in 0.5f64..2.0, r0 in 1.5f64..4.0, c1 in -0.2f64..0.3) {
        let metric = schwarzschild(m, 0.5);
        let curve = MeridianCurve::MuPolynomial { r0, coeffs: vec![c1] };
        let s = caplab::quasilocal::induced_metric(&metric, &curve).unwrap();
        prop_assert!((s.total_gauss_curvature() - 4.0 * PI).abs() < 1e-6);
    }

    #[test]
    fn embedding_round_trip(a in 0.5f64..2.0, c in 0.5f64..2.0) {
        let s = RevolutionSurfaceMetric::spheroid(a, c).unwrap();
        let back = embed_revolution(&s).unwrap().induced_metric().unwrap();
        let sup = s.rho().iter().zip(back.rho()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        let speed = s.speed().iter().zip(back.speed()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(sup < 1e-8 && speed < 1e-8, "{sup:e} {speed:e}");
    }

    #[test]
    fn minkowski_direction(a in 0.5f64..2.0, c in 0.5f64..2.0) {
        let r = minkowski_gap(&RevolutionSurfaceMetric::spheroid(a, c).unwrap()).unwrap();
        prop_assert!(r.satisfied, "{r:?}");
        if (a - c).abs() > 0.05 {
            prop_assert!(r.gap > r.tolerance);
        }
    }

    #[test]
    fn counterpart_round_trip(m in 0.0f64..5.0, x in 0.3f64..8.0) {
        let profile = IsoperimetricProfile::schwarzschild(m).unwrap();
        let r0 = x * m.max(0.5);
        let v = profile.signed_volume(r0).unwrap();
        let back = symmetric_counterpart(&profile, v).unwrap().r0;
        prop_assert!((back - r0).abs() < 1e-9 * r0, "{back} vs {r0}");
    }

    #[test]
    fn lc1_sides_scale_with_the_metric(m in 0.2f64..3.0, x in 0.6f64..5.0, lambda in 0.2f64..5.0) {
        // g -> lambda^2 g is the Schwarzschild metric of mass lambda m in
        // coordinates scaled by lambda
        let sides = |m: f64, r0: f64| {
            let metric = schwarzschild(m, 0.25 * m);
            let sol = capacity_radial(&metric.clone().into(), r0).unwrap();
            let q = quasilocal_report(&metric, &MeridianCurve::sphere(r0), MeanCurvatureConvention::TowardInfinity).unwrap();
            let r = verify_lc1(&sol, &q).unwrap();
            (r.lhs, r.rhs)
        };
        let (l1, r1) = sides(m, x * m);
        let (l2, r2) = sides(lambda * m, lambda * x * m);
        prop_assert!((l2 / l1 - lambda).abs() < 1e-9 * lambda);
        prop_assert!((r2 / r1 - lambda).abs() < 1e-9 * lambda);
    }

    #[test]
    fn glued_interface_is_isometric(m in 0.5f64..5.0, y in 0.05f64..0.95) {
        let g = GluedManifold::new(m, y * m).unwrap();
        let (a, b) = g.diagnostics.area;
        prop_assert!((a - b).abs() < 1e-10 * a);
        let (ra, rb) = g.diagnostics.area_radius;
        prop_assert!((ra - rb).abs() < 1e-10 * ra);
        prop_assert!((adm_mass(&g.outer()).unwrap() - m).abs() < 1e-8 * m.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn rigidity_root_residual(a in 0.01f64..100.0, b in 0.0f64..100.0, c in 0.01f64..100.0, n in 3u32..9) {
        let x = rigidity_radius(a, b, c, n).unwrap();
        let k = n as f64 - 2.0;
        let terms = [-a * k * x.powf(-k), b * x, c * (n as f64 - 1.0)];
        let scale: f64 = terms.iter().map(|t| t.abs()).sum();
        let residual: f64 = terms.iter().sum();
        prop_assert!(residual.abs() < 1e-12 * scale, "{residual:e} at {x}");
    }
}

#[test]
fn rigidity_root_without_linear_term() {
    // A k x^{-k} = c (n - 1): n = 3, A = 4, c = 1 gives x = 2
    assert_eq!(rigidity_radius(4.0, 0.0, 1.0, 3).unwrap(), 2.0);
    // n = 4: 2 A x^{-2} = 3 c, A = 6, c = 1 gives x = 2
    assert_eq!(rigidity_radius(6.0, 0.0, 1.0, 4).unwrap(), 2.0);
}
