use std::f64::consts::PI;

use approx::assert_relative_eq;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use super::smooth::{gradient_gauge, SmoothModel};
use super::*;
use crate::bodies::{ball, cube, Body};
use crate::error::Error;

fn unit(dim: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(dim);
    e[i] = 1.0;
    e
}

// ---------------------------------------------------------------- gradients

#[test]
fn ball_gradient_is_radial() {
    let model = SmoothModel::from_body(&ball(1), 8).unwrap();
    let g = model.gradient(&DVector::from_vec(vec![2.0, 0.0])).unwrap();
    assert_relative_eq!(g[0], 1.0, epsilon = 1e-12);
    assert_relative_eq!(g[1], 0.0, epsilon = 1e-12);
}

#[test]
fn ellipsoid_gradient_lands_on_polar_boundary() {
    // E(1, 2): Q = diag(1, 1/4, 1, 1/4); at 2 e_p2 the gradient is e_p2 / 2
    // and its polar gauge sqrt(g' Q^-1 g) is exactly one.
    let k = Body::ellipsoid_radii(&[1.0, 2.0]).unwrap();
    let model = SmoothModel::from_body(&k, 8).unwrap();
    let x = &unit(4, 3) * 2.0;
    let grad = model.gradient(&x).unwrap();
    assert_relative_eq!(grad[3], 0.5, epsilon = 1e-12);
    assert_relative_eq!(grad.norm(), 0.5, epsilon = 1e-12);

    let q_inv = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 4.0, 1.0, 4.0]));
    for (s, dir) in crate::lowdisc::sphere_directions(4, 200, 3)
        .iter()
        .enumerate()
    {
        let bp = model.boundary_point(dir).unwrap();
        let g = model.gradient(&bp).unwrap();
        let polar_gauge = (&q_inv * &g).dot(&g).sqrt();
        assert!(
            (polar_gauge - 1.0).abs() < 1e-6,
            "direction {s}: polar gauge {polar_gauge}"
        );
    }
}

#[test]
fn gradient_matches_finite_differences() {
    let bodies = [
        Body::ellipsoid_radii(&[1.0, 2.0]).unwrap(),
        cube(2),
        crate::bodies::cross_polytope(2),
    ];
    let probe = DVector::from_vec(vec![0.31, -0.44, 0.52, 0.27]);
    for k in &bodies {
        let model = SmoothModel::from_body(k, 8).unwrap();
        let grad = model.gradient(&probe).unwrap();
        let h = 1e-6;
        for j in 0..4 {
            let mut xp = probe.clone();
            let mut xm = probe.clone();
            xp[j] += h;
            xm[j] -= h;
            let fd = (model.gauge(&xp) - model.gauge(&xm)) / (2.0 * h);
            assert!(
                (grad[j] - fd).abs() < 1e-5,
                "component {j}: analytic {} vs fd {fd}",
                grad[j]
            );
        }
    }
}

#[test]
fn gradient_satisfies_euler_identity() {
    // degree one homogeneity forces <grad g(x), x> = g(x)
    let model = SmoothModel::from_body(&cube(2), 8).unwrap();
    for dir in crate::lowdisc::sphere_directions(4, 50, 11) {
        let x = dir * 1.3;
        let g = model.gauge(&x);
        let grad = model.gradient(&x).unwrap();
        assert!((grad.dot(&x) - g).abs() < 1e-8 * g.max(1.0));
    }
}

#[test]
fn smoothed_gauge_stays_inside_polytope_gauge() {
    // g_smooth >= g_cube pointwise (the smoothed body sits inside), and the
    // gap vanishes as the exponent grows.
    let k = cube(2);
    let x = DVector::from_vec(vec![0.9, 0.2, -0.4, 0.1]);
    let coarse = SmoothModel::from_body(&k, 2).unwrap().gauge(&x);
    let fine = SmoothModel::from_body(&k, 32).unwrap().gauge(&x);
    let exact = k.gauge(&x).unwrap();
    assert!(coarse >= fine && fine >= exact - 1e-12);
    assert!(fine - exact < 0.02);
}

#[test]
fn body_gradient_gauge_only_for_ellipsoids() {
    let x = DVector::from_vec(vec![0.5, 0.5, 0.1, 0.1]);
    let k = Body::ellipsoid_radii(&[1.0, 2.0]).unwrap();
    let g = gradient_gauge(&k, &x).unwrap();
    let model = SmoothModel::from_body(&k, 4).unwrap();
    assert_relative_eq!(
        (g - model.gradient(&x).unwrap()).norm(),
        0.0,
        epsilon = 1e-12
    );
    assert!(matches!(
        gradient_gauge(&cube(2), &x),
        Err(Error::NonSmooth)
    ));
}

#[test]
fn smoothing_rejects_zero_exponent() {
    assert!(matches!(
        SmoothModel::from_body(&cube(2), 0),
        Err(Error::Domain(_))
    ));
}

// ------------------------------------------------------------------- action

fn circle_orbit(m: usize, radius: f64, reversed: bool) -> Orbit {
    let mut samples = Vec::with_capacity(m + 1);
    let mut times = Vec::with_capacity(m + 1);
    for k in 0..=m {
        let sign = if reversed { -1.0 } else { 1.0 };
        let th = sign * 2.0 * PI * (k as f64) / (m as f64);
        samples.push(DVector::from_vec(vec![
            radius * th.cos(),
            radius * th.sin(),
        ]));
        times.push(2.0 * PI * (k as f64) / (m as f64));
    }
    Orbit {
        samples,
        times,
        period: 2.0 * PI,
        action: 0.0,
        closure_residual: 0.0,
    }
}

#[test]
fn polygonal_action_of_unit_circle_is_pi() {
    let a = action(&circle_orbit(2000, 1.0, false)).unwrap();
    assert!((a - PI).abs() < 1e-5, "got {a}");
}

#[test]
fn action_ignores_orientation() {
    let a = action(&circle_orbit(2000, 1.0, true)).unwrap();
    assert!((a - PI).abs() < 1e-5);
}

#[test]
fn action_of_ellipse_is_enclosed_area() {
    let m = 2000;
    let mut orbit = circle_orbit(m, 1.0, false);
    for s in orbit.samples.iter_mut() {
        s[0] *= 2.0;
    }
    let a = action(&orbit).unwrap();
    assert!((a - 2.0 * PI).abs() < 3e-5, "got {a}");
}

#[test]
fn open_loop_is_rejected() {
    let mut orbit = circle_orbit(1000, 1.0, false);
    orbit.samples.truncate(501);
    orbit.times.truncate(501);
    match action(&orbit) {
        Err(Error::OpenLoop { residual, .. }) => assert!(residual > 1.0),
        other => panic!("expected OpenLoop, got {other:?}"),
    }
}

// ----------------------------------------------------------------- shooting

#[test]
fn ball_characteristic_closes_at_two_pi() {
    let k = ball(2);
    let orbit = shoot_characteristic(&k, &unit(4, 0), &ShootConfig::default()).unwrap();
    assert!(
        (orbit.period - 2.0 * PI).abs() < 1e-6,
        "T = {}",
        orbit.period
    );
    assert!((orbit.action - PI).abs() < 1e-6, "A = {}", orbit.action);
    assert!(orbit.closure_residual < 1e-6);
    assert!(verify_action_period(&orbit) < 1e-5 * orbit.period);
    // every sample sits on the boundary
    for s in &orbit.samples {
        assert!((k.gauge(s).unwrap() - 1.0).abs() < 1e-6);
    }
}

#[test]
fn resonant_ellipsoid_axis_starts_find_both_plane_orbits() {
    let k = Body::ellipsoid_radii(&[1.0, 2.0]).unwrap();
    let cfg = ShootConfig::default();

    let fast = shoot_characteristic(&k, &unit(4, 0), &cfg).unwrap();
    assert!((fast.period - 2.0 * PI).abs() < 1e-6, "T = {}", fast.period);
    assert!((fast.action - PI).abs() < 1e-6, "A = {}", fast.action);

    let slow = shoot_characteristic(&k, &unit(4, 1), &cfg).unwrap();
    assert!((slow.period - 8.0 * PI).abs() < 1e-5, "T = {}", slow.period);
    assert!((slow.action - 4.0 * PI).abs() < 1e-5, "A = {}", slow.action);
}

#[test]
fn traced_orbit_is_tangent_to_the_flow() {
    let k = cube(2);
    let cfg = ShootConfig::default();
    let model = SmoothModel::from_body(&k, cfg.smoothing_m).unwrap();
    let orbit = shoot_characteristic(&k, &unit(4, 0), &cfg).unwrap();
    let m = orbit.samples.len() - 1;
    let dt = orbit.period / m as f64;
    let mut worst = 0.0f64;
    // fourth order five point stencil keeps the truncation error of the
    // discrete derivative below the tangency tolerance
    for j in 2..m - 1 {
        let fd = (-&orbit.samples[j + 2] + &orbit.samples[j + 1] * 8.0
            - &orbit.samples[j - 1] * 8.0
            + &orbit.samples[j - 2])
            / (12.0 * dt);
        let v = model.velocity(&orbit.samples[j]).unwrap();
        worst = worst.max((fd - v).norm());
    }
    assert!(worst < 1e-5, "max tangency defect {worst}");
    for s in &orbit.samples {
        assert!((model.gauge(s) - 1.0).abs() < 1e-6);
    }
}

#[test]
fn action_equals_half_period_along_characteristics() {
    let bodies = [
        ball(2),
        Body::ellipsoid_radii(&[1.0, 2.0]).unwrap(),
        cube(2),
    ];
    for k in &bodies {
        let orbit = shoot_characteristic(k, &unit(4, 0), &ShootConfig::default()).unwrap();
        assert!(
            verify_action_period(&orbit) < 1e-5 * orbit.period,
            "A = {}, T = {}",
            orbit.action,
            orbit.period
        );
    }
}

#[test]
fn return_lemma_time_for_the_ball() {
    // chord length 2 sin(t/2) reaches the unit sphere at t = pi / 3
    let k = ball(2);
    let orbit = shoot_characteristic(&k, &unit(4, 0), &ShootConfig::default()).unwrap();
    let (t0, chord) = verify_return_lemma(&k, &orbit).unwrap();
    assert!((t0 - PI / 3.0).abs() < 1e-4, "t0 = {t0}");
    assert!(chord >= 1.0 - 1e-6);
    // both arcs beat the 1/||J|| lower bound for the return time
    assert!(t0.min(orbit.period - t0) >= 1.0 - 1e-4);
}

#[test]
fn shooting_dimension_mismatch_is_reported() {
    let bad = DVector::from_vec(vec![1.0, 0.0]);
    assert!(matches!(
        shoot_characteristic(&ball(2), &bad, &ShootConfig::default()),
        Err(Error::DimensionMismatch { .. })
    ));
}

// ------------------------------------------------------------ ehz_estimate

#[test]
fn planar_bodies_use_exact_area() {
    let cfg = ShootConfig::default();
    let disc = ball(1).scale(2.0).unwrap();
    let est = ehz_estimate(&disc, &cfg).unwrap();
    assert_eq!(est.method, EhzMethod::PlanarArea);
    assert_relative_eq!(est.value, 4.0 * PI, epsilon = 1e-9);

    let square = ehz_estimate(&cube(1), &cfg).unwrap();
    assert_eq!(square.method, EhzMethod::PlanarArea);
    assert_relative_eq!(square.value, 4.0, epsilon = 1e-9);
    assert_eq!(square.method.as_str(), "planar-area");
}

#[test]
fn ellipsoid_capacity_closed_form() {
    let cfg = ShootConfig::default();
    let cases: [(&[f64], f64); 4] = [
        (&[1.0, 2.0], PI),
        (&[1.0, 3.0], PI),
        (&[2.0, 2.0], 4.0 * PI),
        (&[1.0, 2.0, 3.0], PI),
    ];
    for (radii, expect) in cases {
        let k = Body::ellipsoid_radii(radii).unwrap();
        let est = ehz_estimate(&k, &cfg).unwrap();
        assert_eq!(est.method, EhzMethod::ClosedForm);
        assert_relative_eq!(est.value, expect, epsilon = 1e-9);
        assert!(est.value >= est.lower_certificate - 1e-9);
    }
}

#[test]
fn closed_form_survives_a_symplectic_change_of_frame() {
    // a linear symplectic image has the same capacity
    let cfg = ShootConfig::default();
    let k = Body::ellipsoid_radii(&[1.0, 2.0]).unwrap();
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let s = crate::symplectic::random_symplectic(4, 0.3, &mut rng).unwrap();
    let moved = Body::linear_image(k, s).unwrap();
    let est = ehz_estimate(&moved, &cfg).unwrap();
    assert_eq!(est.method, EhzMethod::ClosedForm);
    assert_relative_eq!(est.value, PI, epsilon = 1e-8);
}

#[test]
fn shooting_cross_validates_the_ellipsoid_closed_form() {
    let k = Body::ellipsoid_radii(&[1.0, 2.0]).unwrap();
    let cfg = ShootConfig::default();
    let mut best = f64::INFINITY;
    for i in 0..4 {
        if let Ok(orbit) = shoot_characteristic(&k, &unit(4, i), &cfg) {
            best = best.min(orbit.action);
        }
    }
    assert!((best - PI).abs() < 1e-4, "shooting best {best}");
}

/// Area of the plane curve 2 (q^16 + p^16) = 1, the invariant section of the
/// smoothed cube. Polar shoelace with 4096 angles, accurate far beyond the
/// comparison tolerance.
fn smoothed_square_section_area() -> f64 {
    let m = 4096;
    let mut acc = 0.0;
    for k in 0..m {
        let th = 2.0 * PI * (k as f64) / (m as f64);
        let r16 = 2.0 * (th.cos().powi(16) + th.sin().powi(16));
        let r = r16.powf(-1.0 / 16.0);
        acc += r * r;
    }
    0.5 * acc * (2.0 * PI / m as f64)
}

#[test]
fn smoothed_cube_estimate_matches_plane_section_area() {
    let cfg = ShootConfig::default();
    let est = ehz_estimate(&cube(2), &cfg).unwrap();
    assert_eq!(est.method, EhzMethod::Shooting);
    let oracle = smoothed_square_section_area();
    assert!(
        (est.value - oracle).abs() < 1e-5,
        "estimate {} vs section area {oracle}",
        est.value
    );
    // the sandwich for the cube: 1/||J|| = 1, cylinder bound 4
    assert!(est.value >= 1.0 - 1e-9 && est.value <= 4.0 + 1e-9);
    assert_eq!(est.orbits.len(), 1);
    let orbit = &est.orbits[0];
    assert!(orbit.closure_residual < 1e-6);
    assert!(verify_action_period(orbit) < 1e-5 * orbit.period);
}

#[test]
fn estimate_scales_like_the_square_of_dilation() {
    let cfg = ShootConfig::default();
    for k in [
        cube(2),
        Body::ellipsoid_radii(&[1.0, 2.0]).unwrap(),
        cube(1),
    ] {
        let base = ehz_estimate(&k, &cfg).unwrap().value;
        for lambda in [0.5, 2.0] {
            let scaled = ehz_estimate(&k.scale(lambda).unwrap(), &cfg).unwrap().value;
            assert!(
                (scaled - lambda * lambda * base).abs() < 1e-4 * base.max(1.0),
                "lambda {lambda}: {scaled} vs {}",
                lambda * lambda * base
            );
        }
    }
}

#[test]
fn estimate_respects_the_certified_lower_bound() {
    let cfg = ShootConfig::default();
    for k in [
        cube(2),
        crate::bodies::cross_polytope(2),
        Body::ellipsoid_radii(&[1.0, 2.0]).unwrap(),
    ] {
        let est = ehz_estimate(&k, &cfg).unwrap();
        assert!(
            est.value >= est.lower_certificate - 1e-6,
            "{} < {}",
            est.value,
            est.lower_certificate
        );
        assert!(est.value <= 4.0 * est.lower_certificate + 1e-6);
    }
}

#[test]
fn asymmetric_bodies_are_rejected() {
    let shift = DVector::from_vec(vec![0.3, 0.0, 0.0, 0.0]);
    let k = cube(2).translate(&shift).unwrap();
    assert!(matches!(
        ehz_estimate(&k, &ShootConfig::default()),
        Err(Error::NotSymmetric)
    ));
}

#[test]
fn shooting_dimension_cap_is_enforced() {
    let est = ehz_estimate(&cube(4), &ShootConfig::default());
    assert!(matches!(
        est,
        Err(Error::SizeLimit {
            got: 8,
            limit: 6,
            ..
        })
    ));
}

#[test]
fn return_lemma_needs_a_long_enough_arc() {
    // a short arc whose chords stay well inside the body
    let m = 64;
    let mut samples = Vec::new();
    let mut times = Vec::new();
    for k in 0..=m {
        let th = 0.3 * (k as f64) / (m as f64);
        samples.push(DVector::from_vec(vec![th.cos(), th.sin(), 0.0, 0.0]));
        times.push(th);
    }
    let orbit = Orbit {
        samples,
        times,
        period: 0.3,
        action: 0.15,
        closure_residual: 0.0,
    };
    assert!(matches!(
        verify_return_lemma(&ball(2), &orbit),
        Err(Error::Domain(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ellipsoid_estimate_is_pi_times_min_radius_squared(
        r1 in 0.4f64..2.5,
        r2 in 0.4f64..2.5,
    ) {
        let k = Body::ellipsoid_radii(&[r1, r2]).unwrap();
        let est = ehz_estimate(&k, &ShootConfig::default()).unwrap();
        let expect = PI * r1.min(r2).powi(2);
        prop_assert!((est.value - expect).abs() < 1e-9 * expect.max(1.0));
    }

    #[test]
    fn planar_estimate_scales_quadratically(
        lambda in 0.3f64..3.0,
        seed in 0u64..200,
    ) {
        let k = crate::bodies::random_symmetric_vpolytope(1, 5, seed).unwrap();
        let cfg = ShootConfig::default();
        let base = ehz_estimate(&k, &cfg).unwrap().value;
        let scaled = ehz_estimate(&k.scale(lambda).unwrap(), &cfg).unwrap().value;
        prop_assert!((scaled - lambda * lambda * base).abs() < 1e-8 * (base * lambda * lambda).max(1.0));
    }
}
