//! Acceptance gate: ten criteria, each printing one PASS or FAIL line.
//!
//! The default bounds suite is computed once and shared; criteria that
//! need it reuse the same outcome, so the suite wall time is measured
//! exactly once. Run with --nocapture to see every verdict line.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sympcap::bodies::{self, rs_planar_check, Body};
use sympcap::ehz::{self, ShootConfig};
use sympcap::jnorm;
use sympcap::lincap::{self, SearchConfig};
use sympcap::lowdisc::sphere_directions;
use sympcap::symplectic::{self, SymplecticMap};
use sympcap_cli::report::{emit_report, Format};
use sympcap_cli::suite::{
    ball_orbit, default_suite, run_axiom_suite, run_rotated_cube_suite, run_sandwich_suite,
    BodyCase, SuiteConfig, SuiteOutcome,
};

struct Shared {
    cases: Vec<BodyCase>,
    outcome: SuiteOutcome,
    elapsed: Duration,
}

fn shared() -> &'static Shared {
    static CELL: OnceLock<Shared> = OnceLock::new();
    CELL.get_or_init(|| {
        let cases = default_suite();
        let start = Instant::now();
        let outcome = run_sandwich_suite(&cases, &SuiteConfig::default());
        Shared {
            cases,
            outcome,
            elapsed: start.elapsed(),
        }
    })
}

/// Print the single verdict line for a criterion, then enforce it.
fn verdict(number: usize, name: &str, pass: bool, detail: &str) {
    let word = if pass { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {number:02} {name}: {word} ({detail})");
    assert!(pass, "acceptance {number:02} {name}: {detail}");
}

#[test]
fn acceptance_01_sandwich_chain_on_default_suite() {
    let sh = shared();
    let within_budget = sh.elapsed < Duration::from_secs(120);
    let enough_bodies = sh.cases.len() >= 10;
    let low_dim = sh.cases.iter().all(|c| c.body.dim() / 2 <= 3);
    let mut all_chains = true;
    let mut worst = f64::NEG_INFINITY;
    for r in &sh.outcome.reports {
        all_chains &= r.certified();
        for c in &r.checks {
            if c.name.ends_with("ehz") || c.name.contains("cyl") || c.name.contains("lower") {
                worst = worst.max(c.residual);
            }
        }
    }
    verdict(
        1,
        "sandwich chain, default suite, rel tol 1e-4",
        within_budget && enough_bodies && low_dim && all_chains,
        &format!(
            "{} bodies, worst chain residual {worst:.2e}, {:.1?} elapsed",
            sh.cases.len(),
            sh.elapsed
        ),
    );
}

#[test]
fn acceptance_02_normj_exact_values_and_grid_oracle() {
    // closed or vertex-exact values within 1e-9
    let mut worst_exact = f64::NEG_INFINITY;
    let expect = [
        (bodies::ball(2), 1.0),
        (bodies::cube(2), 1.0),
        (Body::ellipsoid_radii(&[1.0, 2.0]).unwrap(), 1.0),
        (Body::ellipsoid_radii(&[2.0, 3.0]).unwrap(), 0.25),
        (Body::ellipsoid_radii(&[0.5, 1.5]).unwrap(), 4.0),
    ];
    for (k, want) in &expect {
        let got = jnorm::norm_j(k).unwrap().value;
        worst_exact = worst_exact.max((got - want).abs() / want);
    }

    // independent brute force at n = 2: an angular grid over S^3 walks
    // the polar boundary and takes the largest gauge of J v. The grid
    // contains the coordinate axes exactly, where the polytopal maxima
    // sit on kinks that a generic point set approaches only linearly.
    let start = Instant::now();
    let oracle = |k: &Body| -> f64 {
        let mut best = f64::NEG_INFINITY;
        let m = 49usize;
        let mp = 96usize;
        for i in 0..m {
            let a = std::f64::consts::PI * i as f64 / (m - 1) as f64;
            for j in 0..m {
                let b = std::f64::consts::PI * j as f64 / (m - 1) as f64;
                for l in 0..mp {
                    let c = std::f64::consts::TAU * l as f64 / mp as f64;
                    let d = DVector::from_vec(vec![
                        a.cos(),
                        a.sin() * b.cos(),
                        a.sin() * b.sin() * c.cos(),
                        a.sin() * b.sin() * c.sin(),
                    ]);
                    let h = k.support(&d).unwrap();
                    if h < 1e-12 {
                        continue;
                    }
                    let v = d / h;
                    best = best.max(k.gauge(&symplectic::apply_j(&v)).unwrap());
                }
            }
        }
        best
    };
    let mut worst_oracle = f64::NEG_INFINITY;
    for (k, want) in &expect[..4] {
        let got = oracle(k);
        worst_oracle = worst_oracle.max((got - want).abs());
    }
    let grid_time = start.elapsed();

    verdict(
        2,
        "norm-J closed forms 1e-9 and grid oracle 1e-2",
        worst_exact <= 1e-9 && worst_oracle <= 1e-2 && grid_time < Duration::from_secs(10),
        &format!(
            "closed-form defect {worst_exact:.2e}, oracle defect {worst_oracle:.2e}, grid {:.1?}",
            grid_time
        ),
    );
}

#[test]
fn acceptance_03_ehz_closed_forms_and_ellipsoid_shooting() {
    let shoot = ShootConfig::default();

    // discs and polygons against independent closed forms
    let mut worst_planar = f64::NEG_INFINITY;
    for r in [1.0, 0.7, 1.9] {
        let disc = bodies::ball(1).scale(r).unwrap();
        let got = ehz::ehz_estimate(&disc, &shoot).unwrap().value;
        let want = std::f64::consts::PI * r * r;
        worst_planar = worst_planar.max((got - want).abs() / want);
    }
    for seed in [11u64, 12, 13, 14, 15] {
        let poly = bodies::random_symmetric_vpolytope(1, 6, seed).unwrap();
        let got = ehz::ehz_estimate(&poly, &shoot).unwrap().value;
        let want = shoelace_area(&poly);
        worst_planar = worst_planar.max((got - want).abs() / want);
    }

    // ellipsoid shooting at n = 2 from 64 starts: 60 seeded directions
    // plus the four coordinate axes
    let start = Instant::now();
    let mut worst_shoot = f64::NEG_INFINITY;
    for radii in [[1.0, 2.0], [1.3, 0.8]] {
        let e = Body::ellipsoid_radii(&radii).unwrap();
        let want = std::f64::consts::PI * (radii[0] * radii[0]).min(radii[1] * radii[1]);
        let mut starts = Vec::with_capacity(64);
        for i in 0..4 {
            let mut x = DVector::zeros(4);
            x[i] = 1.0;
            starts.push(x);
        }
        starts.extend(sphere_directions(4, 60, 2024));
        let mut best = f64::INFINITY;
        for x0 in &starts {
            if let Ok(orbit) = ehz::shoot_characteristic(&e, x0, &shoot) {
                best = best.min(orbit.action);
            }
        }
        worst_shoot = worst_shoot.max((best - want).abs() / want);
    }
    let shoot_time = start.elapsed();

    verdict(
        3,
        "EHZ closed forms 1e-9 and ellipsoid shooting 1e-4",
        worst_planar <= 1e-9 && worst_shoot <= 1e-4 && shoot_time < Duration::from_secs(30),
        &format!(
            "planar defect {worst_planar:.2e}, shooting defect {worst_shoot:.2e}, {:.1?}",
            shoot_time
        ),
    );
}

#[test]
fn acceptance_04_action_equals_half_period_on_suite_orbits() {
    let sh = shared();
    let shooting_reports = sh
        .outcome
        .reports
        .iter()
        .filter(|r| r.ehz_method == "shooting")
        .count();
    let mut worst = f64::NEG_INFINITY;
    for (_, orbit) in &sh.outcome.orbits {
        worst = worst.max(ehz::verify_action_period(orbit));
    }
    let covered = sh.outcome.orbits.len() == shooting_reports && shooting_reports > 0;
    verdict(
        4,
        "action = T/2 within 1e-5 on every shooting orbit",
        covered && worst <= 1e-5,
        &format!(
            "{} orbits, worst defect {worst:.2e}",
            sh.outcome.orbits.len()
        ),
    );
}

#[test]
fn acceptance_05_return_lemma_on_suite_orbits_and_ball_time() {
    let sh = shared();
    // per-orbit checks were computed inside the suite run
    let mut lemma_checks = 0usize;
    let mut all_pass = true;
    let mut worst = f64::NEG_INFINITY;
    for r in &sh.outcome.reports {
        for c in &r.checks {
            if c.name.starts_with("return-lemma") {
                lemma_checks += 1;
                all_pass &= c.pass;
                worst = worst.max(c.residual);
            }
        }
    }

    let (ball, orbit) = ball_orbit(&SuiteConfig::default()).unwrap();
    let (t0, gauge) = ehz::verify_return_lemma(&ball, &orbit).unwrap();
    let ball_defect = (t0 - std::f64::consts::FRAC_PI_3).abs();

    verdict(
        5,
        "return lemma on every orbit, ball return at pi/3",
        lemma_checks == sh.outcome.orbits.len()
            && lemma_checks > 0
            && all_pass
            && worst <= 1e-6
            && gauge >= 1.0 - 1e-6
            && ball_defect <= 1e-4,
        &format!(
            "{lemma_checks} orbits, worst residual {worst:.2e}, ball |t0 - pi/3| = {ball_defect:.2e}"
        ),
    );
}

#[test]
fn acceptance_06_planar_rogers_shephard_zero_violations() {
    let dirs = sphere_directions(2, 800, 9090);
    let mut violations = 0usize;
    let mut worst = f64::NEG_INFINITY;
    for (i, dir) in dirs.iter().enumerate() {
        let poly = bodies::random_symmetric_vpolytope(1, 4 + (i % 5), 60_000 + i as u64).unwrap();
        let r = rs_planar_check(&poly, dir).unwrap();
        let scale = r.vol.max(1.0);
        let left = r.vol - r.proj_len * r.sect_len;
        let right = r.proj_len * r.sect_len - 2.0 * r.vol;
        worst = worst.max(left.max(right) / scale);
        if left > 1e-9 * scale || right > 1e-9 * scale {
            violations += 1;
        }
    }
    verdict(
        6,
        "planar Rogers-Shephard, 800 seeded pairs, tol 1e-9",
        violations == 0,
        &format!("{violations} violations, worst residual {worst:.2e}"),
    );
}

#[test]
fn acceptance_07_shadow_bound_dominance_and_witness_certificates() {
    // 200 seeded (body, map) pairs against the product bound
    let mut worst_gap = f64::NEG_INFINITY;
    let scales = [0.2, 0.5, 1.0, 1.8];
    for i in 0..200usize {
        let n = 1 + (i % 2);
        let k = bodies::random_symmetric_vpolytope(n, 5 + (i % 4), 70_000 + i as u64).unwrap();
        let mut rng =
            ChaCha8Rng::seed_from_u64(41 ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let s = symplectic::random_symplectic(2 * n, scales[i % 4], &mut rng).unwrap();
        let map = SymplecticMap::linear_part(s).unwrap();
        let shadow = k.shadow_area(&map).unwrap();
        let bound = lincap::rs_product_bound(&k, &map).unwrap();
        worst_gap = worst_gap.max(shadow - bound);
    }

    // every suite body must carry the certified witness inequality
    let sh = shared();
    let mut witness_ok = true;
    let mut worst_witness = f64::NEG_INFINITY;
    for r in &sh.outcome.reports {
        let c = r
            .checks
            .iter()
            .find(|c| c.name == "witness-le-upper")
            .expect("witness check present");
        witness_ok &= c.pass;
        worst_witness = worst_witness.max(c.residual);
    }

    verdict(
        7,
        "shadow <= product bound (200 pairs) and witness <= 4/normj",
        worst_gap <= 1e-8 && witness_ok,
        &format!("worst bound gap {worst_gap:.2e}, worst witness residual {worst_witness:.2e}"),
    );
}

#[test]
fn acceptance_08_rotated_cube_certificates_and_width_sweep() {
    let report = run_rotated_cube_suite(&[2, 4, 8, 16, 64], 500, 77).unwrap();
    let mut ok = report.pass && report.rows.len() == 5;
    let mut worst_orth = f64::NEG_INFINITY;
    for row in &report.rows {
        worst_orth = worst_orth.max(row.orthogonality);
        ok &= row.orthogonality <= 1e-12;
        ok &= row.linf_max <= (2.0f64).sqrt() / (row.n as f64).sqrt() + 1e-12;
        ok &= row.inclusion;
        ok &= row.reported_not_verified;
        ok &= (row.gap_ratio - (row.n as f64 / 2.0).sqrt() / std::f64::consts::PI).abs() < 1e-15;
    }
    let n2 = &report.rows[0];
    ok &= n2.width_samples == 500 && n2.width_max <= std::f64::consts::PI + 1e-9;
    verdict(
        8,
        "rotated cube: orthogonality, l-inf, inclusion, width sweep",
        ok,
        &format!(
            "n in {{2,4,8,16,64}}, worst orthogonality {worst_orth:.2e}, width max {:.6}",
            n2.width_max
        ),
    );
}

#[test]
fn acceptance_09_axiom_monotonicity_and_dilation() {
    let report = run_axiom_suite(&SuiteConfig::default()).unwrap();

    // 50 extra seeded dilation instances on top of the fixed-body suite
    let search = SearchConfig {
        restarts: 2,
        evals_per_restart: 200,
        seed: 7,
        ..SearchConfig::default()
    };
    let mut worst = f64::NEG_INFINITY;
    for i in 0..50usize {
        let n = 1 + (i % 2);
        let k = bodies::random_symmetric_vpolytope(n, 5 + (i % 3), 80_000 + i as u64).unwrap();
        let k2 = k.scale(2.0).unwrap();
        let r1 = jnorm::norm_j(&k).unwrap().value;
        let r2 = jnorm::norm_j(&k2).unwrap().value;
        worst = worst.max((r1 / (4.0 * r2) - 1.0).abs());
        let w1 = lincap::cylinder_witness(&k).unwrap().shadow;
        let w2 = lincap::cylinder_witness(&k2).unwrap().shadow;
        worst = worst.max((w2 / (4.0 * w1) - 1.0).abs());
        // Shadow dilation is checked at the searched map rather than by
        // re-running the search on 2K: vertex enumeration inside the
        // polar dedupes with absolute tolerances, so a rescaled body can
        // hand the search a different start and a different local
        // minimum. The shadow itself scales exactly at any fixed map.
        let best = lincap::minimize_shadow(&k, &search).unwrap();
        let s1 = k.shadow_area(&best.best.map).unwrap();
        let s2 = k2.shadow_area(&best.best.map).unwrap();
        worst = worst.max((s2 / (4.0 * s1) - 1.0).abs());
        if n == 1 {
            let e1 = ehz::ehz_estimate(&k, &ShootConfig::default())
                .unwrap()
                .value;
            let e2 = ehz::ehz_estimate(&k2, &ShootConfig::default())
                .unwrap()
                .value;
            worst = worst.max((e2 / (4.0 * e1) - 1.0).abs());
        }
    }

    verdict(
        9,
        "axioms: monotone over 50 pairs, dilation over 50 instances",
        report.pass && worst <= 1e-9,
        &format!("suite checks all pass, worst dilation defect {worst:.2e}"),
    );
}

#[test]
fn acceptance_10_identical_seeds_emit_identical_bytes() {
    let sh = shared();
    let rerun = run_sandwich_suite(&default_suite(), &SuiteConfig::default());
    let a_csv = emit_report(&sh.outcome.reports, Format::Csv);
    let b_csv = emit_report(&rerun.reports, Format::Csv);
    let a_json = emit_report(&sh.outcome.reports, Format::Json);
    let b_json = emit_report(&rerun.reports, Format::Json);
    verdict(
        10,
        "byte-identical CSV and JSON across identical-seed runs",
        a_csv == b_csv && a_json == b_json,
        &format!("{} CSV bytes compared", a_csv.len()),
    );
}

/// Independent polygon area: Andrew monotone chain over the stored
// points, then the shoelace sum. The stored generator list may carry
// non-extreme points, so a plain angular sort is not enough.
fn shoelace_area(poly: &Body) -> f64 {
    let mut pts: Vec<(f64, f64)> = poly
        .vertices()
        .unwrap()
        .iter()
        .map(|v| (v[0], v[1]))
        .collect();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    pts.dedup();
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let len0 = hull.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= len0 + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
            {
                hull.pop();
            }
            hull.push(p);
        }
        hull.pop();
    }
    let m = hull.len();
    let mut twice = 0.0;
    for i in 0..m {
        let p = hull[i];
        let q = hull[(i + 1) % m];
        twice += p.0 * q.1 - p.1 * q.0;
    }
    twice.abs() / 2.0
}
