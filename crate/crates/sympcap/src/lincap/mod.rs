//! Linearized capacities: shadow minimization over Sp(2n) and the largest
//! symplectically embedded ball.
//!
//! The cylindrical side bounds c̄ from above by the area of the (q₁, p₁)
//! shadow of S(K) over symplectic S. Three routes to that area live here:
//! the Rogers–Shephard style product bound 4·h_K(Sᵀe)·h_{K∩v⊥}(SᵀJe) with
//! v = Sᵀe, the constructive cylinder witness built from the ‖J‖ maximizer
//! (which certifies shadow ≤ 4/‖J‖), and a seeded Nelder–Mead search over a
//! Cayley chart of Sp(2n) that polishes the witness.
//!
//! The ball side bounds the linearized Gromov width from below by maximizing
//! π r² over the same chart, where r is the exact inscribed radius of S⁻¹(K)
//! in the Euclidean metric, computed per facet for polytopes and by a
//! generalized eigenvalue for ellipsoids.
//!
//! Translations are dropped throughout: for symmetric bodies the shadow area
//! is translation-invariant and the inscribed ball is largest at the center,
//! so the affine infimum and supremum are attained at t = 0.
//!
//! The rotated cube utilities build the orthogonal p-block rotation whose
//! image of the cube has small linearized width, together with the exact
//! checks (orthogonality, column sup norms, cross-polytope inclusion) that
//! its construction rests on.

use std::f64::consts::{PI, SQRT_2, TAU};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bodies::{self, Body};
use crate::error::{Error, Result};
use crate::jnorm;
use crate::optim;
use crate::par::{map_indices, Exec};
use crate::symplectic::{self, apply_j, SymplecticMap};

/// A symplectic map together with the certified data of its shadow.
#[derive(Debug, Clone)]
pub struct Witness {
    pub map: SymplecticMap,
    /// Exact area of the orthogonal projection of map(K) onto the (q₁, p₁)
    /// plane.
    pub shadow: f64,
    /// Product bound 4·h_K(Sᵀe)·h_{K∩v⊥}(SᵀJe) for the same map; dominates
    /// `shadow` up to roundoff.
    pub product_bound: f64,
    /// v = Sᵀe_{q₁}, the section normal the product bound factors through.
    pub v_used: DVector<f64>,
    /// SᵀJe_{q₁}, the in-section support direction.
    pub w_used: DVector<f64>,
}

/// Outcome of a chart search ([`minimize_shadow`] or [`lin_gromov_estimate`]).
#[derive(Debug, Clone)]
pub struct SearchResult {
    /// The best map found, re-certified through [`Witness`].
    pub best: Witness,
    /// Objective at `best.map`: the shadow area when minimizing, π r² when
    /// maximizing the inscribed ball.
    pub value: f64,
    /// (cumulative evaluations, objective) at each global improvement.
    pub history: Vec<(usize, f64)>,
    pub seed: u64,
    pub budget_used: usize,
    /// True when the run that produced `best` stopped on its evaluation
    /// budget rather than simplex collapse.
    pub exhausted: bool,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub restarts: usize,
    pub evals_per_restart: usize,
    pub seed: u64,
    /// Initial simplex edge, also the half-width of the seeded chart offsets.
    pub init_step: f64,
    pub exec: Exec,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            evals_per_restart: 2000,
            seed: 11,
            init_step: 0.25,
            exec: Exec::Auto,
        }
    }
}

fn basis_e1(dim: usize) -> DVector<f64> {
    let mut e = DVector::zeros(dim);
    e[0] = 1.0;
    e
}

/// 4·h_K(Sᵀe)·h_{K∩v⊥}(SᵀJe) with e = e_{q₁} and v = Sᵀe.
///
/// h_K = gauge of the polar, so the first factor is ‖Sᵀe‖_{K°}; the second
/// is the support of the central section K ∩ v⊥ in direction SᵀJe. The
/// product dominates the shadow area of S(K) for every symmetric K.
pub fn rs_product_bound(k: &Body, map: &SymplecticMap) -> Result<f64> {
    let dim = k.dim();
    if map.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: map.dim(),
        });
    }
    if !k.is_symmetric(1e-9)? {
        return Err(Error::NotSymmetric);
    }
    let st = map.linear().transpose();
    let e = basis_e1(dim);
    let v = &st * &e;
    let w = &st * apply_j(&e);
    Ok(4.0 * k.support(&v)? * k.section_support(&v, &w)?)
}

fn witness_for_map(k: &Body, map: SymplecticMap) -> Result<Witness> {
    let shadow = k.shadow_area(&map)?;
    let product_bound = rs_product_bound(k, &map)?;
    let st = map.linear().transpose();
    let e = basis_e1(k.dim());
    let v_used = &st * &e;
    let w_used = &st * apply_j(&e);
    Ok(Witness {
        map,
        shadow,
        product_bound,
        v_used,
        w_used,
    })
}

/// Constructive cylinder witness: a symplectic map whose shadow certifies
/// c̄_lin(K) ≤ 4/‖J‖_{K°→K}.
///
/// The ‖J‖ maximizer v minimizes ‖v‖_{K°}/‖Jv‖_K over directions; take v̂
/// Euclidean-unit. Among all w with ω(w, v̂) = ⟨w, Jv̂⟩ = 1 the smallest
/// section seminorm ‖w‖_{K_v̂°} is 1/‖Jv̂‖_K, attained at the Hahn–Banach
/// functional w = P(g)/⟨Jv̂, g⟩, where g maximizes ⟨Jv̂, ·⟩ over K° and P
/// projects out v̂ (g certifies ⟨g, y⟩ ≤ 1 on the section while the
/// denominator equals ‖Jv̂‖_K). Completing (v̂, w) to S ∈ Sp(2n) with
/// Sᵀe_{q₁} = v̂ then pins the product bound, and with it the shadow, at
/// 4‖v̂‖_{K°}/‖Jv̂‖_K = 4/‖J‖. Pairing with Jv̂ itself would not do: its
/// section seminorm can exceed the optimum on generic bodies.
pub fn cylinder_witness(k: &Body) -> Result<Witness> {
    if !k.is_symmetric(1e-9)? {
        return Err(Error::NotSymmetric);
    }
    let nj = jnorm::norm_j(k)?;
    let vn = nj.witness_v.norm();
    if vn < 1e-12 {
        return Err(Error::Numerical("degenerate norm witness".into()));
    }
    let vhat = nj.witness_v.unscale(vn);
    let a = apply_j(&vhat);
    let g = k.polar_support_point(&a)?;
    let denom = a.dot(&g);
    if denom <= 1e-12 {
        return Err(Error::Numerical("degenerate polar pairing".into()));
    }
    let w = (&g - vhat.scale(g.dot(&vhat))).unscale(denom);
    let completion = symplectic::complete_to_symplectic(&vhat, &w, 1e-9)?;
    witness_for_map(k, completion.map)
}

/// Exact largest r with S(B(r)) + t ⊆ K for the affine map x ↦ Lx + t.
///
/// H-polytopes: r = min over facets ⟨aᵢ, x⟩ ≤ 1 of (1 − ⟨aᵢ, t⟩)/|Lᵀaᵢ|.
/// Ellipsoids xᵀQx ≤ 1 at t = 0: r = λ_max(LᵀQL)^{−1/2}. A translation
/// that leaves the body gives radius 0.
pub fn inscribed_ball_radius(k: &Body, map: &SymplecticMap) -> Result<f64> {
    let dim = k.dim();
    if map.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: map.dim(),
        });
    }
    let l = map.linear();
    let t = map.translation();
    if let Some(q) = k.effective_ellipsoid_q() {
        let off = (&q * t).dot(t);
        if off >= 1.0 {
            return Ok(0.0);
        }
        if off > 1e-24 {
            return Err(Error::Representation(
                "inscribed radius with an interior translation is only implemented for polytopes",
            ));
        }
        let a = l.transpose() * q * l;
        let sym = (&a + a.transpose()) * 0.5;
        let lambda = sym
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .fold(f64::NEG_INFINITY, |m, &x| m.max(x));
        if lambda.is_nan() || lambda <= 0.0 {
            return Err(Error::Numerical("degenerate ellipsoid quadric".into()));
        }
        return Ok(1.0 / lambda.sqrt());
    }
    let rows = k.halfspace_rows()?;
    let mut r = f64::INFINITY;
    for a in &rows {
        let margin = 1.0 - a.dot(t);
        if margin <= 0.0 {
            return Ok(0.0);
        }
        let denom = (l.transpose() * a).norm();
        if denom > 0.0 {
            r = r.min(margin / denom);
        }
    }
    if !r.is_finite() {
        return Err(Error::Unbounded);
    }
    Ok(r)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Goal {
    MinShadow,
    MaxWidth,
}

/// Signed objective: Nelder–Mead minimizes, so the width goal is negated.
fn objective(goal: Goal, k: &Body, map: &SymplecticMap) -> Result<f64> {
    match goal {
        Goal::MinShadow => k.shadow_area(map),
        Goal::MaxWidth => {
            let r = inscribed_ball_radius(k, map)?;
            Ok(-(PI * r * r))
        }
    }
}

fn report_value(goal: Goal, signed: f64) -> f64 {
    match goal {
        Goal::MinShadow => signed,
        Goal::MaxWidth => -signed,
    }
}

/// Packs the upper triangle of a symmetric chart matrix.
fn sym_from_params(dim: usize, theta: &DVector<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(dim, dim);
    let mut idx = 0;
    for i in 0..dim {
        for j in i..dim {
            m[(i, j)] = theta[idx];
            m[(j, i)] = theta[idx];
            idx += 1;
        }
    }
    m
}

fn map_from_chart(center: &SymplecticMap, theta: &DVector<f64>) -> Result<SymplecticMap> {
    let m = sym_from_params(center.dim(), theta);
    let s = symplectic::cayley(&m)?;
    SymplecticMap::linear_part(s * center.linear())
}

fn eval_chart(goal: Goal, k: &Body, center: &SymplecticMap, theta: &DVector<f64>) -> f64 {
    // Out-of-domain chart points and maps that drift off Sp(2n) are walled
    // off with +inf; Nelder-Mead contracts away from them.
    match map_from_chart(center, theta) {
        Ok(map) => objective(goal, k, &map).unwrap_or(f64::INFINITY),
        Err(_) => f64::INFINITY,
    }
}

fn offset_rng(seed: u64, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Restart-with-re-centering driver shared by both chart searches.
///
/// Restarts run in waves of four. The first wave starts from the identity
/// and from the cylinder witness (so the final value can never exceed the
/// witness shadow); later waves re-center the Cayley chart on the best map
/// found so far and perturb the start with seeded offsets. Members of a wave
/// run concurrently; the reduction is a deterministic min by (value, start
/// index), so results do not depend on the backend.
fn chart_search(k: &Body, cfg: &SearchConfig, goal: Goal) -> Result<SearchResult> {
    let dim = k.dim();
    symplectic::check_even_dim(dim)?;
    if cfg.restarts == 0 || cfg.evals_per_restart == 0 {
        return Err(Error::Domain("search budget must be positive".into()));
    }
    let identity = SymplecticMap::identity(dim);
    // Probing the identity first surfaces representation errors before any
    // budget is spent; inside the search the same errors become +inf.
    let mut best_signed = objective(goal, k, &identity)?;
    let mut best_map = identity.clone();
    let mut history: Vec<(usize, f64)> = vec![(0, report_value(goal, best_signed))];
    // The witness joins the start set outright, so the result can never
    // exceed it, whatever the restart budget.
    let witness = cylinder_witness(k)?;
    let witness_signed = objective(goal, k, &witness.map)?;
    if witness_signed < best_signed {
        best_signed = witness_signed;
        best_map = witness.map.clone();
        history.push((0, report_value(goal, best_signed)));
    }
    let mcoords = dim * (dim + 1) / 2;
    let nm_opts = optim::Options {
        max_evals: cfg.evals_per_restart,
        init_step: cfg.init_step,
        tol_rel: 1e-12,
    };

    let mut budget_used = 0usize;
    let mut exhausted = false;

    let wave_size = cfg.restarts.min(4);
    let waves = cfg.restarts.div_ceil(wave_size);
    for wave in 0..waves {
        let members = wave_size.min(cfg.restarts - wave * wave_size);
        let center = best_map.clone();
        let runs: Vec<(optim::MinResult, SymplecticMap)> = map_indices(members, cfg.exec, |j| {
            let index = wave * wave_size + j;
            let start_center = if wave == 0 && j == 1 {
                witness.map.clone()
            } else if wave == 0 {
                identity.clone()
            } else {
                center.clone()
            };
            let polish = j == 0 || (wave == 0 && j == 1);
            let theta0 = if polish {
                DVector::zeros(mcoords)
            } else {
                let mut rng = offset_rng(cfg.seed, index);
                DVector::from_fn(mcoords, |_, _| {
                    rng.random_range(-cfg.init_step..=cfg.init_step)
                })
            };
            let res = optim::minimize(
                |theta| eval_chart(goal, k, &start_center, theta),
                &theta0,
                &nm_opts,
            );
            (res, start_center)
        });
        for (res, start_center) in runs {
            budget_used += res.evals;
            if res.value < best_signed {
                best_signed = res.value;
                best_map = map_from_chart(&start_center, &res.x)?;
                exhausted = !res.converged;
                history.push((budget_used, report_value(goal, best_signed)));
            }
        }
    }

    let best = witness_for_map(k, best_map)?;
    Ok(SearchResult {
        best,
        value: report_value(goal, best_signed),
        history,
        seed: cfg.seed,
        budget_used,
        exhausted,
    })
}

/// Upper estimate of c̄_lin(K): the smallest shadow area found over the
/// Cayley chart. Never exceeds the cylinder witness value, which seeds the
/// start set.
pub fn minimize_shadow(k: &Body, cfg: &SearchConfig) -> Result<SearchResult> {
    if !k.is_symmetric(1e-9)? {
        return Err(Error::NotSymmetric);
    }
    chart_search(k, cfg, Goal::MinShadow)
}

/// Lower estimate of the linearized Gromov width: the largest π r² with
/// S(B(r)) ⊆ K found over the chart. The identity is always in the start
/// set, so the result is at least π·(inscribed Euclidean radius)².
pub fn lin_gromov_estimate(k: &Body, cfg: &SearchConfig) -> Result<SearchResult> {
    chart_search(k, cfg, Goal::MaxWidth)
}

/// Outcome of a seeded linearized-width sweep over symplectic samples.
#[derive(Debug, Clone)]
pub struct WidthSweep {
    pub samples: usize,
    /// Largest π r² over all sampled maps.
    pub max_value: f64,
    /// Sample index attaining `max_value` (first among ties).
    pub argmax: usize,
    /// The bound the sweep asserts: π + 1e−9.
    pub bound: f64,
}

/// Samples seeded symplectic maps (Cayley chart, scale-varied) and asserts
/// that π·inscribed_ball_radius(O(Q), S)² never exceeds π + 1e−9, Q the
/// cube. A violation is reported as an error naming the counterexample; it
/// would falsify the run, not the statement.
pub fn check_cube_lin_width(o: &DMatrix<f64>, samples: usize, seed: u64) -> Result<WidthSweep> {
    let dim = o.nrows();
    if o.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: o.ncols(),
        });
    }
    symplectic::check_even_dim(dim)?;
    let resid = (o.transpose() * o - DMatrix::identity(dim, dim)).amax();
    if resid > 1e-9 {
        return Err(Error::Domain(format!(
            "matrix is not orthogonal: residual {resid:.3e}"
        )));
    }
    if samples == 0 {
        return Err(Error::EmptyInput("width sweep needs samples"));
    }
    let body = Body::linear_image(bodies::cube(dim / 2), o.clone())?;
    const SCALES: [f64; 5] = [0.05, 0.15, 0.4, 1.0, 2.5];
    let values = map_indices(samples, Exec::Auto, |i| {
        let mut rng = offset_rng(seed, i);
        let scale = SCALES[i % SCALES.len()];
        let s = match symplectic::random_symplectic(dim, scale, &mut rng) {
            Ok(s) => s,
            Err(_) => return f64::NEG_INFINITY,
        };
        let map = match SymplecticMap::linear_part(s) {
            Ok(m) => m,
            Err(_) => return f64::NEG_INFINITY,
        };
        match inscribed_ball_radius(&body, &map) {
            Ok(r) => PI * r * r,
            Err(_) => f64::NEG_INFINITY,
        }
    });
    let mut max_value = f64::NEG_INFINITY;
    let mut argmax = 0usize;
    for (i, &v) in values.iter().enumerate() {
        if v > max_value {
            max_value = v;
            argmax = i;
        }
    }
    let bound = PI + 1e-9;
    if max_value > bound {
        return Err(Error::Domain(format!(
            "width sample {argmax} exceeds the cube bound: {max_value:.12} > {bound:.12}"
        )));
    }
    Ok(WidthSweep {
        samples,
        max_value,
        argmax,
        bound,
    })
}

/// The n×n orthogonal rotation block, n even. Row k (1-based) holds
/// √2·sin(2πkj/n) for k < n/2, the alternating signs (−1)ʲ at k = n/2,
/// √2·cos(2πkj/n) for n/2 < k < n, and all ones at k = n, everything
/// scaled by 1/√n. These are the real DFT basis rows, so the matrix is
/// orthogonal, while every entry stays ≤ √2/√n in magnitude.
pub fn rotated_cube_matrix(n: usize) -> Result<DMatrix<f64>> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "rotation block needs an even n >= 2, got {n}"
        )));
    }
    let inv_sqrt_n = 1.0 / (n as f64).sqrt();
    Ok(DMatrix::from_fn(n, n, |k0, j0| {
        let (k, j) = (k0 + 1, j0 + 1);
        let phase = TAU * (k * j) as f64 / n as f64;
        let val = if k < n / 2 {
            SQRT_2 * phase.sin()
        } else if k == n / 2 {
            if j % 2 == 0 {
                1.0
            } else {
                -1.0
            }
        } else if k < n {
            SQRT_2 * phase.cos()
        } else {
            1.0
        };
        val * inv_sqrt_n
    }))
}

/// Largest column sup norm max_i ‖O'eᵢ‖_∞; asserts the √2/√n bound that
/// makes every image of a scaled cross-polytope vertex land in the cube.
pub fn check_linf_columns(oprime: &DMatrix<f64>) -> Result<f64> {
    let n = oprime.nrows();
    if n == 0 || oprime.ncols() != n {
        return Err(Error::DimensionMismatch {
            expected: n.max(1),
            got: oprime.ncols(),
        });
    }
    let max = oprime.amax();
    let bound = SQRT_2 / (n as f64).sqrt() + 1e-12;
    if max > bound {
        return Err(Error::Domain(format!(
            "column sup norm {max:.15} exceeds {bound:.15}"
        )));
    }
    Ok(max)
}

/// Verifies O'(±√n·eᵢ) ∈ [−√2, √2]ⁿ for all i. By convexity this implies
/// O'(B₁ⁿ(√n)) ⊆ [−√2, √2]ⁿ, the inclusion behind the rotated cube. The
/// guard 1e−12 covers trig rounding only; the inclusion itself is exact.
pub fn check_cross_polytope_inclusion(n: usize) -> Result<bool> {
    let oprime = rotated_cube_matrix(n)?;
    let bound = SQRT_2 + 1e-12;
    let scale = (n as f64).sqrt();
    for i in 0..n {
        // Symmetric vertices map to opposite points; one sign suffices.
        if oprime.column(i).amax() * scale > bound {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The rotated cube: the image of [−1, 1]^{2n} under blockdiag(I, O'),
/// identity on the q block and the rotation on the p block.
pub fn build_rotated_cube(n: usize) -> Result<Body> {
    let oprime = rotated_cube_matrix(n)?;
    let dim = 2 * n;
    let mut t = DMatrix::identity(dim, dim);
    t.view_mut((n, n), (n, n)).copy_from(&oprime);
    Body::linear_image(bodies::cube(n), t)
}
