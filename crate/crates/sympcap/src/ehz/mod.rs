//! Ekeland–Hofer–Zehnder capacity estimates.
//!
//! Three routes, chosen per body:
//!
//! * planar bodies: the capacity is the area, computed exactly,
//! * ellipsoids (including linear images of balls): the closed form
//!   π / d_max from the spectrum of JQ,
//! * general symmetric polytopes: a shooting method on a smoothed gauge
//!   surface that closes characteristics of ẋ = J∇g and reports the
//!   smallest action found.
//!
//! Shooting is an upper-biased estimate (it can only miss orbits), so every
//! estimate carries the certified lower bound 1/‖J‖ alongside it.

pub mod smooth;

mod flow;

use nalgebra::DVector;

use crate::bodies::Body;
use crate::error::{Error, Result};
use crate::hull::hull_area;
use crate::jnorm;
use crate::lowdisc::sphere_directions;
use crate::par::{self, Exec};
use crate::symplectic::apply_j;
use smooth::SmoothModel;

/// A discretely sampled closed characteristic on the gauge surface.
///
/// `samples` and `times` have length m + 1 with the last entry at t = period;
/// for a well closed orbit the last sample agrees with the first up to
/// `closure_residual`.
#[derive(Debug, Clone)]
pub struct Orbit {
    pub samples: Vec<DVector<f64>>,
    pub times: Vec<f64>,
    pub period: f64,
    pub action: f64,
    pub closure_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EhzMethod {
    ClosedForm,
    Shooting,
    PlanarArea,
}

impl EhzMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            EhzMethod::ClosedForm => "closed-form",
            EhzMethod::Shooting => "shooting",
            EhzMethod::PlanarArea => "planar-area",
        }
    }
}

#[derive(Debug, Clone)]
pub struct EhzEstimate {
    pub value: f64,
    pub method: EhzMethod,
    /// Best orbit found when the shooting route ran, empty otherwise.
    pub orbits: Vec<Orbit>,
    /// 1/‖J‖ for the same body, always a true lower bound for the capacity.
    pub lower_certificate: f64,
}

#[derive(Debug, Clone)]
pub struct ShootConfig {
    pub ode_tol: f64,
    pub max_time: f64,
    pub max_returns: usize,
    pub newton_tol: f64,
    pub newton_iters: usize,
    /// Uniform grid size for the traced orbit.
    pub resample: usize,
    /// Half exponent of the polynomial gauge smoothing, g^(2m) = Σ⟨aᵢ,x⟩^(2m).
    pub smoothing_m: u32,
    pub n_starts: usize,
    pub seed: u64,
    /// Refuse to shoot above this phase space dimension.
    pub max_shoot_dim: usize,
    pub exec: Exec,
}

impl Default for ShootConfig {
    fn default() -> Self {
        ShootConfig {
            ode_tol: 1e-10,
            max_time: 200.0,
            max_returns: 3,
            newton_tol: 1e-9,
            newton_iters: 30,
            resample: 4096,
            smoothing_m: 8,
            n_starts: 64,
            seed: 7,
            max_shoot_dim: 6,
            exec: Exec::Auto,
        }
    }
}

impl ShootConfig {
    fn flow_cfg(&self) -> flow::FlowCfg {
        flow::FlowCfg {
            ode_tol: self.ode_tol,
            max_time: self.max_time,
            newton_tol: self.newton_tol,
            newton_iters: self.newton_iters,
            max_returns: self.max_returns,
            h_max: 0.2,
        }
    }
}

/// Polygonal symplectic action |½ Σ ⟨Jγ_k, γ_{k+1} − γ_k⟩| of a sampled
/// loop. The loop must close: the gap between the last and first sample is
/// checked against a tolerance relative to the orbit scale.
pub fn action(orbit: &Orbit) -> Result<f64> {
    if orbit.samples.len() < 3 {
        return Err(Error::EmptyInput("orbit needs at least three samples"));
    }
    let scale = orbit
        .samples
        .iter()
        .map(|x| x.amax())
        .fold(0.0f64, f64::max)
        .max(1e-300);
    let tol = 1e-6 * scale;
    let residual = (orbit.samples.last().unwrap() - &orbit.samples[0]).norm();
    if residual > tol {
        return Err(Error::OpenLoop { residual, tol });
    }
    let m = orbit.samples.len() - 1;
    let mut acc = 0.0;
    for k in 0..m {
        let jx = apply_j(&orbit.samples[k]);
        let next = if k + 1 == m {
            &orbit.samples[0]
        } else {
            &orbit.samples[k + 1]
        };
        acc += jx.dot(&(next - &orbit.samples[k]));
    }
    Ok((0.5 * acc).abs())
}

/// Close the characteristic through the boundary point in direction x0 and
/// trace one period. The body must be smooth or smoothable: ellipsoids flow
/// exactly, polytopes through the power gauge surrogate of cfg.smoothing_m.
pub fn shoot_characteristic(k: &Body, x0: &DVector<f64>, cfg: &ShootConfig) -> Result<Orbit> {
    let model = SmoothModel::from_body(k, cfg.smoothing_m)?;
    shoot_model(&model, x0, cfg)
}

/// The action is the |½ ∮ ⟨Jγ, γ̇⟩| trapezoid on the uniform grid,
/// spectrally accurate for the smooth periodic integrand.
fn shoot_model(model: &SmoothModel, x0: &DVector<f64>, cfg: &ShootConfig) -> Result<Orbit> {
    if x0.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: x0.len(),
        });
    }
    let fcfg = cfg.flow_cfg();
    let start = model.boundary_point(x0)?;
    let (x_star, period) = flow::close_orbit(model, &start, &fcfg)?;
    let m = cfg.resample.max(16);
    let (samples, times, closure_residual) = flow::trace_uniform(model, &x_star, period, m, &fcfg)?;
    let mut acc = 0.0;
    for sample in samples.iter().take(m) {
        let v = model.velocity(sample)?;
        acc += apply_j(sample).dot(&v);
    }
    let action = (0.5 * acc * period / m as f64).abs();
    Ok(Orbit {
        samples,
        times,
        period,
        action,
        closure_residual,
    })
}

/// |action − period/2|: the degree-1 gauge Hamiltonian makes every closed
/// characteristic satisfy A = T/2 exactly, so this is a residual check.
pub fn verify_action_period(orbit: &Orbit) -> f64 {
    (orbit.action - 0.5 * orbit.period).abs()
}

/// First time the chord γ(t) − γ(0) reaches the boundary of K, located by
/// linear interpolation between samples. Returns (t0, chord gauge at the
/// first sample past the surface). Errors when the chord never gets there,
/// which a genuine closed characteristic cannot do.
pub fn verify_return_lemma(k: &Body, orbit: &Orbit) -> Result<(f64, f64)> {
    if orbit.samples.len() < 2 {
        return Err(Error::EmptyInput("orbit needs at least two samples"));
    }
    let x0 = &orbit.samples[0];
    let thresh = 1.0 - 1e-6;
    let mut g_prev = 0.0;
    for idx in 1..orbit.samples.len() {
        let g = k.gauge(&(&orbit.samples[idx] - x0))?;
        if g >= thresh {
            let dt = orbit.times[idx] - orbit.times[idx - 1];
            let frac = if g > g_prev {
                ((thresh - g_prev) / (g - g_prev)).clamp(0.0, 1.0)
            } else {
                1.0
            };
            return Ok((orbit.times[idx - 1] + frac * dt, g));
        }
        g_prev = g;
    }
    Err(Error::Domain(
        "orbit chord never reaches the gauge surface".into(),
    ))
}

/// Capacity estimate for a centrally symmetric body.
///
/// Planar bodies use the exact area. Bodies with an ellipsoid structure use
/// the closed form from the linear flow ẋ = JQx. Everything else runs the
/// shooting method over coordinate axis starts (these catch the short plane
/// orbits of resonant flows) padded with low-discrepancy directions.
pub fn ehz_estimate(k: &Body, cfg: &ShootConfig) -> Result<EhzEstimate> {
    if !k.is_symmetric(1e-9)? {
        return Err(Error::NotSymmetric);
    }
    let lower_certificate = jnorm::ehz_lower_bound(k)?;
    let dim = k.dim();
    if dim == 2 {
        let value = planar_area(k)?;
        return Ok(EhzEstimate {
            value,
            method: EhzMethod::PlanarArea,
            orbits: Vec::new(),
            lower_certificate,
        });
    }
    if let Some(q) = k.effective_ellipsoid_q() {
        let value = ellipsoid_capacity(&q)?;
        return Ok(EhzEstimate {
            value,
            method: EhzMethod::ClosedForm,
            orbits: Vec::new(),
            lower_certificate,
        });
    }
    if dim > cfg.max_shoot_dim {
        return Err(Error::SizeLimit {
            what: "shooting phase space dimension",
            got: dim,
            limit: cfg.max_shoot_dim,
        });
    }
    let model = SmoothModel::from_body(k, cfg.smoothing_m)?;
    let starts = shooting_starts(dim, cfg);
    let results = par::map_indices(starts.len(), cfg.exec, |i| {
        shoot_model(&model, &starts[i], cfg).ok()
    });
    let mut best: Option<Orbit> = None;
    for orbit in results.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| orbit.action < b.action) {
            best = Some(orbit);
        }
    }
    match best {
        Some(orbit) => Ok(EhzEstimate {
            value: orbit.action,
            method: EhzMethod::Shooting,
            orbits: vec![orbit],
            lower_certificate,
        }),
        None => Err(Error::ShootingFailed {
            tried: starts.len(),
        }),
    }
}

/// Axis directions first, then a deterministic low-discrepancy fill.
fn shooting_starts(dim: usize, cfg: &ShootConfig) -> Vec<DVector<f64>> {
    let mut starts: Vec<DVector<f64>> = (0..dim)
        .map(|i| {
            let mut e = DVector::zeros(dim);
            e[i] = 1.0;
            e
        })
        .collect();
    if cfg.n_starts > dim {
        starts.extend(sphere_directions(dim, cfg.n_starts - dim, cfg.seed));
    }
    starts
}

fn planar_area(k: &Body) -> Result<f64> {
    if let Some(q) = k.effective_ellipsoid_q() {
        let det = q[(0, 0)] * q[(1, 1)] - q[(0, 1)] * q[(1, 0)];
        if det <= 0.0 {
            return Err(Error::Numerical("degenerate planar ellipsoid".into()));
        }
        return Ok(std::f64::consts::PI / det.sqrt());
    }
    let pts: Vec<[f64; 2]> = k.vertices()?.iter().map(|v| [v[0], v[1]]).collect();
    Ok(hull_area(&pts))
}

/// π / d_max where d_max is the largest |Im λ| over the spectrum of JQ.
/// For E(r₁, …, r_n) this is π min rⱼ².
fn ellipsoid_capacity(q: &nalgebra::DMatrix<f64>) -> Result<f64> {
    let jq = crate::symplectic::j_matrix(q.nrows()) * q;
    let eigs = jq.complex_eigenvalues();
    let d_max = eigs.iter().map(|z| z.im.abs()).fold(0.0f64, f64::max);
    if d_max <= 0.0 {
        return Err(Error::Numerical("JQ spectrum has no rotation".into()));
    }
    Ok(std::f64::consts::PI / d_max)
}

#[cfg(test)]
mod tests;
