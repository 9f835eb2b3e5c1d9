//! Integration of ẋ = J∇g and the Poincaré return machinery.
//!
//! The stepper is an embedded Cash–Karp Runge–Kutta 4(5) pair with the
//! fourth order difference as error estimate, plus a renormalization
//! x ← x/g(x) after every accepted step so trajectories stay on the unit
//! gauge surface to integrator accuracy. Returns to the section through
//! the start point are located by sign change and refined by Newton in
//! time; closed orbits are found by a Broyden updated Newton iteration on
//! the return map restricted to a chart of the section.

use nalgebra::{DMatrix, DVector};

use super::smooth::SmoothModel;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct FlowCfg {
    pub ode_tol: f64,
    pub max_time: f64,
    pub newton_tol: f64,
    pub newton_iters: usize,
    pub max_returns: usize,
    pub h_max: f64,
}

/// Residual scale the chart Newton can realistically reach: accumulated
/// integrator drift over a full period sits well above ode_tol.
fn direct_tol(cfg: &FlowCfg) -> f64 {
    cfg.newton_tol.max(1e-6)
}

const CK_A: [[f64; 5]; 5] = [
    [0.2, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0],
    [0.3, -0.9, 1.2, 0.0, 0.0],
    [-11.0 / 54.0, 2.5, -70.0 / 27.0, 35.0 / 27.0, 0.0],
    [
        1631.0 / 55296.0,
        175.0 / 512.0,
        575.0 / 13824.0,
        44275.0 / 110592.0,
        253.0 / 4096.0,
    ],
];
const CK_B5: [f64; 6] = [
    37.0 / 378.0,
    0.0,
    250.0 / 621.0,
    125.0 / 594.0,
    0.0,
    512.0 / 1771.0,
];
const CK_B4: [f64; 6] = [
    2825.0 / 27648.0,
    0.0,
    18575.0 / 48384.0,
    13525.0 / 55296.0,
    277.0 / 14336.0,
    0.25,
];

/// One trial Cash–Karp step: fifth order solution and embedded error.
fn ck_step(model: &SmoothModel, x: &DVector<f64>, h: f64) -> Result<(DVector<f64>, f64)> {
    let mut k: Vec<DVector<f64>> = Vec::with_capacity(6);
    k.push(model.velocity(x)?);
    for a_row in &CK_A {
        let mut arg = x.clone();
        for (j, kj) in k.iter().enumerate() {
            let a = a_row[j];
            if a != 0.0 {
                arg += kj * (a * h);
            }
        }
        k.push(model.velocity(&arg)?);
    }
    let mut y5 = x.clone();
    let mut err = DVector::zeros(x.len());
    for (j, kj) in k.iter().enumerate() {
        y5 += kj * (CK_B5[j] * h);
        err += kj * ((CK_B5[j] - CK_B4[j]) * h);
    }
    Ok((y5, err.amax()))
}

/// One accepted adaptive step: returns (next state, step taken, suggested
/// next step). The accepted state is renormalized onto the gauge surface.
pub fn adaptive_step(
    model: &SmoothModel,
    x: &DVector<f64>,
    h_try: f64,
    tol: f64,
    h_max: f64,
) -> Result<(DVector<f64>, f64, f64)> {
    let mut h = h_try.min(h_max).max(1e-12);
    let scale = tol * x.amax().max(1.0);
    for _ in 0..60 {
        let (mut y, err) = ck_step(model, x, h)?;
        if err <= scale || h <= 1e-10 {
            let grow = if err > 0.0 {
                (0.9 * (scale / err).powf(0.2)).clamp(0.2, 5.0)
            } else {
                5.0
            };
            let g = model.gauge(&y);
            if g > 1e-12 {
                y /= g;
            }
            return Ok((y, h, (h * grow).min(h_max)));
        }
        h *= (0.9 * (scale / err).powf(0.25)).clamp(0.1, 0.9);
    }
    Err(Error::Numerical(
        "step size underflow in the gauge flow".into(),
    ))
}

/// Integrate for a fixed duration, renormalizing onto the surface.
pub fn integrate_for(
    model: &SmoothModel,
    x: &DVector<f64>,
    duration: f64,
    cfg: &FlowCfg,
) -> Result<DVector<f64>> {
    let mut x = x.clone();
    let mut t = 0.0;
    let mut h = duration.min(cfg.h_max).max(1e-12);
    while t < duration {
        let h_cap = (duration - t).min(cfg.h_max);
        let (y, taken, h_next) = adaptive_step(model, &x, h.min(h_cap), cfg.ode_tol, h_cap)?;
        x = y;
        t += taken;
        h = h_next;
    }
    Ok(x)
}

/// The section plane through x0 transverse to the flow, with an
/// orthonormal chart of the (2n−2)-dimensional slice of the surface.
pub struct SectionChart {
    pub x0: DVector<f64>,
    /// Unit flow direction at x0; the section is ⟨x − x0, d0⟩ = 0.
    pub d0: DVector<f64>,
    /// Orthonormal basis of {d0, ∇g(x0)}⊥, possibly empty when 2n = 2.
    pub basis: Vec<DVector<f64>>,
}

impl SectionChart {
    pub fn new(model: &SmoothModel, x0: &DVector<f64>) -> Result<Self> {
        let dim = x0.len();
        let v = model.velocity(x0)?;
        let speed = v.norm();
        if speed < 1e-12 {
            return Err(Error::Numerical("stationary point on the boundary".into()));
        }
        let d0 = v / speed;
        let n_raw = model.gradient(x0)?;
        let mut frame: Vec<DVector<f64>> = vec![d0.clone()];
        let n_proj = &n_raw - &d0 * d0.dot(&n_raw);
        if n_proj.norm() > 1e-10 {
            frame.push(n_proj.normalize());
        }
        let mut basis = Vec::new();
        for k in 0..dim {
            if frame.len() + basis.len() >= dim {
                break;
            }
            let mut e = DVector::zeros(dim);
            e[k] = 1.0;
            for b in frame.iter().chain(basis.iter()) {
                let p = b.dot(&e);
                e -= b * p;
            }
            if e.norm() > 1e-8 {
                basis.push(e.normalize());
            }
        }
        Ok(SectionChart {
            x0: x0.clone(),
            d0,
            basis,
        })
    }

    /// Chart point u ↦ the nearby point of ∂K ∩ section, by alternating
    /// the two projections (transversal, so the iteration contracts).
    pub fn embed(&self, model: &SmoothModel, u: &DVector<f64>) -> Result<DVector<f64>> {
        let mut y = self.x0.clone();
        for (j, b) in self.basis.iter().enumerate() {
            y += b * u[j];
        }
        for _ in 0..30 {
            let g = model.gauge(&y);
            if g < 1e-12 {
                return Err(Error::Numerical(
                    "chart point collapsed to the origin".into(),
                ));
            }
            y /= g;
            let s = (&y - &self.x0).dot(&self.d0);
            y -= &self.d0 * s;
            if (model.gauge(&y) - 1.0).abs() < 1e-13 && s.abs() < 1e-13 {
                let g2 = model.gauge(&y);
                y /= g2;
                return Ok(y);
            }
        }
        Err(Error::Numerical("chart projection did not converge".into()))
    }

    pub fn coords(&self, y: &DVector<f64>) -> DVector<f64> {
        let d = y - &self.x0;
        DVector::from_fn(self.basis.len(), |j, _| self.basis[j].dot(&d))
    }

    fn s_of(&self, x: &DVector<f64>) -> f64 {
        (x - &self.x0).dot(&self.d0)
    }
}

/// Flow from z until the k-th transversal upcrossing of the section.
/// `Err(hits)` reports how many returns happened before max_time ran out,
/// so callers can tell "section never reached" from "Newton budget".
pub fn kth_return_counted(
    model: &SmoothModel,
    chart: &SectionChart,
    z: &DVector<f64>,
    k: usize,
    cfg: &FlowCfg,
) -> std::result::Result<(DVector<f64>, f64), usize> {
    let eps_arm = 1e-6 * chart.x0.amax().max(1.0);
    let mut x = z.clone();
    let mut t = 0.0;
    let mut h = 1e-3;
    let mut armed = false;
    let mut hits = 0usize;
    let mut s_prev = chart.s_of(&x);
    while t < cfg.max_time {
        let Ok((y, taken, h_next)) = adaptive_step(model, &x, h, cfg.ode_tol, cfg.h_max) else {
            return Err(hits);
        };
        let s_new = chart.s_of(&y);
        if !armed {
            if s_new < -eps_arm {
                armed = true;
            }
        } else if s_prev < 0.0 && s_new >= 0.0 {
            if let Ok((xc, tc)) = refine_crossing(model, chart, &x, taken, cfg) {
                hits += 1;
                if hits == k {
                    return Ok((xc, t + tc));
                }
            } else {
                return Err(hits);
            }
            armed = false;
        }
        x = y;
        t += taken;
        h = h_next;
        s_prev = s_new;
    }
    Err(hits)
}

pub fn kth_return(
    model: &SmoothModel,
    chart: &SectionChart,
    z: &DVector<f64>,
    k: usize,
    cfg: &FlowCfg,
) -> Result<(DVector<f64>, f64)> {
    kth_return_counted(model, chart, z, k, cfg).map_err(|hits| {
        Error::Numerical(format!(
            "no section return within max_time (got {hits} of {k})"
        ))
    })
}

/// Newton in time on s(τ) = ⟨x(τ) − x0, d0⟩ inside one accepted step.
fn refine_crossing(
    model: &SmoothModel,
    chart: &SectionChart,
    x_from: &DVector<f64>,
    step: f64,
    cfg: &FlowCfg,
) -> Result<(DVector<f64>, f64)> {
    let s0 = chart.s_of(x_from);
    let x_end = integrate_for(model, x_from, step, cfg)?;
    let s1 = chart.s_of(&x_end);
    // linear first guess from the endpoint values
    let mut tau = if (s1 - s0).abs() > 1e-30 {
        (step * (-s0) / (s1 - s0)).clamp(0.0, step)
    } else {
        0.5 * step
    };
    let mut xc = x_end;
    for _ in 0..12 {
        xc = integrate_for(model, x_from, tau, cfg)?;
        let s = chart.s_of(&xc);
        if s.abs() <= 1e-12 * chart.x0.amax().max(1.0) {
            return Ok((xc, tau));
        }
        let ds = model.velocity(&xc)?.dot(&chart.d0);
        if ds.abs() < 1e-14 {
            break;
        }
        tau -= s / ds;
        if !(0.0..=step * 1.5).contains(&tau) {
            tau = tau.clamp(0.0, step);
        }
    }
    let s = chart.s_of(&xc);
    if s.abs() <= 1e-8 {
        return Ok((xc, tau));
    }
    Err(Error::Numerical(
        "section crossing refinement stalled".into(),
    ))
}

/// All section returns from z in one integration pass, at most `maxk`.
fn collect_returns(
    model: &SmoothModel,
    chart: &SectionChart,
    z: &DVector<f64>,
    maxk: usize,
    cfg: &FlowCfg,
) -> Vec<(DVector<f64>, f64)> {
    let eps_arm = 1e-6 * chart.x0.amax().max(1.0);
    let mut out = Vec::new();
    let mut x = z.clone();
    let mut t = 0.0;
    let mut h = 1e-3;
    let mut armed = false;
    let mut s_prev = chart.s_of(&x);
    while t < cfg.max_time && out.len() < maxk {
        let Ok((y, taken, h_next)) = adaptive_step(model, &x, h, cfg.ode_tol, cfg.h_max) else {
            break;
        };
        let s_new = chart.s_of(&y);
        if !armed {
            if s_new < -eps_arm {
                armed = true;
            }
        } else if s_prev < 0.0 && s_new >= 0.0 {
            match refine_crossing(model, chart, &x, taken, cfg) {
                Ok((xc, tc)) => out.push((xc, t + tc)),
                Err(_) => break,
            }
            armed = false;
        }
        x = y;
        t += taken;
        h = h_next;
        s_prev = s_new;
    }
    out
}

/// Newton on the chart displacement F(u) = Bᵀ(R_k(u) − embed(u)) for
/// k = 1, …, max_returns. Accepts immediately when the start is already
/// periodic (resonant flows make every section point a fixed point).
pub fn close_orbit(
    model: &SmoothModel,
    x0: &DVector<f64>,
    cfg: &FlowCfg,
) -> Result<(DVector<f64>, f64)> {
    let chart = SectionChart::new(model, x0)?;
    let mcoords = chart.basis.len();
    let scale = x0.amax().max(1.0);
    let start = chart.embed(model, &DVector::zeros(mcoords))?;
    let crossings = collect_returns(model, &chart, &start, cfg.max_returns.max(1), cfg);
    if crossings.is_empty() {
        return Err(Error::Numerical("no section return within max_time".into()));
    }
    for (ret, period) in &crossings {
        let f0 = chart.coords(&(ret - &start));
        if mcoords == 0 || f0.amax() <= direct_tol(cfg) * scale {
            return Ok((start, *period));
        }
    }
    for (idx, (ret, period)) in crossings.iter().enumerate() {
        let k = idx + 1;
        let f0 = chart.coords(&(ret - &start));
        // Newton only has a chance near a fixed point of the k-th return
        // map; for the repeated maps insist on a near miss up front
        if k > 1 && f0.amax() > 0.1 * scale {
            continue;
        }
        if let Ok(found) = newton_on_chart(model, &chart, k, (f0, *period), cfg) {
            return Ok(found);
        }
    }
    Err(Error::Numerical(
        "return-map Newton found no closed orbit".into(),
    ))
}

/// Damped Newton with Broyden updates: one return-map evaluation per
/// iteration after the initial finite difference Jacobian, with a single
/// fresh Jacobian rebuild allowed when a step fails to decrease ‖F‖.
fn newton_on_chart(
    model: &SmoothModel,
    chart: &SectionChart,
    k: usize,
    f_and_period_at_zero: (DVector<f64>, f64),
    cfg: &FlowCfg,
) -> Result<(DVector<f64>, f64)> {
    let mcoords = chart.basis.len();
    let scale = chart.x0.amax().max(1.0);
    // each evaluation integrates k return legs; cap the total budget and
    // the per-leg flow time so a hopeless start fails in bounded time
    let evals = std::cell::Cell::new(0usize);
    let eval_budget = 4 * mcoords + 8;
    let leg_cfg = FlowCfg {
        max_time: (4.0 * f_and_period_at_zero.1).min(cfg.max_time),
        ..*cfg
    };
    let eval = |u: &DVector<f64>| -> Result<(DVector<f64>, f64)> {
        if evals.get() >= eval_budget {
            return Err(Error::Numerical(
                "return-map evaluation budget spent".into(),
            ));
        }
        evals.set(evals.get() + 1);
        let z = chart.embed(model, u)?;
        let (ret, period) = kth_return(model, chart, &z, k, &leg_cfg)?;
        Ok((chart.coords(&(&ret - &z)), period))
    };
    let fd_jacobian = |u: &DVector<f64>, f: &DVector<f64>| -> Result<DMatrix<f64>> {
        let delta = 1e-6 * u.amax().max(1.0);
        let mut jac = DMatrix::zeros(mcoords, mcoords);
        for j in 0..mcoords {
            let mut up = u.clone();
            up[j] += delta;
            let (fj, _) = eval(&up)?;
            jac.set_column(j, &((&fj - f) / delta));
        }
        Ok(jac)
    };

    let mut u = DVector::zeros(mcoords);
    let (mut f, mut period) = f_and_period_at_zero;
    let mut jac = fd_jacobian(&u, &f)?;
    let mut rebuilt = false;
    let mut slow_iters = 0usize;
    for _ in 0..cfg.newton_iters {
        if f.amax() <= cfg.newton_tol * scale {
            break;
        }
        let Some(mut du) = jac.clone().full_piv_lu().solve(&(-&f)) else {
            break;
        };
        // near-identity return maps give wild Newton steps; keep the
        // iterate inside the chart's trust region
        let du_len = du.amax();
        if du_len > 0.5 * scale {
            du *= 0.5 * scale / du_len;
        }
        let mut moved = false;
        let mut lambda = 1.0;
        let f_before = f.amax();
        for _ in 0..6 {
            let cand = &u + &du * lambda;
            if let Ok((fc, pc)) = eval(&cand) {
                if fc.amax() < f.amax() {
                    let step = &du * lambda;
                    let df = &fc - &f;
                    let denom = step.norm_squared();
                    if denom > 1e-300 {
                        jac += (df - &jac * &step) * step.transpose() / denom;
                    }
                    u = cand;
                    f = fc;
                    period = pc;
                    moved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !moved {
            if rebuilt {
                break;
            }
            jac = fd_jacobian(&u, &f)?;
            rebuilt = true;
            continue;
        }
        // genuine Newton convergence is at least linear with a healthy
        // rate; creeping progress means there is no fixed point nearby
        if f.amax() > 0.7 * f_before {
            slow_iters += 1;
            if slow_iters >= 3 {
                break;
            }
        } else {
            slow_iters = 0;
        }
    }
    // integrator noise caps how far the residual can be pushed down
    if f.amax() <= direct_tol(cfg) * scale {
        let z = chart.embed(model, &u)?;
        return Ok((z, period));
    }
    Err(Error::Numerical(
        "return-map Newton did not converge".into(),
    ))
}

/// Dense pass over one period: adaptive nodes with states and velocities,
/// then cubic Hermite resampling onto a uniform m-point grid.
pub fn trace_uniform(
    model: &SmoothModel,
    x_star: &DVector<f64>,
    period: f64,
    m: usize,
    cfg: &FlowCfg,
) -> Result<(Vec<DVector<f64>>, Vec<f64>, f64)> {
    // cubic interpolation between nodes is only fourth order accurate, so
    // node spacing must shrink where the flow direction turns fast (the
    // smoothed corners); the ODE error control alone does not see this
    // because renormalization absorbs most of the local error
    let h_cap = cfg.h_max.min(period / 256.0).max(1e-9);
    let turn_cap = 0.008;
    let mut nodes_t = vec![0.0f64];
    let mut nodes_x = vec![x_star.clone()];
    let mut nodes_v = vec![model.velocity(x_star)?];
    let mut x = x_star.clone();
    let mut t = 0.0;
    let mut h = h_cap;
    while t < period {
        let cap = (period - t).min(h_cap);
        let (y, taken, h_next) = adaptive_step(model, &x, h.min(cap), cfg.ode_tol, cap)?;
        let v_new = model.velocity(&y)?;
        let v_prev = nodes_v.last().expect("seeded above");
        let turn = (v_new.normalize() - v_prev.normalize()).norm();
        if turn > 2.0 * turn_cap && taken > 1e-7 {
            h = taken * turn_cap / turn;
            continue;
        }
        x = y;
        t += taken;
        h = h_next.min(taken * turn_cap / turn.max(0.25 * turn_cap));
        nodes_t.push(t);
        nodes_x.push(x.clone());
        nodes_v.push(v_new);
    }
    let closure_residual = (&x - x_star).norm();

    let mut samples = Vec::with_capacity(m + 1);
    let mut times = Vec::with_capacity(m + 1);
    let mut seg = 0usize;
    for kidx in 0..=m {
        let tk = period * (kidx as f64) / (m as f64);
        while seg + 2 < nodes_t.len() && nodes_t[seg + 1] < tk {
            seg += 1;
        }
        let (t0, t1) = (nodes_t[seg], nodes_t[seg + 1]);
        let hseg = (t1 - t0).max(1e-300);
        let s = ((tk - t0) / hseg).clamp(0.0, 1.0);
        let (h00, h10, h01, h11) = hermite_weights(s);
        let xk = &nodes_x[seg] * h00
            + &nodes_v[seg] * (h10 * hseg)
            + &nodes_x[seg + 1] * h01
            + &nodes_v[seg + 1] * (h11 * hseg);
        samples.push(xk);
        times.push(tk);
    }
    Ok((samples, times, closure_residual))
}

fn hermite_weights(s: f64) -> (f64, f64, f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    (
        2.0 * s3 - 3.0 * s2 + 1.0,
        s3 - 2.0 * s2 + s,
        -2.0 * s3 + 3.0 * s2,
        s3 - s2,
    )
}
