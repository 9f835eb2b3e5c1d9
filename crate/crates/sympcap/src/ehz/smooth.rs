//! Smooth gauge models for the Hamiltonian flow.
//!
//! The flow ẋ = J∇g needs a C¹ gauge. Ellipsoids are smooth already;
//! polytopes are replaced by the ℓ^{2m} surrogate
//! g(x) = (Σᵢ ⟨aᵢ, x⟩^{2m})^{1/2m} over the facet rows, which is smooth,
//! convex, and squeezes the polytope: K·k^{-1/2m} ⊆ {g ≤ 1} ⊆ K for k rows.

use nalgebra::{DMatrix, DVector};

use crate::bodies::Body;
use crate::error::{Error, Result};
use crate::symplectic::apply_j;

#[derive(Debug, Clone)]
pub enum SmoothModel {
    /// g(x) = √(xᵀQx).
    Ellipsoid { q: DMatrix<f64> },
    /// g(x) = (Σᵢ ⟨aᵢ, x⟩^{2m})^{1/2m}; rows come in ± pairs for
    /// symmetric bodies.
    PowerGauge { rows: Vec<DVector<f64>>, m: u32 },
}

impl SmoothModel {
    /// Smooth surrogate for a body: exact for ellipsoids, ℓ^{2m} facet
    /// smoothing for anything with a facet description.
    pub fn from_body(k: &Body, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::Domain("smoothing exponent must be positive".into()));
        }
        if let Some(q) = k.effective_ellipsoid_q() {
            return Ok(SmoothModel::Ellipsoid { q });
        }
        match k.halfspace_rows() {
            Ok(rows) => Ok(SmoothModel::PowerGauge { rows, m }),
            Err(Error::Representation(_)) => Err(Error::NonSmooth),
            Err(e) => Err(e),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SmoothModel::Ellipsoid { q } => q.nrows(),
            SmoothModel::PowerGauge { rows, .. } => rows[0].len(),
        }
    }

    pub fn gauge(&self, x: &DVector<f64>) -> f64 {
        match self {
            SmoothModel::Ellipsoid { q } => (q * x).dot(x).max(0.0).sqrt(),
            SmoothModel::PowerGauge { rows, m } => {
                // factor out the largest slack to keep the powers in [0, 1]
                let p = 2 * *m as i32;
                let s_max = rows.iter().map(|a| a.dot(x).abs()).fold(0.0f64, f64::max);
                if s_max == 0.0 {
                    return 0.0;
                }
                let sum: f64 = rows.iter().map(|a| (a.dot(x) / s_max).powi(p)).sum();
                s_max * sum.powf(1.0 / p as f64)
            }
        }
    }

    /// ∇g(x), homogeneous of degree 0.
    pub fn gradient(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        match self {
            SmoothModel::Ellipsoid { q } => {
                let qx = q * x;
                let g = qx.dot(x).max(0.0).sqrt();
                if g < 1e-14 {
                    return Err(Error::Domain("gauge gradient at the origin".into()));
                }
                Ok(qx / g)
            }
            SmoothModel::PowerGauge { rows, m } => {
                let p = 2 * *m as i32;
                let s_max = rows.iter().map(|a| a.dot(x).abs()).fold(0.0f64, f64::max);
                if s_max < 1e-300 {
                    return Err(Error::Domain("gauge gradient at the origin".into()));
                }
                // ∇g = S^{1/2m − 1} Σ rᵢ^{2m−1} aᵢ with rᵢ = sᵢ/s_max
                let mut acc = DVector::zeros(x.len());
                let mut sum = 0.0;
                for a in rows {
                    let r = a.dot(x) / s_max;
                    sum += r.powi(p);
                    acc += a * r.powi(p - 1);
                }
                Ok(acc * sum.powf((1.0 - p as f64) / p as f64))
            }
        }
    }

    /// x / g(x) ∈ ∂{g ≤ 1}.
    pub fn boundary_point(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let g = self.gauge(x);
        if g < 1e-14 {
            return Err(Error::Domain("zero direction".into()));
        }
        Ok(x / g)
    }

    /// The flow field J∇g(x).
    pub fn velocity(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        Ok(apply_j(&self.gradient(x)?))
    }
}

/// ∇g_K for bodies that are smooth as represented (ellipsoids, possibly
/// behind linear images). Polytopes must go through [`SmoothModel`].
pub fn gradient_gauge(k: &Body, x: &DVector<f64>) -> Result<DVector<f64>> {
    match k.effective_ellipsoid_q() {
        Some(q) => SmoothModel::Ellipsoid { q }.gradient(x),
        None => Err(Error::NonSmooth),
    }
}
