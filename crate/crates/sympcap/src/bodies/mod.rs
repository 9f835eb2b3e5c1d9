//! Convex bodies in R^d with origin in the interior.
//!
//! A body is one of: an H-polytope {x : ⟨aᵢ, x⟩ ≤ 1}, a V-polytope
//! conv{vᵢ}, an ellipsoid {x : xᵀQx ≤ 1}, an invertible linear image of a
//! body, or a Lagrangian product (left factor on the q-block, right factor
//! on the p-block). Offsets of H-polytopes are normalized to 1, which pins
//! the origin strictly inside and makes polarity a pure swap:
//! (H-rows ↔ V-vertices), Q ↔ Q⁻¹, (AK)° = A⁻ᵀK°.
//!
//! The measurements used by the capacity machinery all live here: gauge
//! (Minkowski functional), support, boundary sections, shadows onto the
//! (q₁, p₁)-plane, difference bodies, and the planar Rogers–Shephard check.

pub mod ddesc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hull;
use crate::lp;
use crate::symplectic::SymplecticMap;

#[derive(Debug, Clone)]
pub enum Body {
    HPolytope {
        rows: Vec<DVector<f64>>,
    },
    VPolytope {
        vertices: Vec<DVector<f64>>,
    },
    Ellipsoid {
        q: DMatrix<f64>,
        q_inv: DMatrix<f64>,
    },
    LinearImage {
        base: Box<Body>,
        a: DMatrix<f64>,
        a_inv: DMatrix<f64>,
    },
    Product {
        left: Box<Body>,
        right: Box<Body>,
    },
}

impl Body {
    /// {x : ⟨rows[i], x⟩ ≤ 1}; must be bounded (rows positively spanning).
    pub fn hpolytope(rows: Vec<DVector<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyInput("halfspace rows"));
        }
        let dim = rows[0].len();
        for r in &rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: r.len(),
                });
            }
            if r.norm() < 1e-12 {
                return Err(Error::Domain("zero halfspace row".into()));
            }
        }
        let rows = dedupe_points(&rows, 1e-12);
        // Bounded ⟺ the rows positively span ⟺ 0 ∈ int conv(rows).
        if !origin_strictly_interior(&rows)? {
            return Err(Error::Unbounded);
        }
        Ok(Body::HPolytope { rows })
    }

    /// conv{vertices}; the origin must be strictly interior.
    pub fn vpolytope(vertices: Vec<DVector<f64>>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyInput("vertices"));
        }
        let dim = vertices[0].len();
        for v in &vertices {
            if v.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
        }
        let vertices = dedupe_points(&vertices, 1e-12);
        if !origin_strictly_interior(&vertices)? {
            return Err(Error::OriginNotInterior);
        }
        Ok(Body::VPolytope { vertices })
    }

    /// {x : xᵀQx ≤ 1} for symmetric positive definite Q.
    pub fn ellipsoid(q: DMatrix<f64>) -> Result<Self> {
        if !q.is_square() {
            return Err(Error::DimensionMismatch {
                expected: q.nrows(),
                got: q.ncols(),
            });
        }
        let sym_res = (&q - q.transpose()).amax();
        if sym_res > 1e-9 * q.amax().max(1.0) {
            return Err(Error::Domain(format!(
                "ellipsoid matrix must be symmetric (residual {sym_res:.3e})"
            )));
        }
        let chol = q
            .clone()
            .cholesky()
            .ok_or_else(|| Error::Domain("ellipsoid matrix must be positive definite".into()))?;
        let q_inv = chol.inverse();
        Ok(Body::Ellipsoid { q, q_inv })
    }

    /// {Σᵢ (qᵢ² + pᵢ²)/rᵢ² ≤ 1} in coordinates (q₁…q_n, p₁…p_n).
    pub fn ellipsoid_radii(radii: &[f64]) -> Result<Self> {
        if radii.is_empty() {
            return Err(Error::EmptyInput("radii"));
        }
        if radii.iter().any(|&r| !r.is_finite() || r <= 0.0) {
            return Err(Error::Domain("radii must be positive and finite".into()));
        }
        let n = radii.len();
        let mut d = DVector::zeros(2 * n);
        for (i, r) in radii.iter().enumerate() {
            d[i] = 1.0 / (r * r);
            d[n + i] = 1.0 / (r * r);
        }
        Self::ellipsoid(DMatrix::from_diagonal(&d))
    }

    /// A·base for invertible A.
    pub fn linear_image(base: Body, a: DMatrix<f64>) -> Result<Self> {
        if !a.is_square() || a.nrows() != base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                got: a.nrows(),
            });
        }
        let lu = a.clone().full_piv_lu();
        let diag = lu.u().diagonal();
        let max_p = diag.amax();
        let min_p = diag.iter().fold(f64::INFINITY, |m, x| m.min(x.abs()));
        if min_p.is_nan() || min_p <= 1e-13 * max_p.max(1.0) {
            return Err(Error::Domain("linear image matrix is singular".into()));
        }
        let a_inv = lu
            .try_inverse()
            .ok_or_else(|| Error::Domain("linear image matrix is singular".into()))?;
        Ok(Body::LinearImage {
            base: Box::new(base),
            a,
            a_inv,
        })
    }

    /// Lagrangian product: left factor on the first block of coordinates,
    /// right factor on the second.
    pub fn product(left: Body, right: Body) -> Result<Self> {
        Ok(Body::Product {
            left: Box::new(left),
            right: Box::new(right),
        })
    }

    pub fn dim(&self) -> usize {
        match self {
            Body::HPolytope { rows } => rows[0].len(),
            Body::VPolytope { vertices } => vertices[0].len(),
            Body::Ellipsoid { q, .. } => q.nrows(),
            Body::LinearImage { a, .. } => a.nrows(),
            Body::Product { left, right } => left.dim() + right.dim(),
        }
    }

    /// Half the dimension, for bodies living in phase space.
    pub fn half_dim(&self) -> Result<usize> {
        let d = self.dim();
        crate::symplectic::check_even_dim(d)?;
        Ok(d / 2)
    }

    /// Minkowski gauge g_K(x) = inf{r > 0 : x ∈ rK}.
    pub fn gauge(&self, x: &DVector<f64>) -> Result<f64> {
        self.check_dim(x.len())?;
        match self {
            Body::HPolytope { rows } => {
                Ok(rows.iter().map(|a| a.dot(x)).fold(0.0f64, |m, s| m.max(s)))
            }
            Body::VPolytope { vertices } => {
                // min Σλ s.t. Vλ = x, λ ≥ 0; 0 interior makes this feasible.
                let k = vertices.len();
                let mut p = lp::Problem::maximize(DVector::from_element(k, -1.0)).nonneg();
                for d in 0..x.len() {
                    let row = DVector::from_fn(k, |j, _| vertices[j][d]);
                    p.add_eq(row, x[d]);
                }
                Ok(-p.solve()?.value)
            }
            Body::Ellipsoid { q, .. } => Ok(quad_form(q, x).max(0.0).sqrt()),
            Body::LinearImage { base, a_inv, .. } => base.gauge(&(a_inv * x)),
            Body::Product { left, right } => {
                let (xl, xr) = split(x, left.dim());
                Ok(left.gauge(&xl)?.max(right.gauge(&xr)?))
            }
        }
    }

    /// Support function h_K(u) = sup{⟨u, x⟩ : x ∈ K} = g_{K°}(u).
    pub fn support(&self, u: &DVector<f64>) -> Result<f64> {
        self.check_dim(u.len())?;
        match self {
            Body::HPolytope { rows } => {
                let mut p = lp::Problem::maximize(u.clone());
                for a in rows {
                    p.add_le(a.clone(), 1.0);
                }
                Ok(p.solve()?.value)
            }
            Body::VPolytope { vertices } => Ok(vertices
                .iter()
                .map(|v| v.dot(u))
                .fold(f64::NEG_INFINITY, f64::max)),
            Body::Ellipsoid { q_inv, .. } => Ok(quad_form(q_inv, u).max(0.0).sqrt()),
            Body::LinearImage { base, a, .. } => base.support(&(a.transpose() * u)),
            Body::Product { left, right } => {
                let (ul, ur) = split(u, left.dim());
                Ok(left.support(&ul)? + right.support(&ur)?)
            }
        }
    }

    /// A maximizer of ⟨u, ·⟩ over K (deterministic among ties).
    pub fn support_point(&self, u: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(u.len())?;
        match self {
            Body::HPolytope { rows } => {
                let mut p = lp::Problem::maximize(u.clone());
                for a in rows {
                    p.add_le(a.clone(), 1.0);
                }
                Ok(p.solve()?.x)
            }
            Body::VPolytope { vertices } => {
                let mut best = 0usize;
                let mut best_v = f64::NEG_INFINITY;
                for (i, v) in vertices.iter().enumerate() {
                    let s = v.dot(u);
                    if s > best_v {
                        best_v = s;
                        best = i;
                    }
                }
                Ok(vertices[best].clone())
            }
            Body::Ellipsoid { q_inv, .. } => {
                let h = quad_form(q_inv, u).max(0.0).sqrt();
                if h < 1e-14 {
                    return Err(Error::Domain("zero direction".into()));
                }
                Ok(q_inv * u / h)
            }
            Body::LinearImage { base, a, .. } => Ok(a * base.support_point(&(a.transpose() * u))?),
            Body::Product { left, right } => {
                let (ul, ur) = split(u, left.dim());
                let xl = left.support_point(&ul)?;
                let xr = right.support_point(&ur)?;
                let mut x = DVector::zeros(self.dim());
                x.rows_mut(0, left.dim()).copy_from(&xl);
                x.rows_mut(left.dim(), right.dim()).copy_from(&xr);
                Ok(x)
            }
        }
    }

    /// A maximizer of ⟨y, ·⟩ over K°, computed without constructing the
    /// polar body (so it also works for mixed products whose polar has no
    /// finite description). For smooth K this is ∇g_K(y) up to the gauge
    /// normalization; the returned point always lies on ∂K° when y ≠ 0.
    pub fn polar_support_point(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_dim(y.len())?;
        match self {
            Body::HPolytope { rows } => {
                // K° = conv(rows)
                let mut best = 0usize;
                let mut best_v = f64::NEG_INFINITY;
                for (i, a) in rows.iter().enumerate() {
                    let s = a.dot(y);
                    if s > best_v {
                        best_v = s;
                        best = i;
                    }
                }
                Ok(rows[best].clone())
            }
            Body::VPolytope { vertices } => {
                // K° = {u : ⟨u, vᵢ⟩ ≤ 1}
                let mut p = lp::Problem::maximize(y.clone());
                for v in vertices {
                    p.add_le(v.clone(), 1.0);
                }
                Ok(p.solve()?.x)
            }
            Body::Ellipsoid { q, .. } => {
                let g = quad_form(q, y).max(0.0).sqrt();
                if g < 1e-14 {
                    return Err(Error::Domain("zero direction".into()));
                }
                Ok(q * y / g)
            }
            Body::LinearImage { base, a, a_inv } => {
                // (AK)° = A⁻ᵀK°
                Ok(a_inv.transpose() * base.polar_support_point(&(a.transpose() * y))?)
            }
            Body::Product { left, right } => {
                // (K₁ × K₂)° = conv(K₁° × {0} ∪ {0} × K₂°): the better
                // factor wins outright
                let (yl, yr) = split(y, left.dim());
                let hl = left.support(&yl)?;
                let hr = right.support(&yr)?;
                let mut out = DVector::zeros(self.dim());
                if hl >= hr {
                    out.rows_mut(0, left.dim())
                        .copy_from(&left.polar_support_point(&yl)?);
                } else {
                    out.rows_mut(left.dim(), right.dim())
                        .copy_from(&right.polar_support_point(&yr)?);
                }
                Ok(out)
            }
        }
    }

    /// The polar body K° = {y : ⟨y, x⟩ ≤ 1 ∀x ∈ K}.
    pub fn polar(&self) -> Result<Body> {
        match self {
            Body::HPolytope { rows } => Body::vpolytope(rows.clone()),
            Body::VPolytope { vertices } => Body::hpolytope(vertices.clone()),
            Body::Ellipsoid { q, q_inv } => Ok(Body::Ellipsoid {
                q: q_inv.clone(),
                q_inv: q.clone(),
            }),
            Body::LinearImage { base, a, a_inv } => Ok(Body::LinearImage {
                base: Box::new(base.polar()?),
                a: a_inv.transpose(),
                a_inv: a.transpose(),
            }),
            Body::Product { left, right } => {
                // (K₁ × K₂)° = conv(K₁° × {0} ∪ {0} × K₂°).
                let lv = left.polar()?.vertices()?;
                let rv = right.polar()?.vertices()?;
                let dl = left.dim();
                let dim = self.dim();
                let mut verts = Vec::with_capacity(lv.len() + rv.len());
                for v in lv {
                    let mut w = DVector::zeros(dim);
                    w.rows_mut(0, dl).copy_from(&v);
                    verts.push(w);
                }
                for v in rv {
                    let mut w = DVector::zeros(dim);
                    w.rows_mut(dl, dim - dl).copy_from(&v);
                    verts.push(w);
                }
                Body::vpolytope(verts)
            }
        }
    }

    /// Vertex list for polytopal bodies (enumerated for H-polytopes).
    pub fn vertices(&self) -> Result<Vec<DVector<f64>>> {
        match self {
            Body::HPolytope { rows } => ddesc::enumerate_vertices(rows),
            Body::VPolytope { vertices } => Ok(vertices.clone()),
            Body::Ellipsoid { .. } => Err(Error::Representation(
                "ellipsoids have no vertex description",
            )),
            Body::LinearImage { base, a, .. } => {
                Ok(base.vertices()?.into_iter().map(|v| a * v).collect())
            }
            Body::Product { left, right } => {
                let lv = left.vertices()?;
                let rv = right.vertices()?;
                let dl = left.dim();
                let dim = self.dim();
                let mut verts = Vec::with_capacity(lv.len() * rv.len());
                for vl in &lv {
                    for vr in &rv {
                        let mut w = DVector::zeros(dim);
                        w.rows_mut(0, dl).copy_from(vl);
                        w.rows_mut(dl, dim - dl).copy_from(vr);
                        verts.push(w);
                    }
                }
                Ok(verts)
            }
        }
    }

    /// Facet normals a with K ⊆ {⟨a, x⟩ ≤ 1} (enumerated for V-polytopes
    /// through the polar).
    pub fn halfspace_rows(&self) -> Result<Vec<DVector<f64>>> {
        match self {
            Body::HPolytope { rows } => Ok(rows.clone()),
            Body::VPolytope { .. } => self.polar()?.vertices(),
            Body::Ellipsoid { .. } => Err(Error::Representation(
                "ellipsoids have no facet description",
            )),
            Body::LinearImage { base, a_inv, .. } => Ok(base
                .halfspace_rows()?
                .into_iter()
                .map(|r| a_inv.transpose() * r)
                .collect()),
            Body::Product { left, right } => {
                let dl = left.dim();
                let dim = self.dim();
                let mut rows = Vec::new();
                for r in left.halfspace_rows()? {
                    let mut w = DVector::zeros(dim);
                    w.rows_mut(0, dl).copy_from(&r);
                    rows.push(w);
                }
                for r in right.halfspace_rows()? {
                    let mut w = DVector::zeros(dim);
                    w.rows_mut(dl, dim - dl).copy_from(&r);
                    rows.push(w);
                }
                Ok(rows)
            }
        }
    }

    /// sup{⟨w, x⟩ : x ∈ K, ⟨v, x⟩ = 0}: the support of the central section
    /// K ∩ v⊥ in direction w. Degenerate directions give 0 (a semi-norm).
    pub fn section_support(&self, v: &DVector<f64>, w: &DVector<f64>) -> Result<f64> {
        self.check_dim(v.len())?;
        self.check_dim(w.len())?;
        if v.norm() < 1e-14 {
            return Err(Error::Domain("zero section normal".into()));
        }
        match self {
            Body::Ellipsoid { q, .. } => {
                // Restrict Q to v⊥ and evaluate the dual norm there.
                let p = orthonormal_complement(v);
                let qr = p.transpose() * q * &p;
                let wr = p.transpose() * w;
                let chol = qr
                    .cholesky()
                    .ok_or_else(|| Error::Numerical("degenerate section quadric".into()))?;
                let sol = chol.solve(&wr);
                Ok(wr.dot(&sol).max(0.0).sqrt())
            }
            Body::LinearImage { base, a, .. } => {
                base.section_support(&(a.transpose() * v), &(a.transpose() * w))
            }
            Body::VPolytope { vertices } => {
                let k = vertices.len();
                let obj = DVector::from_fn(k, |j, _| vertices[j].dot(w));
                let mut p = lp::Problem::maximize(obj).nonneg();
                p.add_eq(DVector::from_element(k, 1.0), 1.0);
                p.add_eq(DVector::from_fn(k, |j, _| vertices[j].dot(v)), 0.0);
                Ok(p.solve()?.value.max(0.0))
            }
            _ => {
                let rows = self.halfspace_rows()?;
                let mut p = lp::Problem::maximize(w.clone());
                for a in rows {
                    p.add_le(a, 1.0);
                }
                p.add_eq(v.clone(), 0.0);
                Ok(p.solve()?.value.max(0.0))
            }
        }
    }

    /// Area of the orthogonal projection of S(K) onto the (q₁, p₁)-plane.
    /// Translations do not change the area and are ignored.
    pub fn shadow_area(&self, map: &SymplecticMap) -> Result<f64> {
        let n = self.half_dim()?;
        if map.dim() != 2 * n {
            return Err(Error::DimensionMismatch {
                expected: 2 * n,
                got: map.dim(),
            });
        }
        if let Some(q) = self.effective_ellipsoid_q() {
            return ellipsoid_shadow_area(&q, map.linear());
        }
        let verts = self.vertices()?;
        let cloud = project_cloud(&verts, map.linear(), n);
        Ok(hull::hull_area(&cloud))
    }

    /// K − K. For symmetric K this is 2K; implemented directly so it is also
    /// valid for non-symmetric polytopes.
    pub fn difference_body(&self) -> Result<Body> {
        if let Some(q) = self.effective_ellipsoid_q() {
            return Body::ellipsoid(q / 4.0);
        }
        let verts = self.vertices()?;
        let mut diffs = Vec::with_capacity(verts.len() * verts.len());
        for a in &verts {
            for b in &verts {
                diffs.push(a - b);
            }
        }
        let diffs = dedupe_points(&diffs, 1e-10);
        let extreme = reduce_to_extreme(&diffs)?;
        Body::vpolytope(extreme)
    }

    /// K − t, via the vertex representation.
    pub fn translate(&self, t: &DVector<f64>) -> Result<Body> {
        self.check_dim(t.len())?;
        let verts = self.vertices()?;
        Body::vpolytope(verts.into_iter().map(|v| v - t).collect())
    }

    /// λK for λ > 0.
    pub fn scale(&self, lambda: f64) -> Result<Body> {
        if !lambda.is_finite() || lambda <= 0.0 {
            return Err(Error::Domain("scale factor must be positive".into()));
        }
        Ok(match self {
            Body::HPolytope { rows } => Body::HPolytope {
                rows: rows.iter().map(|r| r / lambda).collect(),
            },
            Body::VPolytope { vertices } => Body::VPolytope {
                vertices: vertices.iter().map(|v| v * lambda).collect(),
            },
            Body::Ellipsoid { q, q_inv } => Body::Ellipsoid {
                q: q / (lambda * lambda),
                q_inv: q_inv * (lambda * lambda),
            },
            Body::LinearImage { base, a, a_inv } => Body::LinearImage {
                base: base.clone(),
                a: a * lambda,
                a_inv: a_inv / lambda,
            },
            Body::Product { left, right } => Body::Product {
                left: Box::new(left.scale(lambda)?),
                right: Box::new(right.scale(lambda)?),
            },
        })
    }

    /// Central symmetry check on the exact representation.
    pub fn is_symmetric(&self, tol: f64) -> Result<bool> {
        match self {
            Body::Ellipsoid { .. } => Ok(true),
            Body::LinearImage { base, .. } => base.is_symmetric(tol),
            Body::Product { left, right } => {
                Ok(left.is_symmetric(tol)? && right.is_symmetric(tol)?)
            }
            Body::HPolytope { rows } => {
                let facets = reduce_to_extreme(rows)?;
                Ok(closed_under_negation(&facets, tol))
            }
            Body::VPolytope { vertices } => {
                let extreme = reduce_to_extreme(vertices)?;
                Ok(closed_under_negation(&extreme, tol))
            }
        }
    }

    /// The boundary point in direction x: x / g_K(x).
    pub fn boundary_point(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        let g = self.gauge(x)?;
        if g < 1e-14 {
            return Err(Error::Domain("zero direction".into()));
        }
        Ok(x / g)
    }

    /// x ∈ K up to tol, via the gauge.
    pub fn contains(&self, x: &DVector<f64>, tol: f64) -> Result<bool> {
        Ok(self.gauge(x)? <= 1.0 + tol)
    }

    /// Q with K = {xᵀQx ≤ 1}, when K is an ellipsoid (possibly behind
    /// linear images).
    pub fn effective_ellipsoid_q(&self) -> Option<DMatrix<f64>> {
        match self {
            Body::Ellipsoid { q, .. } => Some(q.clone()),
            Body::LinearImage { base, a_inv, .. } => base
                .effective_ellipsoid_q()
                .map(|qb| a_inv.transpose() * qb * a_inv),
            _ => None,
        }
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got,
            });
        }
        Ok(())
    }
}

/// π·√det of the (q₁, p₁) block of L Q⁻¹ Lᵀ: the exact shadow of an
/// ellipsoid under the linear map L.
fn ellipsoid_shadow_area(q: &DMatrix<f64>, l: &DMatrix<f64>) -> Result<f64> {
    let dim = q.nrows();
    let n = dim / 2;
    let chol = q
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Numerical("ellipsoid matrix not positive definite".into()))?;
    let q_inv = chol.inverse();
    let r0 = l.row(0).transpose();
    let r1 = l.row(n).transpose();
    let a = quad_form(&q_inv, &r0);
    let b = quad_form(&q_inv, &r1);
    let c = (q_inv.clone() * &r1).dot(&r0);
    let det = a * b - c * c;
    Ok(std::f64::consts::PI * det.max(0.0).sqrt())
}

fn project_cloud(verts: &[DVector<f64>], l: &DMatrix<f64>, n: usize) -> Vec<[f64; 2]> {
    verts
        .iter()
        .map(|v| {
            let y = l * v;
            [y[0], y[n]]
        })
        .collect()
}

fn quad_form(m: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
    (m * x).dot(x)
}

fn split(x: &DVector<f64>, dl: usize) -> (DVector<f64>, DVector<f64>) {
    (
        x.rows(0, dl).into_owned(),
        x.rows(dl, x.len() - dl).into_owned(),
    )
}

fn dedupe_points(points: &[DVector<f64>], tol: f64) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(points.len());
    for p in points {
        if out.iter().all(|q| (q - p).amax() > tol) {
            out.push(p.clone());
        }
    }
    out
}

/// True iff 0 lies strictly inside conv(points): the points span linearly
/// and 0 is a convex combination with all weights bounded away from zero.
fn origin_strictly_interior(points: &[DVector<f64>]) -> Result<bool> {
    let dim = points[0].len();
    let k = points.len();
    if k <= dim {
        return Ok(false);
    }
    let mat = DMatrix::from_fn(k, dim, |i, j| points[i][j]);
    let svd = mat.svd(false, false);
    let smax = svd.singular_values.max();
    let rank_ok = svd
        .singular_values
        .iter()
        .filter(|&&s| s > 1e-10 * smax)
        .count()
        == dim;
    if !rank_ok {
        return Ok(false);
    }
    // max t s.t. Σλᵢpᵢ = 0, Σλᵢ = 1, λᵢ ≥ t ≥ 0.
    let mut obj = DVector::zeros(k + 1);
    obj[k] = 1.0;
    let mut p = lp::Problem::maximize(obj).nonneg();
    let mut coord_rows = vec![DVector::zeros(k + 1); dim];
    for (j, pt) in points.iter().enumerate() {
        for (row, &c) in coord_rows.iter_mut().zip(pt.iter()) {
            row[j] = c;
        }
    }
    for row in coord_rows {
        p.add_eq(row, 0.0);
    }
    let mut ones = DVector::from_element(k + 1, 1.0);
    ones[k] = 0.0;
    p.add_eq(ones, 1.0);
    for j in 0..k {
        let mut row = DVector::zeros(k + 1);
        row[j] = -1.0;
        row[k] = 1.0;
        p.add_le(row, 0.0);
    }
    match p.solve() {
        Ok(sol) => Ok(sol.value > 1e-9),
        Err(Error::LpInfeasible) => Ok(false),
        Err(e) => Err(e),
    }
}

/// The extreme points of conv(points): p survives iff it is not a convex
/// combination of the others.
pub fn reduce_to_extreme(points: &[DVector<f64>]) -> Result<Vec<DVector<f64>>> {
    let pts = dedupe_points(points, 1e-10);
    let k = pts.len();
    if k <= 2 {
        return Ok(pts);
    }
    let dim = pts[0].len();
    let keep: Vec<bool> = crate::par::map_indices(k, crate::par::Exec::Auto, |i| {
        let others: Vec<&DVector<f64>> = (0..k).filter(|&j| j != i).map(|j| &pts[j]).collect();
        let m = others.len();
        let mut p = lp::Problem::maximize(DVector::zeros(m)).nonneg();
        for d in 0..dim {
            let row = DVector::from_fn(m, |j, _| others[j][d]);
            p.add_eq(row, pts[i][d]);
        }
        p.add_eq(DVector::from_element(m, 1.0), 1.0);
        match p.solve() {
            Ok(_) => false, // representable by others: not extreme
            Err(Error::LpInfeasible) => true,
            Err(_) => true, // keep on numerical doubt
        }
    });
    Ok(pts
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect())
}

fn closed_under_negation(points: &[DVector<f64>], tol: f64) -> bool {
    points
        .iter()
        .all(|p| points.iter().any(|q| (q + p).amax() <= tol))
}

/// Orthonormal basis of v⊥ as matrix columns (deterministic).
fn orthonormal_complement(v: &DVector<f64>) -> DMatrix<f64> {
    let dim = v.len();
    let mut basis: Vec<DVector<f64>> = vec![v / v.norm()];
    for k in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut e = DVector::zeros(dim);
        e[k] = 1.0;
        for b in &basis {
            let proj = b.dot(&e);
            e -= proj * b;
        }
        let n = e.norm();
        if n > 1e-10 {
            basis.push(e / n);
        }
    }
    let mut p = DMatrix::zeros(dim, dim - 1);
    for (j, b) in basis.iter().skip(1).enumerate() {
        p.set_column(j, b);
    }
    p
}

// ---------------------------------------------------------------------------
// Planar Rogers–Shephard check
// ---------------------------------------------------------------------------

/// The three planar quantities related by Vol ≤ proj·sect ≤ 2·Vol:
/// area, the length of the projection onto direction⊥, and the length of
/// the chord along direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RsPlanar {
    pub vol: f64,
    pub proj_len: f64,
    pub sect_len: f64,
}

pub fn rs_planar_check(p: &Body, direction: &DVector<f64>) -> Result<RsPlanar> {
    if p.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: p.dim(),
        });
    }
    if direction.norm() < 1e-14 {
        return Err(Error::Domain("zero direction".into()));
    }
    if !p.is_symmetric(1e-9)? {
        return Err(Error::NotSymmetric);
    }
    let verts = p.vertices()?;
    let cloud: Vec<[f64; 2]> = verts.iter().map(|v| [v[0], v[1]]).collect();
    let d = [direction[0], direction[1]];
    let norm = (d[0] * d[0] + d[1] * d[1]).sqrt();
    let dn = [d[0] / norm, d[1] / norm];
    let perp = [-dn[1], dn[0]];
    Ok(RsPlanar {
        vol: hull::hull_area(&cloud),
        proj_len: hull::directional_width(&cloud, perp),
        sect_len: hull::chord_length_through_origin(&cloud, dn),
    })
}

// ---------------------------------------------------------------------------
// Presets and random bodies
// ---------------------------------------------------------------------------

/// [−1, 1]^dim as an H-polytope (any dimension, usable as a product factor).
pub fn cube_factor(dim: usize) -> Body {
    let mut rows = Vec::with_capacity(2 * dim);
    for i in 0..dim {
        let mut r = DVector::zeros(dim);
        r[i] = 1.0;
        rows.push(r.clone());
        rows.push(-r);
    }
    Body::HPolytope { rows }
}

/// B₁^dim = conv{±eᵢ} as a V-polytope (any dimension).
pub fn cross_factor(dim: usize) -> Body {
    let mut verts = Vec::with_capacity(2 * dim);
    for i in 0..dim {
        let mut v = DVector::zeros(dim);
        v[i] = 1.0;
        verts.push(v.clone());
        verts.push(-v);
    }
    Body::VPolytope { vertices: verts }
}

/// The cube [−1, 1]^{2n} in phase space.
pub fn cube(n_half: usize) -> Body {
    cube_factor(2 * n_half)
}

/// The cross-polytope B₁^{2n} in phase space.
pub fn cross_polytope(n_half: usize) -> Body {
    cross_factor(2 * n_half)
}

/// The Euclidean unit ball B^{2n}.
pub fn ball(n_half: usize) -> Body {
    Body::ellipsoid(DMatrix::identity(2 * n_half, 2 * n_half)).expect("identity is a valid Q")
}

/// B∞ⁿ × B₁ⁿ: cube in the q-block, cross-polytope in the p-block.
pub fn cube_cross_product(n: usize) -> Body {
    Body::Product {
        left: Box::new(cube_factor(n)),
        right: Box::new(cross_factor(n)),
    }
}

/// Symmetric V-polytope conv{±g₁, …, ±g_k} with seeded generators.
/// Generators are unit-normalized then scaled into [0.6, 1.0].
pub fn random_symmetric_vpolytope(n_half: usize, generators: usize, seed: u64) -> Result<Body> {
    let dim = 2 * n_half;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut verts = Vec::with_capacity(2 * generators);
        for _ in 0..generators {
            let mut g = DVector::from_fn(dim, |_, _| rng.random_range(-1.0f64..1.0));
            let norm = g.norm();
            if norm < 1e-6 {
                continue;
            }
            let scale: f64 = rng.random_range(0.6..1.0);
            g *= scale / norm;
            verts.push(g.clone());
            verts.push(-g);
        }
        match Body::vpolytope(verts) {
            Ok(b) => return Ok(b),
            Err(Error::OriginNotInterior) => continue,
            Err(e) => return Err(e),
        }
    }
}

/// Symmetric H-polytope: the polar of a seeded symmetric V-polytope.
pub fn random_symmetric_hpolytope(n_half: usize, rows: usize, seed: u64) -> Result<Body> {
    random_symmetric_vpolytope(n_half, rows, seed)?.polar()
}

// ---------------------------------------------------------------------------
// JSON body specifications
// ---------------------------------------------------------------------------

/// Serializable description of a body, as consumed by the CLI.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BodySpec {
    Hpolytope {
        rows: Vec<Vec<f64>>,
    },
    Vpolytope {
        vertices: Vec<Vec<f64>>,
    },
    Ellipsoid {
        q: Vec<Vec<f64>>,
    },
    Cube {
        n: usize,
    },
    Crosspolytope {
        n: usize,
    },
    EllipsoidRadii {
        radii: Vec<f64>,
    },
    LinearImage {
        base: Box<BodySpec>,
        matrix: Vec<Vec<f64>>,
    },
    LagrangianProduct {
        left: Box<BodySpec>,
        right: Box<BodySpec>,
    },
}

impl BodySpec {
    pub fn build(&self) -> Result<Body> {
        match self {
            BodySpec::Hpolytope { rows } => {
                Body::hpolytope(rows.iter().map(|r| DVector::from_row_slice(r)).collect())
            }
            BodySpec::Vpolytope { vertices } => Body::vpolytope(
                vertices
                    .iter()
                    .map(|v| DVector::from_row_slice(v))
                    .collect(),
            ),
            BodySpec::Ellipsoid { q } => Body::ellipsoid(matrix_from_rows(q)?),
            BodySpec::Cube { n } => {
                check_positive(*n)?;
                Ok(cube(*n))
            }
            BodySpec::Crosspolytope { n } => {
                check_positive(*n)?;
                Ok(cross_polytope(*n))
            }
            BodySpec::EllipsoidRadii { radii } => Body::ellipsoid_radii(radii),
            BodySpec::LinearImage { base, matrix } => {
                Body::linear_image(base.build()?, matrix_from_rows(matrix)?)
            }
            BodySpec::LagrangianProduct { left, right } => {
                Body::product(left.build()?, right.build()?)
            }
        }
    }
}

fn check_positive(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    Ok(())
}

fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    if rows.is_empty() {
        return Err(Error::EmptyInput("matrix rows"));
    }
    let cols = rows[0].len();
    if rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Domain("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}
