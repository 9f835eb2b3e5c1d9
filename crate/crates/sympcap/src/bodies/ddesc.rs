//! Vertex enumeration for bounded H-polytopes by incremental cutting.
//!
//! The polytope {x : ⟨aᵢ, x⟩ ≤ 1} is intersected with a bounding box first,
//! then each halfspace is cut in turn (the double description method in its
//! vertex-only form). Tight constraint sets are tracked as bitsets; the
//! combinatorial adjacency test (no third vertex whose tight set contains the
//! intersection) controls which in/out vertex pairs spawn an edge point.
//!
//! Limits are enforced for desk-scale use: dimension ≤ 12, ≤ 64 rows.

use nalgebra::DVector;

use crate::error::{Error, Result};
use crate::lp;

pub const MAX_DIM: usize = 12;
pub const MAX_ROWS: usize = 64;

const EPS: f64 = 1e-9;

#[derive(Clone)]
struct Vert {
    x: DVector<f64>,
    /// Bits over the full constraint list (input rows, then box facets).
    tight: u128,
}

/// All vertices of {x : ⟨rows[i], x⟩ ≤ 1}. Errors if the polytope is
/// unbounded or exceeds the size limits. Duplicated rows are merged.
pub fn enumerate_vertices(rows: &[DVector<f64>]) -> Result<Vec<DVector<f64>>> {
    if rows.is_empty() {
        return Err(Error::EmptyInput("halfspace rows"));
    }
    let dim = rows[0].len();
    if dim > MAX_DIM {
        return Err(Error::SizeLimit {
            what: "vertex enumeration dimension",
            got: dim,
            limit: MAX_DIM,
        });
    }
    let rows = dedupe_rows(rows);
    if rows.len() > MAX_ROWS {
        return Err(Error::SizeLimit {
            what: "halfspace row count",
            got: rows.len(),
            limit: MAX_ROWS,
        });
    }

    // Bounding box radius from support values; unboundedness surfaces here.
    let mut radius = 0.0f64;
    for j in 0..dim {
        for sign in [1.0, -1.0] {
            let mut obj = DVector::zeros(dim);
            obj[j] = sign;
            let mut p = lp::Problem::maximize(obj);
            for a in &rows {
                p.add_le(a.clone(), 1.0);
            }
            let sol = p.solve().map_err(|e| match e {
                Error::LpUnbounded => Error::Unbounded,
                other => other,
            })?;
            radius = radius.max(sol.value);
        }
    }
    let radius = 1.5 * radius + 1.0;

    let n_rows = rows.len();
    let n_cons = n_rows + 2 * dim;
    debug_assert!(n_cons <= 128);

    // Constraint i < n_rows: ⟨rows[i], x⟩ ≤ 1. Constraint n_rows + 2j (+1):
    // ±x_j ≤ radius.
    let eval = |x: &DVector<f64>, c: usize| -> f64 {
        if c < n_rows {
            rows[c].dot(x) - 1.0
        } else {
            let j = (c - n_rows) / 2;
            let sgn = if (c - n_rows).is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            sgn * x[j] - radius
        }
    };
    let full_tight = |x: &DVector<f64>, upto: usize| -> u128 {
        let mut bits = 0u128;
        for c in (0..upto).chain(n_rows..n_cons) {
            if eval(x, c).abs() <= EPS {
                bits |= 1 << c;
            }
        }
        bits
    };

    // Box vertices: every sign pattern over the coordinates.
    let mut verts: Vec<Vert> = (0..1usize << dim)
        .map(|mask| {
            let x = DVector::from_fn(
                dim,
                |j, _| {
                    if mask >> j & 1 == 1 {
                        radius
                    } else {
                        -radius
                    }
                },
            );
            let tight = full_tight(&x, 0);
            Vert { x, tight }
        })
        .collect();

    for (cut, row) in rows.iter().enumerate() {
        let s: Vec<f64> = verts.iter().map(|v| row.dot(&v.x) - 1.0).collect();
        if s.iter().all(|&si| si <= EPS) {
            for (v, &si) in verts.iter_mut().zip(&s) {
                if si.abs() <= EPS {
                    v.tight |= 1 << cut;
                }
            }
            continue;
        }
        let ins: Vec<usize> = (0..verts.len()).filter(|&i| s[i] < -EPS).collect();
        let ons: Vec<usize> = (0..verts.len()).filter(|&i| s[i].abs() <= EPS).collect();
        let outs: Vec<usize> = (0..verts.len()).filter(|&i| s[i] > EPS).collect();

        let mut next: Vec<Vert> = Vec::with_capacity(ins.len() + ons.len() + 8);
        for &i in &ins {
            next.push(verts[i].clone());
        }
        for &i in &ons {
            let mut v = verts[i].clone();
            v.tight |= 1 << cut;
            next.push(v);
        }
        for &i in &ins {
            for &o in &outs {
                let common = verts[i].tight & verts[o].tight;
                // Adjacency: no third vertex's tight set contains the overlap.
                let adjacent = verts
                    .iter()
                    .enumerate()
                    .all(|(k, z)| k == i || k == o || (z.tight & common) != common);
                if !adjacent {
                    continue;
                }
                let t = s[i] / (s[i] - s[o]);
                let x = &verts[i].x + t * (&verts[o].x - &verts[i].x);
                let tight = full_tight(&x, cut + 1);
                if next.iter().all(|v| (&v.x - &x).amax() > 1e-8) {
                    next.push(Vert { x, tight });
                }
            }
        }
        if next.is_empty() {
            // The polytope has empty interior relative to the box; with
            // offsets all 1 this cannot happen for valid bodies.
            return Err(Error::OriginNotInterior);
        }
        verts = next;
    }

    // Valid bodies never touch the inflated box.
    let box_bits: u128 = ((1u128 << (2 * dim)) - 1) << n_rows;
    let mut out: Vec<DVector<f64>> = verts
        .into_iter()
        .filter(|v| v.tight & box_bits == 0)
        .map(|v| v.x)
        .collect();
    if out.is_empty() {
        return Err(Error::Unbounded);
    }
    // Deterministic order for downstream reductions.
    out.sort_by(|a, b| {
        a.iter()
            .zip(b.iter())
            .find_map(|(x, y)| x.partial_cmp(y).filter(|o| o.is_ne()))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(out)
}

fn dedupe_rows(rows: &[DVector<f64>]) -> Vec<DVector<f64>> {
    let mut out: Vec<DVector<f64>> = Vec::with_capacity(rows.len());
    for r in rows {
        if out.iter().all(|q| (q - r).amax() > 1e-12) {
            out.push(r.clone());
        }
    }
    out
}
