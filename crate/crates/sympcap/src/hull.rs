//! Planar convex hulls and polygon measurements.
//!
//! Shadows, planar capacities and the Rogers–Shephard checks all reduce to
//! hulls of small 2D point clouds, so the primitives here are kept exact and
//! deterministic: lexicographic sorting, strict-turn monotone chain, shoelace
//! area.

/// Counterclockwise convex hull (Andrew's monotone chain), collinear points
/// dropped. Degenerate inputs yield fewer than 3 points.
pub fn convex_hull(points: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let mut pts: Vec<[f64; 2]> = points.to_vec();
    pts.sort_by(|a, b| a.partial_cmp(b).expect("NaN in hull input"));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| -> f64 {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let build = |iter: &mut dyn Iterator<Item = [f64; 2]>| {
        let mut chain: Vec<[f64; 2]> = Vec::new();
        for p in iter {
            while chain.len() >= 2
                && cross(chain[chain.len() - 2], chain[chain.len() - 1], p) <= 0.0
            {
                chain.pop();
            }
            chain.push(p);
        }
        chain
    };
    let mut hull = build(&mut pts.iter().copied());
    let mut upper = build(&mut pts.iter().rev().copied());
    hull.pop();
    upper.pop();
    hull.extend(upper);
    if hull.len() < 3 {
        // All points collinear: report the extreme pair.
        let mut ends = vec![pts[0], *pts.last().unwrap()];
        ends.dedup();
        return ends;
    }
    hull
}

/// Shoelace area of a polygon given in order (either orientation).
pub fn polygon_area(poly: &[[f64; 2]]) -> f64 {
    if poly.len() < 3 {
        return 0.0;
    }
    let mut acc = 0.0;
    for i in 0..poly.len() {
        let [x0, y0] = poly[i];
        let [x1, y1] = poly[(i + 1) % poly.len()];
        acc += x0 * y1 - x1 * y0;
    }
    0.5 * acc.abs()
}

/// Hull-then-area of a planar point cloud.
pub fn hull_area(points: &[[f64; 2]]) -> f64 {
    polygon_area(&convex_hull(points))
}

/// Width of the point cloud along `dir`: max⟨d, x⟩ − min⟨d, x⟩.
pub fn directional_width(points: &[[f64; 2]], dir: [f64; 2]) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for p in points {
        let s = p[0] * dir[0] + p[1] * dir[1];
        lo = lo.min(s);
        hi = hi.max(s);
    }
    if lo > hi {
        0.0
    } else {
        hi - lo
    }
}

/// Length of the chord conv(points) ∩ span(dir) through the origin.
///
/// Assumes the origin lies in the hull (the symmetric bodies used here).
/// Computed as (t₊ − t₋)·|dir| where t± bound {t : t·dir ∈ conv(points)}.
pub fn chord_length_through_origin(points: &[[f64; 2]], dir: [f64; 2]) -> f64 {
    let hull = convex_hull(points);
    let norm = (dir[0] * dir[0] + dir[1] * dir[1]).sqrt();
    if hull.len() < 2 || norm == 0.0 {
        return 0.0;
    }
    let d = [dir[0] / norm, dir[1] / norm];
    let mut t_min = f64::INFINITY;
    let mut t_max = f64::NEG_INFINITY;
    let m = hull.len();
    for i in 0..m {
        let a = hull[i];
        let b = hull[(i + 1) % m];
        // Solve t·d = a + s(b − a) for s ∈ [0, 1].
        let ex = b[0] - a[0];
        let ey = b[1] - a[1];
        let det = d[0] * ey - d[1] * ex;
        if det.abs() < 1e-14 {
            continue;
        }
        let s = (d[1] * a[0] - d[0] * a[1]) / det;
        if (-1e-12..=1.0 + 1e-12).contains(&s) {
            let px = a[0] + s * ex;
            let t = px * d[0] + (a[1] + s * ey) * d[1];
            t_min = t_min.min(t);
            t_max = t_max.max(t);
        }
    }
    if t_min > t_max {
        return 0.0;
    }
    t_max - t_min
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn square_hull_and_area() {
        let pts = [
            [1.0, 1.0],
            [-1.0, 1.0],
            [0.0, 0.0],
            [-1.0, -1.0],
            [1.0, -1.0],
            [0.3, -0.2],
        ];
        let h = convex_hull(&pts);
        assert_eq!(h.len(), 4);
        assert_relative_eq!(polygon_area(&h), 4.0);
        assert_relative_eq!(hull_area(&pts), 4.0);
    }

    #[test]
    fn collinear_and_tiny_inputs() {
        assert_eq!(convex_hull(&[]).len(), 0);
        assert_eq!(convex_hull(&[[1.0, 2.0]]).len(), 1);
        let line = [[0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [0.5, 0.5]];
        let h = convex_hull(&line);
        assert_eq!(h.len(), 2);
        assert_relative_eq!(polygon_area(&h), 0.0);
    }

    #[test]
    fn regular_polygon_area_approaches_pi() {
        let m = 4096;
        let pts: Vec<[f64; 2]> = (0..m)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / m as f64;
                [t.cos(), t.sin()]
            })
            .collect();
        let area = hull_area(&pts);
        assert_relative_eq!(area, std::f64::consts::PI, epsilon = 1e-5);
    }

    #[test]
    fn widths_and_chords_of_square() {
        let sq = [[1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0], [1.0, -1.0]];
        assert_relative_eq!(directional_width(&sq, [1.0, 0.0]), 2.0);
        let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(
            directional_width(&sq, [inv_sqrt2, inv_sqrt2]),
            2.0 * std::f64::consts::SQRT_2,
            epsilon = 1e-12
        );
        assert_relative_eq!(chord_length_through_origin(&sq, [1.0, 0.0]), 2.0);
        assert_relative_eq!(
            chord_length_through_origin(&sq, [1.0, 1.0]),
            2.0 * std::f64::consts::SQRT_2,
            epsilon = 1e-12
        );
    }

    proptest! {
        #[test]
        fn hull_contains_its_input(
            pts in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 3..40)
        ) {
            let cloud: Vec<[f64; 2]> = pts.iter().map(|&(x, y)| [x, y]).collect();
            let h = convex_hull(&cloud);
            prop_assume!(h.len() >= 3);
            // Every input point is inside or on the hull boundary.
            for p in &cloud {
                for i in 0..h.len() {
                    let a = h[i];
                    let b = h[(i + 1) % h.len()];
                    let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
                    prop_assert!(cross >= -1e-6, "point {:?} outside edge {} ({})", p, i, cross);
                }
            }
        }

        #[test]
        fn area_is_translation_invariant(
            pts in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 3..20),
            dx in -5.0f64..5.0,
            dy in -5.0f64..5.0,
        ) {
            let cloud: Vec<[f64; 2]> = pts.iter().map(|&(x, y)| [x, y]).collect();
            let moved: Vec<[f64; 2]> = cloud.iter().map(|p| [p[0] + dx, p[1] + dy]).collect();
            let a0 = hull_area(&cloud);
            let a1 = hull_area(&moved);
            prop_assert!((a0 - a1).abs() <= 1e-7 * (1.0 + a0.abs()));
        }
    }
}
