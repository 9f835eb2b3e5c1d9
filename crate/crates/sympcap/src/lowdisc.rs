//! Seeded low-discrepancy sequences.
//!
//! Shooting starts and chart samples want reproducible, well-spread points
//! rather than i.i.d. noise. The additive Kronecker recurrence
//! uₖ = frac(offset + k·γ) with γ built from the generalized golden ratio
//! (the positive root of x^{d+1} = x + 1) gives exactly that: deterministic,
//! seedable through the offset, and evenly covering [0, 1)^d.

use nalgebra::DVector;

/// Component increments γ_i = frac(φ_d^{-(i+1)}) of the R_d sequence.
pub fn kronecker_gammas(dim: usize) -> Vec<f64> {
    // Solve φ^{d+1} = φ + 1 by fixed-point iteration; converges fast for d ≥ 1.
    let d = dim as f64;
    let mut phi = 1.5f64;
    for _ in 0..64 {
        phi = (phi + 1.0).powf(1.0 / (d + 1.0));
    }
    (1..=dim)
        .map(|i| (1.0 / phi.powi(i as i32)).fract())
        .collect()
}

/// Splitmix64 step, used to derive per-seed offsets.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// The k-th point of the seeded sequence in [0, 1)^dim.
pub struct UnitSequence {
    gammas: Vec<f64>,
    offsets: Vec<f64>,
}

impl UnitSequence {
    pub fn new(dim: usize, seed: u64) -> Self {
        let gammas = kronecker_gammas(dim);
        let mut state = seed ^ 0xD1B54A32D192ED03;
        let offsets = (0..dim)
            .map(|_| (splitmix64(&mut state) >> 11) as f64 / (1u64 << 53) as f64)
            .collect();
        Self { gammas, offsets }
    }

    pub fn point(&self, k: usize) -> Vec<f64> {
        self.gammas
            .iter()
            .zip(&self.offsets)
            .map(|(g, o)| (o + g * (k as f64 + 1.0)).fract())
            .collect()
    }
}

/// `count` well-spread unit directions in R^dim.
///
/// Unit-cube points are pushed through Box–Muller to an isotropic Gaussian
/// and normalized; low discrepancy upstream keeps the directions spread out.
pub fn sphere_directions(dim: usize, count: usize, seed: u64) -> Vec<DVector<f64>> {
    let pairs = dim.div_ceil(2);
    let seq = UnitSequence::new(2 * pairs, seed);
    (0..count)
        .map(|k| {
            let u = seq.point(k);
            let mut z = Vec::with_capacity(2 * pairs);
            for i in 0..pairs {
                let a = u[2 * i].max(1e-12);
                let b = u[2 * i + 1];
                let r = (-2.0 * a.ln()).sqrt();
                let t = 2.0 * std::f64::consts::PI * b;
                z.push(r * t.cos());
                z.push(r * t.sin());
            }
            z.truncate(dim);
            let mut v = DVector::from_vec(z);
            let norm = v.norm();
            if norm < 1e-9 {
                v = DVector::zeros(dim);
                v[k % dim] = 1.0;
            } else {
                v /= norm;
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gammas_solve_the_recurrence() {
        // d = 1 is the golden ratio: γ₁ = 1/φ ≈ 0.618.
        let g = kronecker_gammas(1);
        assert!((g[0] - 0.6180339887498949).abs() < 1e-12);
        for dim in [2usize, 4, 8] {
            for gi in kronecker_gammas(dim) {
                assert!((0.0..1.0).contains(&gi));
            }
        }
    }

    #[test]
    fn sequence_stays_in_unit_cube_and_spreads() {
        let seq = UnitSequence::new(4, 42);
        let mut mean = [0.0f64; 4];
        for k in 0..512 {
            let p = seq.point(k);
            for (m, x) in mean.iter_mut().zip(&p) {
                assert!((0.0..1.0).contains(x));
                *m += x / 512.0;
            }
        }
        for m in mean {
            assert!((m - 0.5).abs() < 0.05, "poorly spread mean {m}");
        }
    }

    #[test]
    fn directions_are_unit_and_balanced() {
        for dim in [2usize, 4, 6] {
            let dirs = sphere_directions(dim, 128, 7);
            let mut mean = DVector::zeros(dim);
            for d in &dirs {
                assert!((d.norm() - 1.0).abs() < 1e-12);
                mean += d / 128.0;
            }
            assert!(mean.norm() < 0.2, "directions lopsided: {}", mean.norm());
        }
    }

    #[test]
    fn seeding_changes_the_sequence() {
        let a = sphere_directions(4, 8, 1);
        let b = sphere_directions(4, 8, 2);
        let same = sphere_directions(4, 8, 1);
        assert!((a[0].clone() - &b[0]).norm() > 1e-6);
        assert_eq!(a[3], same[3]);
    }
}
