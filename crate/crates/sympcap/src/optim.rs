//! Derivative-free minimization (Nelder–Mead).
//!
//! The shadow and inscribed-ball searches optimize noisy-but-smooth objectives
//! over Cayley chart coordinates, where gradients are unavailable in closed
//! form. A classic Nelder–Mead with standard coefficients (α=1, γ=2, ρ=½,
//! σ=½) is enough at chart dimensions ≤ 40.
//!
//! The implementation is deliberately scale-equivariant: every decision uses
//! comparisons of objective values or relative gaps, so minimizing λ·f walks
//! the exact same simplex trajectory as minimizing f. The dilation-covariance
//! checks in the test suites rely on this.

use nalgebra::DVector;

#[derive(Debug, Clone)]
pub struct Options {
    pub max_evals: usize,
    /// Edge length of the initial axis-aligned simplex.
    pub init_step: f64,
    /// Stop when (f_worst − f_best) ≤ tol_rel · |f_best|.
    pub tol_rel: f64,
}

impl Default for Options {
    fn default() -> Self {
        Self {
            max_evals: 2000,
            init_step: 0.25,
            tol_rel: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub struct MinResult {
    pub x: DVector<f64>,
    pub value: f64,
    pub evals: usize,
    /// (evaluation index, best value so far), recorded on improvement.
    pub history: Vec<(usize, f64)>,
    /// False iff the evaluation budget ran out before the simplex collapsed.
    pub converged: bool,
}

pub fn minimize<F>(mut f: F, x0: &DVector<f64>, opts: &Options) -> MinResult
where
    F: FnMut(&DVector<f64>) -> f64,
{
    let dim = x0.len();
    let mut evals = 0usize;
    let mut history: Vec<(usize, f64)> = Vec::new();
    let mut best_seen = f64::INFINITY;
    let mut eval = |x: &DVector<f64>, evals: &mut usize, history: &mut Vec<(usize, f64)>| {
        *evals += 1;
        let v = f(x);
        let v = if v.is_nan() { f64::INFINITY } else { v };
        if v < best_seen {
            best_seen = v;
            history.push((*evals, v));
        }
        v
    };

    let mut simplex: Vec<(DVector<f64>, f64)> = Vec::with_capacity(dim + 1);
    let v0 = eval(x0, &mut evals, &mut history);
    simplex.push((x0.clone(), v0));
    for i in 0..dim {
        let mut x = x0.clone();
        x[i] += opts.init_step;
        let v = eval(&x, &mut evals, &mut history);
        simplex.push((x, v));
    }

    let mut converged = false;
    while evals < opts.max_evals {
        // Stable sort keeps ties deterministic.
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
        let f_best = simplex[0].1;
        let f_worst = simplex[dim].1;
        if (f_worst - f_best).abs() <= opts.tol_rel * f_best.abs().max(f64::MIN_POSITIVE) {
            converged = true;
            break;
        }

        let mut centroid = DVector::zeros(dim);
        for (x, _) in simplex.iter().take(dim) {
            centroid += x;
        }
        centroid /= dim as f64;

        let worst = simplex[dim].0.clone();
        let reflected = &centroid + (&centroid - &worst);
        let f_r = eval(&reflected, &mut evals, &mut history);

        if f_r < f_best {
            let expanded = &centroid + 2.0 * (&reflected - &centroid);
            let f_e = eval(&expanded, &mut evals, &mut history);
            simplex[dim] = if f_e < f_r {
                (expanded, f_e)
            } else {
                (reflected, f_r)
            };
        } else if f_r < simplex[dim - 1].1 {
            simplex[dim] = (reflected, f_r);
        } else {
            let contracted = if f_r < f_worst {
                &centroid + 0.5 * (&reflected - &centroid)
            } else {
                &centroid + 0.5 * (&worst - &centroid)
            };
            let f_c = eval(&contracted, &mut evals, &mut history);
            if f_c < f_r.min(f_worst) {
                simplex[dim] = (contracted, f_c);
            } else {
                // Shrink toward the best vertex.
                let best = simplex[0].0.clone();
                for item in simplex.iter_mut().skip(1) {
                    let x = (&best + &item.0) * 0.5;
                    let v = eval(&x, &mut evals, &mut history);
                    *item = (x, v);
                    if evals >= opts.max_evals {
                        break;
                    }
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    MinResult {
        x: simplex[0].0.clone(),
        value: simplex[0].1,
        evals,
        history,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quadratic(x: &DVector<f64>) -> f64 {
        x.iter()
            .enumerate()
            .map(|(i, v)| (i + 1) as f64 * (v - 0.5).powi(2))
            .sum::<f64>()
            + 3.0
    }

    #[test]
    fn quadratic_bowl() {
        for dim in [2usize, 5] {
            let x0 = DVector::from_element(dim, 2.0);
            let r = minimize(quadratic, &x0, &Options::default());
            assert!(r.converged);
            assert!((r.value - 3.0).abs() < 1e-8, "value {}", r.value);
            for v in r.x.iter() {
                assert!((v - 0.5).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn rosenbrock_2d() {
        let f = |x: &DVector<f64>| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let r = minimize(
            f,
            &DVector::from_vec(vec![-1.2, 1.0]),
            &Options {
                max_evals: 4000,
                ..Options::default()
            },
        );
        assert!(r.value < 1e-8, "value {}", r.value);
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let f = |x: &DVector<f64>| x.norm_squared();
        let r = minimize(
            f,
            &DVector::from_element(6, 10.0),
            &Options {
                max_evals: 20,
                ..Options::default()
            },
        );
        assert!(!r.converged);
        assert!(r.evals <= 21);
    }

    #[test]
    fn history_improves_monotonically() {
        let r = minimize(
            quadratic,
            &DVector::from_element(3, -4.0),
            &Options::default(),
        );
        for w in r.history.windows(2) {
            assert!(w[1].1 < w[0].1);
            assert!(w[1].0 > w[0].0);
        }
    }

    #[test]
    fn trajectory_is_scale_equivariant() {
        let x0 = DVector::from_vec(vec![3.0, -2.0, 0.7]);
        let base = minimize(quadratic, &x0, &Options::default());
        let scaled = minimize(|x| 4.0 * quadratic(x), &x0, &Options::default());
        assert_eq!(base.x, scaled.x);
        assert_eq!(scaled.value.to_bits(), (4.0 * base.value).to_bits());
        assert_eq!(base.evals, scaled.evals);
    }
}
