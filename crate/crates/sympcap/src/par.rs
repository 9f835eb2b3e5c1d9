//! Batch execution with an optional rayon backend.
//!
//! Multistart searches, shooting batches and sampling sweeps are all
//! embarrassingly parallel over their start index. `map_indices` runs such a
//! batch either on rayon (feature `parallel`, the default) or sequentially,
//! always returning results in index order so downstream reductions are
//! bitwise identical regardless of the backend.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Which backend a batch should use. `Auto` respects the `parallel` feature;
/// `Sequential` forces the fallback (used by the benchmark baselines).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    #[default]
    Auto,
    Sequential,
}

pub fn map_indices<U, F>(n: usize, exec: Exec, f: F) -> Vec<U>
where
    U: Send,
    F: Fn(usize) -> U + Sync + Send,
{
    match exec {
        Exec::Sequential => (0..n).map(f).collect(),
        Exec::Auto => {
            #[cfg(feature = "parallel")]
            {
                (0..n).into_par_iter().map(f).collect()
            }
            #[cfg(not(feature = "parallel"))]
            {
                (0..n).map(f).collect()
            }
        }
    }
}

/// Deterministic argmin over (value, payload) batch results: ties go to the
/// smallest index, independent of evaluation order.
pub fn argmin_by_value<T>(results: &[(f64, T)]) -> Option<usize> {
    let mut best: Option<(f64, usize)> = None;
    for (i, (v, _)) in results.iter().enumerate() {
        if v.is_nan() {
            continue;
        }
        match best {
            None => best = Some((*v, i)),
            Some((bv, _)) if *v < bv => best = Some((*v, i)),
            _ => {}
        }
    }
    best.map(|(_, i)| i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backends_agree_in_order_and_value() {
        let f = |i: usize| (i as f64).sin() * 1e3;
        let seq = map_indices(257, Exec::Sequential, f);
        let auto = map_indices(257, Exec::Auto, f);
        assert_eq!(seq.len(), 257);
        for i in 0..seq.len() {
            assert_eq!(seq[i].to_bits(), auto[i].to_bits());
        }
    }

    #[test]
    fn argmin_skips_nan_and_prefers_first() {
        let data = vec![(f64::NAN, ()), (2.0, ()), (1.0, ()), (1.0, ())];
        assert_eq!(argmin_by_value(&data), Some(2));
        let empty: Vec<(f64, ())> = vec![(f64::NAN, ())];
        assert_eq!(argmin_by_value(&empty), None);
    }
}
