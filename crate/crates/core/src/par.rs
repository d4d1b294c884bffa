use serde::{Deserialize, Serialize};

/// Execution strategy for search loops.
///
/// `Rayon` silently degrades to sequential evaluation when the crate is built
/// without the `parallel` feature. Both strategies reduce with the same
/// deterministic rule (largest value, lowest index on ties), so results never
/// depend on scheduling.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parallelism {
    Sequential,
    #[default]
    Rayon,
}

impl Parallelism {
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Parallelism::Rayon
    }
}

fn better(a: &(usize, f64), b: &(usize, f64)) -> bool {
    // NaN never wins.
    let (av, bv) = (nan_low(a.1), nan_low(b.1));
    av > bv || (av == bv && a.0 < b.0)
}

fn nan_low(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Maps `0..n` through `f` and returns the index, score and payload of the
/// best score.
pub(crate) fn argmax_map<T, F>(n: usize, mode: Parallelism, f: F) -> Option<(usize, f64, T)>
where
    T: Send,
    F: Fn(usize) -> (f64, T) + Sync + Send,
{
    let pick = |a: (usize, f64, T), b: (usize, f64, T)| {
        if better(&(b.0, b.1), &(a.0, a.1)) {
            b
        } else {
            a
        }
    };
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        return (0..n)
            .into_par_iter()
            .map(|i| {
                let (v, t) = f(i);
                (i, v, t)
            })
            .reduce_with(pick);
    }
    let _ = mode;
    (0..n)
        .map(|i| {
            let (v, t) = f(i);
            (i, v, t)
        })
        .reduce(pick)
}

/// Order-preserving map over `0..n`.
pub(crate) fn map_indexed<T, F>(n: usize, mode: Parallelism, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if mode.is_parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = mode;
    (0..n).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ties_resolve_to_lowest_index() {
        for mode in [Parallelism::Sequential, Parallelism::Rayon] {
            let best = argmax_map(1000, mode, |i| ((i % 7) as f64, i)).unwrap();
            assert_eq!(best.0, 6);
            assert_eq!(best.2, 6);
        }
    }

    #[test]
    fn nan_is_never_selected() {
        let best = argmax_map(3, Parallelism::Sequential, |i| {
            (if i == 1 { f64::NAN } else { -(i as f64) }, ())
        })
        .unwrap();
        assert_eq!(best.0, 0);
    }

    #[test]
    fn empty_range_is_none() {
        assert!(argmax_map(0, Parallelism::Rayon, |_| (0.0, ())).is_none());
    }

    #[test]
    fn map_preserves_order() {
        let v = map_indexed(100, Parallelism::Rayon, |i| i * 2);
        assert_eq!(v, (0..100).map(|i| i * 2).collect::<Vec<_>>());
    }
}
