//! Evaluation options: the Hilbert–Mumford sanction policy and the execution
//! strategy for per-point loops.

/// Whether statuses may be computed for linearizations whose scene entry is
/// not flagged `hm_sanctioned`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum HmPolicy {
    /// Refuse unless every linearization involved is sanctioned.
    #[default]
    RequireSanctioned,
    /// Run the same computation and label it numerical-only.
    AllowNumerical,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Execution {
    /// Rayon when the `parallel` feature is on, otherwise sequential.
    #[default]
    Auto,
    Sequential,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct EvalOptions {
    pub policy: HmPolicy,
    pub execution: Execution,
}

impl EvalOptions {
    pub fn numerical() -> Self {
        EvalOptions {
            policy: HmPolicy::AllowNumerical,
            ..Self::default()
        }
    }

    pub fn with_execution(mut self, execution: Execution) -> Self {
        self.execution = execution;
        self
    }
}

/// Order-preserving map over a slice. Output order never depends on the
/// schedule, so reports assembled from it are identical across thread
/// counts.
pub fn map_slice<T, R, F>(execution: Execution, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match execution {
        #[cfg(feature = "parallel")]
        Execution::Auto => {
            use rayon::prelude::*;
            items.par_iter().map(f).collect()
        }
        _ => items.iter().map(f).collect(),
    }
}

/// Like [`map_slice`] for fallible closures; the first error in slice order
/// wins.
pub fn try_map_slice<T, R, E, F>(execution: Execution, items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    map_slice(execution, items, f).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn both_strategies_agree() {
        let xs: Vec<u64> = (0..1000).collect();
        let a = map_slice(Execution::Auto, &xs, |x| x * x);
        let b = map_slice(Execution::Sequential, &xs, |x| x * x);
        assert_eq!(a, b);
    }

    #[test]
    fn first_error_in_order() {
        let xs: Vec<i32> = (0..100).collect();
        let r: Result<Vec<i32>, i32> = try_map_slice(Execution::Auto, &xs, |&x| {
            if x % 7 == 3 {
                Err(x)
            } else {
                Ok(x)
            }
        });
        assert_eq!(r, Err(3));
    }
}
