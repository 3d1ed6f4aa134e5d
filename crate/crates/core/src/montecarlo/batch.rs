//! Deterministic batch execution: sample `i` always draws from stream `i`,
//! and results are returned in sample order whatever the worker count.

use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensembles::{moment_vector, sample_haar_factor, EnsembleSpec, MomentVector, Spectrum};
use crate::error::{Error, Result};
use crate::mu::Mu;
use crate::rng::RngStream;
use crate::series::{sample_kac, solve_kac, AberthOptions, RootSet};

/// Environment variable holding the default worker count.
pub const WORKERS_ENV: &str = "KACMAT_WORKERS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Execution {
    Sequential,
    Parallel { workers: usize },
}

impl Execution {
    /// `None` falls back to `KACMAT_WORKERS`, then to the available cores.
    pub fn from_workers(workers: Option<usize>) -> Result<Self> {
        let workers = match workers {
            Some(w) => w,
            None => match std::env::var(WORKERS_ENV) {
                Ok(s) => s.trim().parse().map_err(|_| {
                    Error::invalid("workers", format!("{WORKERS_ENV}=`{s}` is not a count"))
                })?,
                Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
            },
        };
        match workers {
            0 => Err(Error::invalid("workers", "must be at least 1")),
            1 => Ok(Self::Sequential),
            w => Ok(Self::Parallel { workers: w }),
        }
    }

    pub fn workers(&self) -> usize {
        match self {
            Self::Sequential => 1,
            Self::Parallel { workers } => *workers,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchReport {
    pub samples: usize,
    pub workers: usize,
    pub elapsed_secs: f64,
    pub samples_per_sec: f64,
}

#[derive(Debug, Clone)]
pub struct Batch<T> {
    pub items: Vec<T>,
    pub report: BatchReport,
}

#[cfg(feature = "parallel")]
fn first_failure<T>(results: Vec<Result<T>>, requested: usize) -> Result<Vec<T>> {
    let mut items = Vec::with_capacity(results.len());
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => items.push(v),
            Err(e) => {
                return Err(Error::BatchAborted {
                    sample: i,
                    completed: i,
                    requested,
                    source: Box::new(e),
                })
            }
        }
    }
    Ok(items)
}

fn run_sequential<T, F>(samples: usize, f: &F) -> Result<Vec<T>>
where
    F: Fn(u64) -> Result<T>,
{
    let mut items = Vec::with_capacity(samples);
    for i in 0..samples {
        match f(i as u64) {
            Ok(v) => items.push(v),
            Err(e) => {
                return Err(Error::BatchAborted {
                    sample: i,
                    completed: i,
                    requested: samples,
                    source: Box::new(e),
                })
            }
        }
    }
    Ok(items)
}

#[cfg(feature = "parallel")]
fn run_parallel<T, F>(samples: usize, workers: usize, f: &F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    use rayon::prelude::*;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;
    let results: Vec<Result<T>> =
        pool.install(|| (0..samples).into_par_iter().map(|i| f(i as u64)).collect());
    first_failure(results, samples)
}

#[cfg(not(feature = "parallel"))]
fn run_parallel<T, F>(samples: usize, _workers: usize, f: &F) -> Result<Vec<T>>
where
    F: Fn(u64) -> Result<T>,
{
    run_sequential(samples, f)
}

/// Evaluates `f(0), ..., f(samples - 1)`. The first failing sample (in
/// index order) aborts the batch.
pub fn run_batch<T, F>(samples: usize, exec: Execution, f: F) -> Result<Batch<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync,
{
    if samples == 0 {
        return Err(Error::invalid("samples", "must be at least 1"));
    }
    let start = Instant::now();
    let items = match exec {
        Execution::Sequential => run_sequential(samples, &f)?,
        Execution::Parallel { workers } => run_parallel(samples, workers, &f)?,
    };
    let elapsed = start.elapsed().as_secs_f64();
    Ok(Batch {
        items,
        report: BatchReport {
            samples,
            workers: exec.workers(),
            elapsed_secs: elapsed,
            samples_per_sec: samples as f64 / elapsed.max(1e-9),
        },
    })
}

/// Eigenvalues of `samples` independent draws of `spec`.
pub fn sample_spectra(
    spec: &EnsembleSpec,
    samples: usize,
    exec: Execution,
) -> Result<Batch<Spectrum>> {
    spec.validate()?;
    run_batch(samples, exec, |i| spec.sample_spectrum(i))
}

/// Parameters of a batch of random series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KacSpec {
    pub degree: usize,
    pub mu: Mu,
    pub seed: u64,
}

impl KacSpec {
    pub fn sample_roots(&self, sample_index: u64, opts: AberthOptions) -> Result<RootSet> {
        let mut rng = RngStream::new(self.seed, sample_index);
        let draw = sample_kac(self.degree, self.mu, &mut rng)?;
        solve_kac(&draw, opts)
    }
}

pub fn sample_root_sets(
    spec: &KacSpec,
    samples: usize,
    opts: AberthOptions,
    exec: Execution,
) -> Result<Batch<RootSet>> {
    spec.mu.validate()?;
    run_batch(samples, exec, |i| spec.sample_roots(i, opts))
}

/// `sqrt(n) e_1^T V^k e_1`, `k = 1..=m`, for Haar `V`, one stream per sample.
pub fn sample_moment_vectors(
    n: usize,
    m: usize,
    seed: u64,
    samples: usize,
    exec: Execution,
) -> Result<Batch<MomentVector>> {
    if n == 0 {
        return Err(Error::invalid("n", "must be at least 1"));
    }
    run_batch(samples, exec, |i| {
        let mut rng = RngStream::new(seed, i);
        let v = sample_haar_factor(n, &mut rng)?;
        moment_vector(&v, m)
    })
}

/// Point sets with the forced origin root of infinite-`mu` series removed.
pub fn free_points(sets: &[RootSet]) -> Vec<Vec<Complex64>> {
    sets.iter().map(|s| s.free_roots()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_samples_rejected() {
        assert!(run_batch(0, Execution::Sequential, Ok).is_err());
    }

    #[test]
    fn order_and_abort() {
        let b = run_batch(50, Execution::Parallel { workers: 4 }, |i| Ok(i * 2)).unwrap();
        assert_eq!(b.items, (0..50).map(|i| i * 2).collect::<Vec<_>>());
        assert_eq!(b.report.samples, 50);
        for exec in [Execution::Sequential, Execution::Parallel { workers: 3 }] {
            let err = run_batch(20, exec, |i| {
                if i == 7 || i == 12 {
                    Err(Error::invalid("x", "boom"))
                } else {
                    Ok(i)
                }
            })
            .unwrap_err();
            assert!(matches!(
                err,
                Error::BatchAborted {
                    sample: 7,
                    completed: 7,
                    requested: 20,
                    ..
                }
            ));
        }
    }

    #[test]
    fn workers_parse() {
        assert_eq!(
            Execution::from_workers(Some(1)).unwrap(),
            Execution::Sequential
        );
        assert_eq!(Execution::from_workers(Some(8)).unwrap().workers(), 8);
        assert!(Execution::from_workers(Some(0)).is_err());
    }
}
