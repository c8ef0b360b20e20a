use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::distribution::LdlDataset;
use crate::error::{Error, Result};
use crate::predictors::Algorithm;
use crate::prototypes::{IndexConfig, PrototypeIndex};

const WARMUP: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingStats {
    pub p50_ms: f64,
    pub p99_ms: f64,
    /// Single-threaded throughput.
    pub samples_per_sec: f64,
    pub parallel_samples_per_sec: Option<f64>,
    pub threads: usize,
    /// Number of timed single-threaded predictions.
    pub timed: usize,
}

/// Nearest-rank percentile of ascending `sorted` values; NaN when empty.
pub fn percentile(sorted: &[f64], pct: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let rank = ((pct / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Times predictions over the dataset's own rows, cycling through them.
///
/// After [`WARMUP`] untimed predictions, a single-threaded phase records
/// per-prediction latency for `duration`; a second phase measures throughput
/// on a pool of `threads` workers for the same duration.
pub fn bench_throughput(
    dataset: &LdlDataset,
    algorithm: &Algorithm,
    duration: Duration,
    threads: usize,
) -> Result<TimingStats> {
    if duration < Duration::from_secs(1) {
        return Err(Error::Config("benchmark duration must be at least 1s".into()));
    }
    algorithm.validate()?;
    let index = PrototypeIndex::with_config(dataset, IndexConfig::default())?;
    let rows = dataset.features();
    let mut query = 0u64;
    let mut next = || {
        let q = query;
        query += 1;
        (q, &rows[q as usize % rows.len()])
    };

    for _ in 0..WARMUP {
        let (q, x) = next();
        algorithm.predict(&index, x, q)?;
    }

    let mut latencies = Vec::new();
    let start = Instant::now();
    while latencies.is_empty() || start.elapsed() < duration {
        let (q, x) = next();
        let t = Instant::now();
        algorithm.predict(&index, x, q)?;
        latencies.push(t.elapsed().as_secs_f64() * 1e3);
    }
    let serial_elapsed = start.elapsed().as_secs_f64();
    let timed = latencies.len();
    latencies.sort_by(f64::total_cmp);

    let threads = threads.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    let batch = 16 * threads;
    let mut done = 0usize;
    let start = Instant::now();
    while done == 0 || start.elapsed() < duration {
        let first = query + done as u64;
        pool.install(|| {
            (0..batch).into_par_iter().try_for_each(|i| {
                let q = first + i as u64;
                algorithm
                    .predict(&index, &rows[q as usize % rows.len()], q)
                    .map(|_| ())
            })
        })?;
        done += batch;
    }
    let parallel_elapsed = start.elapsed().as_secs_f64();

    Ok(TimingStats {
        p50_ms: percentile(&latencies, 50.0),
        p99_ms: percentile(&latencies, 99.0),
        samples_per_sec: timed as f64 / serial_elapsed,
        parallel_samples_per_sec: Some(done as f64 / parallel_elapsed),
        threads,
        timed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_rank() {
        let v: Vec<f64> = (1..=100).map(f64::from).collect();
        assert_eq!(percentile(&v, 50.0), 50.0);
        assert_eq!(percentile(&v, 99.0), 99.0);
        assert_eq!(percentile(&[3.0], 99.0), 3.0);
        assert!(percentile(&[], 50.0).is_nan());
    }
}
