//! Prediction latency on a movie-sized synthetic dataset.

use std::time::Duration;

use uaknn::data_io::{generate_synthetic, SyntheticSpec};
use uaknn::evaluation::bench_throughput;
use uaknn::PredictorConfig;

fn main() -> uaknn::Result<()> {
    let ds = generate_synthetic(&SyntheticSpec::movie_like(0))?;
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    for config in [PredictorConfig::uaknn(), PredictorConfig::wuaknn(), PredictorConfig::vanilla(5)] {
        let t = bench_throughput(&ds, &config.into(), Duration::from_secs(1), threads)?;
        println!(
            "{:<7} p50 {:>7.3} ms  p99 {:>7.3} ms  {:>8.1}/s serial  {:>8.1}/s on {} threads",
            config.kind.to_string(),
            t.p50_ms,
            t.p99_ms,
            t.samples_per_sec,
            t.parallel_samples_per_sec.unwrap_or(f64::NAN),
            t.threads
        );
    }
    Ok(())
}
