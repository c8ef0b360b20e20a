//! Reproducible, splittable randomness.
//!
//! Every random task draws from its own ChaCha8 stream keyed by a 64-bit seed
//! and a 64-bit stream id, so results never depend on evaluation order or on
//! how work is spread over threads.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Step ids used when deriving per-task streams.
pub mod step {
    /// Monte Carlo estimate of the prototype term.
    pub const ESTIMATE: u64 = 0;
    /// Micro-perturbation term.
    pub const PERTURBATION: u64 = 1;
}

#[derive(Debug, Clone)]
pub struct Rng {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            seed,
            stream,
            inner,
        }
    }

    /// Stream for one (query, prototype, step) task. Queries use the low 32
    /// bits of their id, prototypes 31 bits, and the step one bit.
    pub fn for_task(seed: u64, query: u64, prototype: usize, step: u64) -> Self {
        Self::new(seed, task_stream(query, prototype, step))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// One draw from a normal law with the given mean and variance.
    pub fn gaussian_draw(&mut self, mean: f64, variance: f64) -> Result<f64> {
        if !(variance > 0.0) || !variance.is_finite() {
            return Err(Error::NonPositiveVariance(variance));
        }
        Ok(self.gaussian_unchecked(mean, variance.sqrt()))
    }

    pub(crate) fn gaussian_unchecked(&mut self, mean: f64, std_dev: f64) -> f64 {
        let z: f64 = self.inner.sample(StandardNormal);
        mean + std_dev * z
    }

    pub(crate) fn inner(&mut self) -> &mut ChaCha8Rng {
        &mut self.inner
    }
}

pub(crate) fn task_stream(query: u64, prototype: usize, step: u64) -> u64 {
    ((query & 0xffff_ffff) << 32) | (((prototype as u64) & 0x7fff_ffff) << 1) | (step & 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments(mean: f64, variance: f64, n: usize) -> (f64, f64) {
        let mut rng = Rng::new(7, 3);
        let draws: Vec<f64> = (0..n)
            .map(|_| rng.gaussian_draw(mean, variance).unwrap())
            .collect();
        let m = draws.iter().sum::<f64>() / n as f64;
        let v = draws.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n as f64;
        (m, v)
    }

    #[test]
    fn sample_mean_converges() {
        let (m, _) = moments(0.0, 0.5, 1_000_000);
        assert!(m.abs() <= 0.003, "mean {m}");
    }

    #[test]
    fn sample_variance_converges() {
        let (_, v) = moments(0.9, 0.5, 1_000_000);
        assert!((v - 0.5).abs() <= 0.005 * 0.5, "variance {v}");
    }

    #[test]
    fn identical_streams_repeat() {
        let mut a = Rng::new(42, 9);
        let mut b = Rng::new(42, 9);
        for _ in 0..1000 {
            assert_eq!(
                a.gaussian_draw(0.0, 1.0).unwrap().to_bits(),
                b.gaussian_draw(0.0, 1.0).unwrap().to_bits()
            );
        }
        let mut c = Rng::new(42, 10);
        let mut a = Rng::new(42, 9);
        assert_ne!(
            a.gaussian_draw(0.0, 1.0).unwrap(),
            c.gaussian_draw(0.0, 1.0).unwrap()
        );
    }

    #[test]
    fn rejects_bad_variance() {
        let mut rng = Rng::new(0, 0);
        assert!(matches!(
            rng.gaussian_draw(0.0, 0.0),
            Err(Error::NonPositiveVariance(_))
        ));
        assert!(rng.gaussian_draw(0.0, -1.0).is_err());
        assert!(rng.gaussian_draw(0.0, f64::NAN).is_err());
    }

    #[test]
    fn task_streams_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for q in 0..50u64 {
            for p in 0..70 {
                for s in 0..2 {
                    assert!(seen.insert(task_stream(q, p, s)));
                }
            }
        }
    }
}
