//! Uncertainty-aware prototype weights.
//!
//! For one query the nearest-member similarity of every non-empty prototype is
//! normalized with a base-`b` softmax into means `mu_i`. Each weight is
//!
//! ```text
//! w_i = S_i + c_i
//! S_i = mean of `samples` draws of clip(N(mu_i, variance), 0, 1)
//! c_i = mean of `samples` draws of clip(N(perturbation * mu_i, variance), 0, 1)
//! ```
//!
//! with `S_i` and `c_i` drawn from independent per-(query, prototype) streams.
//! Empty prototypes take no part in the softmax and get weight 0.

use crate::error::{Error, Result};
use crate::rng::{step, Rng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightConfig {
    /// Variance (not standard deviation) of each Gaussian.
    pub variance: f64,
    /// Draws per Monte Carlo mean.
    pub samples: usize,
    /// Mean of the perturbation Gaussian as a fraction of `mu_i`.
    pub perturbation: f64,
    /// Exponent base of the softmax.
    pub base: f64,
    /// Use raw cosine similarities as Gaussian means instead of the
    /// softmax-normalized values.
    pub raw_mu: bool,
}

impl Default for WeightConfig {
    fn default() -> Self {
        Self {
            variance: 0.5,
            samples: 100,
            perturbation: 0.05,
            base: 2.0,
            raw_mu: false,
        }
    }
}

impl WeightConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.variance > 0.0) || !self.variance.is_finite() {
            return Err(Error::NonPositiveVariance(self.variance));
        }
        if self.samples == 0 {
            return Err(Error::BadWeightConfig("sample count must be positive".into()));
        }
        if !(self.perturbation >= 0.0) || !self.perturbation.is_finite() {
            return Err(Error::BadWeightConfig(format!(
                "perturbation fraction must be non-negative, got {}",
                self.perturbation
            )));
        }
        check_base(self.base)
    }
}

fn check_base(base: f64) -> Result<()> {
    if base > 1.0 && base.is_finite() {
        Ok(())
    } else {
        Err(Error::BadBase(base))
    }
}

/// `base^x_j / sum_k base^x_k`, computed shift-stabilized.
pub fn softmax_star(x: &[f64], base: f64) -> Result<Vec<f64>> {
    check_base(base)?;
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    if x.is_empty() {
        return Err(Error::EmptySet);
    }
    let ln_base = base.ln();
    let max = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let powers: Vec<f64> = x.iter().map(|v| ((v - max) * ln_base).exp()).collect();
    let total: f64 = powers.iter().sum();
    Ok(powers.into_iter().map(|p| p / total).collect())
}

/// Mean of `config.samples` clipped Gaussian draws around `mean`.
pub fn clipped_gaussian_mean(rng: &mut Rng, mean: f64, config: &WeightConfig) -> f64 {
    let std_dev = config.variance.sqrt();
    let total: f64 = (0..config.samples)
        .map(|_| rng.gaussian_unchecked(mean, std_dev).clamp(0.0, 1.0))
        .sum();
    total / config.samples as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    /// One weight per prototype; 0 for empty prototypes.
    pub weights: Vec<f64>,
    /// Gaussian means per prototype; 0 for empty prototypes.
    pub mus: Vec<f64>,
}

/// Weights for one query. `similarities[i]` is the nearest-member cosine of
/// prototype `i`, or `None` when it is empty. Randomness comes from the
/// streams of `(seed, query)`.
pub fn compute_weights(
    seed: u64,
    query: u64,
    similarities: &[Option<f64>],
    config: &WeightConfig,
) -> Result<WeightVector> {
    config.validate()?;
    let present: Vec<(usize, f64)> = similarities
        .iter()
        .enumerate()
        .filter_map(|(i, s)| s.map(|s| (i, s)))
        .collect();
    if present.is_empty() {
        return Err(Error::AllPrototypesEmpty);
    }
    let raw: Vec<f64> = present.iter().map(|&(_, s)| s).collect();
    let normalized = softmax_star(&raw, config.base)?;

    let mut weights = vec![0.0; similarities.len()];
    let mut mus = vec![0.0; similarities.len()];
    for (slot, &(p, s)) in present.iter().enumerate() {
        let mu = if config.raw_mu { s } else { normalized[slot] };
        let estimate = clipped_gaussian_mean(&mut Rng::for_task(seed, query, p, step::ESTIMATE), mu, config);
        let perturbation = clipped_gaussian_mean(
            &mut Rng::for_task(seed, query, p, step::PERTURBATION),
            config.perturbation * mu,
            config,
        );
        weights[p] = estimate + perturbation;
        mus[p] = mu;
    }
    Ok(WeightVector { weights, mus })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn softmax_star_examples() {
        let u = softmax_star(&[0.0, 0.0, 0.0], 2.0).unwrap();
        u.iter().for_each(|v| assert_abs_diff_eq!(*v, 1.0 / 3.0, epsilon = 1e-15));
        let two = softmax_star(&[1.0, 0.0], 2.0).unwrap();
        assert_abs_diff_eq!(two[0], 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(two[1], 1.0 / 3.0, epsilon = 1e-15);
        let s = softmax_star(&[0.1, 0.2, 0.3], 2.0).unwrap();
        let expected = [0.31051350754124435, 0.3328001371417689, 0.35668635531698684];
        for (a, b) in s.iter().zip(expected) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn softmax_star_errors() {
        assert!(matches!(softmax_star(&[0.0, 1.0], 1.0), Err(Error::BadBase(_))));
        assert!(matches!(softmax_star(&[0.0, f64::NAN], 2.0), Err(Error::NonFinite(1))));
        // large inputs stay finite
        let big = softmax_star(&[1000.0, 999.0], 2.0).unwrap();
        assert_abs_diff_eq!(big[0], 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn clipped_mean_is_deterministic() {
        let config = WeightConfig::default();
        let a = clipped_gaussian_mean(&mut Rng::new(5, 1), 0.3, &config);
        let b = clipped_gaussian_mean(&mut Rng::new(5, 1), 0.3, &config);
        assert_eq!(a.to_bits(), b.to_bits());
        assert!((0.0..=1.0).contains(&a));
    }

    #[test]
    fn clipped_mean_converges() {
        let config = WeightConfig {
            samples: 1_000_000,
            ..Default::default()
        };
        let half = clipped_gaussian_mean(&mut Rng::new(11, 0), 0.5, &config);
        assert!((half - 0.5).abs() <= 0.002, "{half}");
        // E[clip(X, 0, 1)] for X ~ N(0, 0.5): sigma/sqrt(2 pi) (1 - e^{-1/(2 sigma^2)}) + P(X > 1)
        let zero = clipped_gaussian_mean(&mut Rng::new(11, 1), 0.0, &config);
        assert!((zero - 0.2569675209438721).abs() <= 0.002, "{zero}");
    }

    #[test]
    fn equal_similarities_give_symmetric_weights() {
        let w = compute_weights(3, 0, &[Some(0.7), Some(0.7)], &WeightConfig::default()).unwrap();
        assert_eq!(w.mus, vec![0.5, 0.5]);
        // a single 100-draw gap has std ~0.075, so check symmetry in expectation
        let mean_gap: f64 = (0..400)
            .map(|q| {
                let w = compute_weights(3, q, &[Some(0.7), Some(0.7)], &WeightConfig::default()).unwrap();
                w.weights[0] - w.weights[1]
            })
            .sum::<f64>()
            / 400.0;
        assert!(mean_gap.abs() <= 0.05 / 4.0, "{mean_gap}");
    }

    #[test]
    fn clipped_mean_increases_with_mu() {
        let config = WeightConfig {
            samples: 1_000_000,
            ..Default::default()
        };
        let mut prev = f64::NEG_INFINITY;
        for (i, mu) in [0.0, 0.2, 0.4, 0.6, 0.8, 1.0].into_iter().enumerate() {
            let m = clipped_gaussian_mean(&mut Rng::new(21, i as u64), mu, &config);
            assert!(m > prev, "mu {mu}: {m} <= {prev}");
            prev = m;
        }
    }

    #[test]
    fn higher_similarity_higher_weight() {
        let config = WeightConfig {
            samples: 1_000_000,
            ..Default::default()
        };
        let w = compute_weights(8, 2, &[Some(0.9), Some(0.1)], &config).unwrap();
        assert!(w.weights[0] > w.weights[1], "{:?}", w.weights);
    }

    #[test]
    fn empty_prototypes_are_excluded() {
        let w = compute_weights(1, 4, &[Some(0.4), None, Some(0.8)], &WeightConfig::default()).unwrap();
        assert_eq!(w.weights[1], 0.0);
        assert_eq!(w.mus[1], 0.0);
        assert_abs_diff_eq!(w.mus[0] + w.mus[2], 1.0, epsilon = 1e-12);
        assert!(matches!(
            compute_weights(1, 4, &[None, None], &WeightConfig::default()),
            Err(Error::AllPrototypesEmpty)
        ));
    }

    #[test]
    fn raw_mu_uses_cosines() {
        let config = WeightConfig {
            raw_mu: true,
            ..Default::default()
        };
        let w = compute_weights(1, 4, &[Some(0.4), Some(0.8)], &config).unwrap();
        assert_eq!(w.mus, vec![0.4, 0.8]);
    }

    #[test]
    fn near_zero_variance_recovers_mu() {
        let config = WeightConfig {
            variance: 1e-8,
            perturbation: 0.0,
            ..Default::default()
        };
        let w = compute_weights(9, 9, &[Some(0.2), Some(0.9), Some(-0.3)], &config).unwrap();
        for (wi, mi) in w.weights.iter().zip(&w.mus) {
            assert!((wi - mi).abs() <= 1e-3);
        }
    }

    #[test]
    fn config_validation() {
        let bad = [
            WeightConfig { variance: 0.0, ..Default::default() },
            WeightConfig { samples: 0, ..Default::default() },
            WeightConfig { perturbation: -0.1, ..Default::default() },
            WeightConfig { base: 1.0, ..Default::default() },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
        assert!(WeightConfig::default().validate().is_ok());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn softmax_is_positive_and_normalized(x in prop::collection::vec(-50.0f64..50.0, 1..20), base in 1.01f64..10.0) {
                let s = softmax_star(&x, base).unwrap();
                prop_assert!(s.iter().all(|&v| v > 0.0));
                prop_assert!((s.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            }

            #[test]
            fn softmax_is_shift_invariant(x in prop::collection::vec(-5.0f64..5.0, 2..10), c in -20.0f64..20.0) {
                let a = softmax_star(&x, 2.0).unwrap();
                let shifted: Vec<f64> = x.iter().map(|v| v + c).collect();
                let b = softmax_star(&shifted, 2.0).unwrap();
                for (p, q) in a.iter().zip(&b) {
                    prop_assert!((p - q).abs() <= 1e-12);
                }
            }

            #[test]
            fn weights_are_deterministic_and_nonnegative(
                sims in prop::collection::vec(prop::option::weighted(0.8, -1.0f64..1.0), 2..8),
                seed in any::<u64>(),
                query in any::<u64>(),
            ) {
                prop_assume!(sims.iter().any(Option::is_some));
                let config = WeightConfig::default();
                let a = compute_weights(seed, query, &sims, &config).unwrap();
                let b = compute_weights(seed, query, &sims, &config).unwrap();
                prop_assert_eq!(&a, &b);
                prop_assert!(a.weights.iter().all(|&w| w >= 0.0));
                let mu_sum: f64 = a.mus.iter().sum();
                prop_assert!((mu_sum - 1.0).abs() <= 1e-9);
            }
        }
    }
}
