//! UAKNN, the WUAKNN ablation, vanilla KNN and the averaging ensemble, plus
//! the nearest-neighbor error diagnostics.

use std::fmt;

use rayon::prelude::*;

use crate::distribution::LabelDistribution;
use crate::error::{Error, Result};
use crate::prototypes::{NeighborHit, PrototypeIndex};
use crate::weighting::{compute_weights, softmax_star, WeightConfig};

/// Variances of the default ensemble members.
pub const ENSEMBLE_VARIANCES: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

pub const DEFAULT_K: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PredictorKind {
    Uaknn,
    VanillaKnn,
    Wuaknn,
}

impl PredictorKind {
    pub fn name(self) -> &'static str {
        match self {
            PredictorKind::Uaknn => "uaknn",
            PredictorKind::VanillaKnn => "knn",
            PredictorKind::Wuaknn => "wuaknn",
        }
    }
}

impl fmt::Display for PredictorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictorConfig {
    pub kind: PredictorKind,
    /// Neighbor count, vanilla KNN only.
    pub k: usize,
    /// UAKNN uses all fields; WUAKNN only `base`.
    pub weights: WeightConfig,
    pub seed: u64,
}

impl PredictorConfig {
    pub fn uaknn() -> Self {
        Self {
            kind: PredictorKind::Uaknn,
            k: DEFAULT_K,
            weights: WeightConfig::default(),
            seed: 0,
        }
    }

    pub fn wuaknn() -> Self {
        Self {
            kind: PredictorKind::Wuaknn,
            ..Self::uaknn()
        }
    }

    pub fn vanilla(k: usize) -> Self {
        Self {
            kind: PredictorKind::VanillaKnn,
            k,
            ..Self::uaknn()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_weights(mut self, weights: WeightConfig) -> Self {
        self.weights = weights;
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub members: Vec<PredictorConfig>,
}

impl EnsembleConfig {
    /// Five UAKNN members over [`ENSEMBLE_VARIANCES`], otherwise sharing `base`.
    pub fn variance_grid(base: PredictorConfig) -> Self {
        let members = ENSEMBLE_VARIANCES
            .iter()
            .map(|&variance| PredictorConfig {
                kind: PredictorKind::Uaknn,
                weights: WeightConfig {
                    variance,
                    ..base.weights
                },
                ..base
            })
            .collect();
        Self { members }
    }

    pub fn validate(&self) -> Result<()> {
        if self.members.len() < 2 {
            return Err(Error::Config(format!(
                "an ensemble needs at least 2 members, got {}",
                self.members.len()
            )));
        }
        Ok(())
    }
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self::variance_grid(PredictorConfig::uaknn())
    }
}

/// Unweighted mean of the label distributions of the `k` nearest training rows.
pub fn predict_vanilla(index: &PrototypeIndex, x: &[f64], k: usize) -> Result<LabelDistribution> {
    let hits = index.k_nearest_global(x, k)?;
    let mut mean = vec![0.0; index.n_labels()];
    for hit in &hits {
        for (m, d) in mean.iter_mut().zip(index.label(hit.index).iter()) {
            *m += d;
        }
    }
    mean.iter_mut().for_each(|m| *m /= k as f64);
    LabelDistribution::new(mean)
}

/// `softmax_star(sum_i w_i D_i)` over the nearest member `D_i` of each
/// non-empty prototype.
fn assemble(
    index: &PrototypeIndex,
    hits: &[Option<NeighborHit>],
    weights: &[f64],
    base: f64,
) -> Result<LabelDistribution> {
    let mut combined = vec![0.0; index.n_labels()];
    for (hit, w) in hits.iter().zip(weights) {
        if let Some(hit) = hit {
            for (c, d) in combined.iter_mut().zip(index.label(hit.index).iter()) {
                *c += w * d;
            }
        }
    }
    LabelDistribution::new(softmax_star(&combined, base)?)
}

fn similarities(hits: &[Option<NeighborHit>]) -> Vec<Option<f64>> {
    hits.iter().map(|h| h.map(|h| h.similarity)).collect()
}

/// UAKNN prediction. `query` selects the random streams, so predictions for
/// distinct query ids are independent and any one of them is reproducible
/// from `(config.seed, query)` alone.
pub fn predict_uaknn(
    index: &PrototypeIndex,
    x: &[f64],
    config: &PredictorConfig,
    query: u64,
) -> Result<LabelDistribution> {
    let hits = index.nearest_per_prototype(x)?;
    let weights = compute_weights(config.seed, query, &similarities(&hits), &config.weights)?;
    assemble(index, &hits, &weights.weights, config.weights.base)
}

/// WUAKNN: prototype matching with softmax-normalized cosine weights, no
/// sampling or perturbation.
pub fn predict_wuaknn(index: &PrototypeIndex, x: &[f64], config: &PredictorConfig) -> Result<LabelDistribution> {
    let hits = index.nearest_per_prototype(x)?;
    let weights = wuaknn_weights(&hits, config.weights.base)?;
    assemble(index, &hits, &weights, config.weights.base)
}

fn wuaknn_weights(hits: &[Option<NeighborHit>], base: f64) -> Result<Vec<f64>> {
    let present: Vec<(usize, f64)> = hits
        .iter()
        .enumerate()
        .filter_map(|(i, h)| h.map(|h| (i, h.similarity)))
        .collect();
    if present.is_empty() {
        return Err(Error::AllPrototypesEmpty);
    }
    let normalized = softmax_star(&present.iter().map(|p| p.1).collect::<Vec<_>>(), base)?;
    let mut weights = vec![0.0; hits.len()];
    for ((i, _), w) in present.iter().zip(normalized) {
        weights[*i] = w;
    }
    Ok(weights)
}

pub fn predict(
    index: &PrototypeIndex,
    x: &[f64],
    config: &PredictorConfig,
    query: u64,
) -> Result<LabelDistribution> {
    match config.kind {
        PredictorKind::Uaknn => predict_uaknn(index, x, config, query),
        PredictorKind::Wuaknn => predict_wuaknn(index, x, config),
        PredictorKind::VanillaKnn => predict_vanilla(index, x, config.k),
    }
}

/// Arithmetic mean of the member predictions, accumulated as a running mean
/// so that identical members reproduce the single-member output exactly.
pub fn predict_ensemble(
    index: &PrototypeIndex,
    x: &[f64],
    config: &EnsembleConfig,
    query: u64,
) -> Result<LabelDistribution> {
    config.validate()?;
    let mut mean = vec![0.0; index.n_labels()];
    for (n, member) in config.members.iter().enumerate() {
        let p = predict(index, x, member, query)?;
        let n = (n + 1) as f64;
        for (m, v) in mean.iter_mut().zip(p.iter()) {
            *m += (v - *m) / n;
        }
    }
    LabelDistribution::new(mean)
}

/// A single predictor or an averaging ensemble.
#[derive(Debug, Clone, PartialEq)]
pub enum Algorithm {
    Single(PredictorConfig),
    Ensemble(EnsembleConfig),
}

impl Algorithm {
    pub fn name(&self) -> String {
        match self {
            Algorithm::Single(c) => c.kind.name().to_string(),
            Algorithm::Ensemble(_) => "ensemble".to_string(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Algorithm::Single(c) => {
                if c.kind != PredictorKind::VanillaKnn {
                    c.weights.validate()?;
                }
                if c.kind == PredictorKind::VanillaKnn && c.k == 0 {
                    return Err(Error::BadK { k: 0, max: usize::MAX });
                }
                Ok(())
            }
            Algorithm::Ensemble(e) => {
                e.validate()?;
                e.members
                    .iter()
                    .try_for_each(|m| Algorithm::Single(*m).validate())
            }
        }
    }

    pub fn predict(&self, index: &PrototypeIndex, x: &[f64], query: u64) -> Result<LabelDistribution> {
        match self {
            Algorithm::Single(c) => predict(index, x, c, query),
            Algorithm::Ensemble(e) => predict_ensemble(index, x, e, query),
        }
    }

    /// Predicts every row of `queries` in parallel; row `i` uses query id
    /// `first_query + i`. Output is identical to a serial loop.
    pub fn predict_batch<Q>(
        &self,
        index: &PrototypeIndex,
        queries: &[Q],
        first_query: u64,
    ) -> Result<Vec<LabelDistribution>>
    where
        Q: AsRef<[f64]> + Sync,
    {
        queries
            .par_iter()
            .enumerate()
            .map(|(i, x)| self.predict(index, x.as_ref(), first_query + i as u64))
            .collect()
    }
}

impl From<PredictorConfig> for Algorithm {
    fn from(c: PredictorConfig) -> Self {
        Algorithm::Single(c)
    }
}

impl From<EnsembleConfig> for Algorithm {
    fn from(c: EnsembleConfig) -> Self {
        Algorithm::Ensemble(c)
    }
}

impl AsRef<[f64]> for crate::distribution::FeatureVector {
    fn as_ref(&self) -> &[f64] {
        self.values()
    }
}

/// `1 - sum_c px_c pz_c`: probability that labels drawn independently from
/// the two distributions disagree.
pub fn pairwise_error_probability(px: &[f64], pz: &[f64]) -> Result<f64> {
    if px.len() != pz.len() {
        return Err(Error::LengthMismatch {
            expected: px.len(),
            actual: pz.len(),
        });
    }
    Ok(1.0 - px.iter().zip(pz).map(|(a, b)| a * b).sum::<f64>())
}

/// `L^2 (1 - p_star)`. Diagnostic only: for large `L` the value exceeds 1 and
/// is not a probability.
pub fn bayes_bound(labels: usize, p_star: f64) -> Result<f64> {
    if labels == 0 {
        return Err(Error::BadRange {
            name: "labels",
            value: 0.0,
        });
    }
    if !(0.0..=1.0).contains(&p_star) {
        return Err(Error::BadRange {
            name: "p_star",
            value: p_star,
        });
    }
    let l = labels as f64;
    Ok(l * l * (1.0 - p_star))
}
