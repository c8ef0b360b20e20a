//! Label distributions, feature vectors and the paired dataset type.

use std::ops::Deref;

use crate::error::{Error, Result};

/// Absolute tolerance on the sum of a label distribution, and on per-component
/// negative rounding noise that is clamped away.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// A vector of description degrees: every entry in `[0, 1]`, summing to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelDistribution {
    degrees: Vec<f64>,
}

impl LabelDistribution {
    /// Validates `degrees` as a label distribution.
    ///
    /// Components in `[-1e-9, 0)` are treated as rounding noise: they are
    /// clamped to zero and the row is renormalized. Anything more negative, a
    /// sum further than `1e-9` from one, or a non-finite entry is rejected.
    /// Valid input without such noise is kept bit-for-bit.
    pub fn new(degrees: Vec<f64>) -> Result<Self> {
        if degrees.len() < 2 {
            return Err(Error::TooFewLabels(degrees.len()));
        }
        let mut degrees = degrees;
        let mut adjusted = false;
        for (index, d) in degrees.iter_mut().enumerate() {
            if !d.is_finite() {
                return Err(Error::NonFinite(index));
            }
            if *d < 0.0 {
                if *d < -SUM_TOLERANCE {
                    return Err(Error::NegativeDegree { index, value: *d });
                }
                *d = 0.0;
                adjusted = true;
            }
            if *d > 1.0 {
                adjusted = true;
            }
        }
        let sum: f64 = degrees.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::NotNormalized { sum });
        }
        if adjusted {
            degrees.iter_mut().for_each(|d| *d /= sum);
        }
        Ok(Self { degrees })
    }

    /// The uniform distribution over `labels` labels.
    pub fn uniform(labels: usize) -> Result<Self> {
        Self::new(vec![1.0 / labels as f64; labels])
    }

    /// A one-hot distribution.
    pub fn one_hot(labels: usize, hot: usize) -> Result<Self> {
        let mut degrees = vec![0.0; labels];
        *degrees.get_mut(hot).ok_or(Error::BadPrototypeId { id: hot, labels })? = 1.0;
        Self::new(degrees)
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.degrees
    }

    /// Index of the largest degree, ties resolved to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (j, &d) in self.degrees.iter().enumerate().skip(1) {
            if d > self.degrees[best] {
                best = j;
            }
        }
        best
    }
}

impl Deref for LabelDistribution {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.degrees
    }
}

/// A dense, finite, non-zero feature vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    values: Vec<f64>,
}

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyFeatures);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        // cosine similarity is undefined for the zero vector
        if values.iter().all(|&v| v == 0.0) {
            return Err(Error::ZeroFeatureVector);
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.values
    }
}

impl Deref for FeatureVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.values
    }
}

/// `M` instances, each a feature vector of length `N` paired with a label
/// distribution of length `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct LdlDataset {
    name: String,
    features: Vec<FeatureVector>,
    labels: Vec<LabelDistribution>,
}

impl LdlDataset {
    pub fn new(
        name: impl Into<String>,
        features: Vec<FeatureVector>,
        labels: Vec<LabelDistribution>,
    ) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if features.len() != labels.len() {
            return Err(Error::LengthMismatch {
                expected: features.len(),
                actual: labels.len(),
            });
        }
        let n = features[0].len();
        let l = labels[0].len();
        for (row, (x, d)) in features.iter().zip(&labels).enumerate() {
            if x.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    actual: x.len(),
                }
                .at_row(row + 1));
            }
            if d.len() != l {
                return Err(Error::LengthMismatch {
                    expected: l,
                    actual: d.len(),
                }
                .at_row(row + 1));
            }
        }
        Ok(Self {
            name: name.into(),
            features,
            labels,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n_samples(&self) -> usize {
        self.features.len()
    }

    pub fn n_features(&self) -> usize {
        self.features[0].len()
    }

    pub fn n_labels(&self) -> usize {
        self.labels[0].len()
    }

    pub fn features(&self) -> &[FeatureVector] {
        &self.features
    }

    pub fn labels(&self) -> &[LabelDistribution] {
        &self.labels
    }

    /// Rows `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        Self::new(
            self.name.clone(),
            indices.iter().map(|&i| self.features[i].clone()).collect(),
            indices.iter().map(|&i| self.labels[i].clone()).collect(),
        )
    }

    /// Z-score standardization of every feature column. Constant columns are
    /// centred but not scaled.
    pub fn standardized(&self) -> Result<Self> {
        let m = self.n_samples() as f64;
        let n = self.n_features();
        let mut mean = vec![0.0; n];
        for x in &self.features {
            for (acc, v) in mean.iter_mut().zip(x.iter()) {
                *acc += v;
            }
        }
        mean.iter_mut().for_each(|v| *v /= m);
        let mut var = vec![0.0; n];
        for x in &self.features {
            for ((acc, v), mu) in var.iter_mut().zip(x.iter()).zip(&mean) {
                *acc += (v - mu) * (v - mu);
            }
        }
        let scale: Vec<f64> = var
            .iter()
            .map(|v| {
                let sd = (v / m).sqrt();
                if sd > 0.0 {
                    sd
                } else {
                    1.0
                }
            })
            .collect();
        let features = self
            .features
            .iter()
            .enumerate()
            .map(|(row, x)| {
                let z = x
                    .iter()
                    .zip(&mean)
                    .zip(&scale)
                    .map(|((v, mu), sd)| (v - mu) / sd)
                    .collect();
                FeatureVector::new(z).map_err(|e| e.at_row(row + 1))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.name.clone(), features, self.labels.clone())
    }
}
