//! Uncertainty-aware K-nearest-neighbor label distribution learning.
//!
//! The crate is organised bottom-up:
//!
//! - [`distribution`] and [`rng`] hold the shared domain types (label
//!   distributions, feature vectors, datasets) and the reproducible random
//!   source.
//! - [`metrics`] implements the six standard LDL measures plus the entropy and
//!   variance diagnostics.
//! - [`prototypes`] partitions a training set into per-label prototypes and
//!   answers exact cosine nearest-neighbor queries, accelerated by a ball tree.
//! - [`weighting`] turns per-prototype similarities into uncertainty-aware
//!   weights with a clipped-Gaussian Monte Carlo estimator.
//! - [`predictors`] assembles UAKNN, the WUAKNN ablation, vanilla KNN and the
//!   averaging ensemble.
//! - [`extreme_labels`] slices very wide label spaces before evaluation.
//! - [`evaluation`] runs repeated stratified cross-validation, paired t-tests,
//!   parameter sweeps and throughput benchmarks.
//! - [`data_io`] reads and writes CSV datasets and generates synthetic ones.
//! - [`cli`] backs the `uaknn` binary.
//!
//! Runnable walkthroughs of each capability live in the crate's `examples/`
//! directory (`cargo run --release --example <name>`).

pub mod cli;
pub mod data_io;
pub mod distribution;
pub mod error;
pub mod evaluation;
pub mod extreme_labels;
pub mod metrics;
pub mod predictors;
pub mod prototypes;
pub mod rng;
pub mod search;
pub mod weighting;

pub use distribution::{FeatureVector, LabelDistribution, LdlDataset};
pub use error::{Error, Result};
pub use predictors::{EnsembleConfig, PredictorConfig, PredictorKind};
pub use prototypes::{NeighborHit, PrototypeIndex, PrototypeMode};
pub use rng::Rng;
pub use weighting::WeightConfig;
