use std::time::Instant;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::distribution::{LabelDistribution, LdlDataset};
use crate::error::{Error, Result};
use crate::extreme_labels::evaluate_sliced;
use crate::metrics::{component_variance, evaluate_set, shannon_entropy, MetricReport};
use crate::predictors::Algorithm;
use crate::prototypes::{IndexConfig, PrototypeIndex};
use crate::rng::Rng;

use super::report::{EvaluationReport, RunRecord};

/// Repeated k-fold plan, stratified by argmax label.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CvPlan {
    pub repetitions: usize,
    pub folds: usize,
    pub seed: u64,
}

impl Default for CvPlan {
    fn default() -> Self {
        Self {
            repetitions: 10,
            folds: 5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fold {
    pub repetition: usize,
    pub fold: usize,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Stream ids for fold shuffling sit far away from per-query streams.
const FOLD_STREAM_BASE: u64 = 0xF01D_0000_0000_0000;

/// Train/test splits for every repetition. Within a repetition each stratum
/// is shuffled and the strata are dealt round-robin over the folds, so every
/// sample is tested exactly once, fold sizes differ by at most one, and each
/// stratum's count per fold differs from its share by at most one.
pub fn make_folds(dataset: &LdlDataset, plan: &CvPlan) -> Result<Vec<Fold>> {
    let m = dataset.n_samples();
    if plan.folds < 2 || plan.repetitions == 0 {
        return Err(Error::Config(format!(
            "need at least 2 folds and 1 repetition, got {} and {}",
            plan.folds, plan.repetitions
        )));
    }
    if m < plan.folds {
        return Err(Error::TooFewSamples {
            samples: m,
            folds: plan.folds,
        });
    }
    let mut strata = vec![Vec::new(); dataset.n_labels()];
    for (i, d) in dataset.labels().iter().enumerate() {
        strata[d.argmax()].push(i);
    }
    let mut folds = Vec::with_capacity(plan.repetitions * plan.folds);
    for repetition in 0..plan.repetitions {
        let mut rng = Rng::new(plan.seed, FOLD_STREAM_BASE + repetition as u64);
        let mut order = Vec::with_capacity(m);
        for stratum in &strata {
            let mut s = stratum.clone();
            s.shuffle(rng.inner());
            order.extend(s);
        }
        let mut owner = vec![0usize; m];
        for (pos, &i) in order.iter().enumerate() {
            owner[i] = pos % plan.folds;
        }
        for fold in 0..plan.folds {
            let (test, train): (Vec<usize>, Vec<usize>) = (0..m).partition(|&i| owner[i] == fold);
            folds.push(Fold {
                repetition,
                fold,
                train,
                test,
            });
        }
    }
    Ok(folds)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NamedAlgorithm {
    pub name: String,
    pub algorithm: Algorithm,
}

impl NamedAlgorithm {
    pub fn new(algorithm: impl Into<Algorithm>) -> Self {
        let algorithm = algorithm.into();
        Self {
            name: algorithm.name(),
            algorithm,
        }
    }

    pub fn named(name: impl Into<String>, algorithm: impl Into<Algorithm>) -> Self {
        Self {
            name: name.into(),
            algorithm: algorithm.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CvOptions {
    /// Also score label-sliced predictions at this threshold.
    pub extreme_threshold: Option<f64>,
    pub index: IndexConfig,
}

pub(super) struct FoldOutcome {
    pub(super) records: Vec<RunRecord>,
}

fn run_fold(
    dataset: &LdlDataset,
    fold: &Fold,
    algorithms: &[NamedAlgorithm],
    options: &CvOptions,
) -> Result<FoldOutcome> {
    let train = dataset.subset(&fold.train)?;
    let index = PrototypeIndex::with_config(&train, options.index)?;
    let truths: Vec<&LabelDistribution> = fold.test.iter().map(|&i| &dataset.labels()[i]).collect();
    let m = dataset.n_samples() as u64;
    let mut records = Vec::with_capacity(algorithms.len());
    for named in algorithms {
        let mut preds = Vec::with_capacity(fold.test.len());
        let mut latencies = Vec::with_capacity(fold.test.len());
        for &i in &fold.test {
            let query = fold.repetition as u64 * m + i as u64;
            let start = Instant::now();
            let p = named.algorithm.predict(&index, &dataset.features()[i], query)?;
            latencies.push(start.elapsed().as_secs_f64() * 1e3);
            preds.push(p);
        }
        let metrics: MetricReport = evaluate_set(&truths, &preds)?;
        let sliced = options
            .extreme_threshold
            .map(|t| evaluate_sliced(&truths, &preds, t))
            .transpose()?;
        let n = preds.len() as f64;
        records.push(RunRecord {
            metrics,
            sliced,
            pred_variance: preds.iter().map(|p| component_variance(p)).sum::<f64>() / n,
            pred_entropy: preds.iter().map(|p| shannon_entropy(p)).sum::<f64>() / n,
            latencies_ms: latencies,
        });
    }
    Ok(FoldOutcome { records })
}

/// Evaluates every algorithm on every fold of `plan`. Each fold builds its own
/// index on its training split. Folds run in parallel on the current rayon
/// pool; the metric results do not depend on the pool size.
pub fn run_cv(
    dataset: &LdlDataset,
    algorithms: &[NamedAlgorithm],
    plan: &CvPlan,
    options: &CvOptions,
) -> Result<EvaluationReport> {
    if algorithms.is_empty() {
        return Err(Error::Config("no algorithm selected".into()));
    }
    for a in algorithms {
        a.algorithm.validate()?;
    }
    let folds = make_folds(dataset, plan)?;
    let outcomes = folds
        .par_iter()
        .map(|fold| run_fold(dataset, fold, algorithms, options))
        .collect::<Result<Vec<_>>>()?;
    EvaluationReport::from_runs(
        algorithms.iter().map(|a| a.name.clone()).collect(),
        outcomes.into_iter().map(|o| o.records).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::FeatureVector;
    use crate::data_io::{generate_synthetic, SyntheticSpec};
    use crate::predictors::PredictorConfig;

    fn strata_dataset(per_stratum: &[usize]) -> LdlDataset {
        let l = per_stratum.len().max(2);
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for (s, &count) in per_stratum.iter().enumerate() {
            for i in 0..count {
                features.push(FeatureVector::new(vec![1.0 + i as f64, s as f64 + 0.5]).unwrap());
                labels.push(LabelDistribution::one_hot(l, s).unwrap());
            }
        }
        LdlDataset::new("strata", features, labels).unwrap()
    }

    #[test]
    fn ten_samples_five_folds() {
        let ds = strata_dataset(&[10]);
        let plan = CvPlan { repetitions: 1, folds: 5, seed: 1 };
        let folds = make_folds(&ds, &plan).unwrap();
        assert_eq!(folds.len(), 5);
        let mut all: Vec<usize> = folds.iter().flat_map(|f| f.test.clone()).collect();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
        assert!(folds.iter().all(|f| f.test.len() == 2 && f.train.len() == 8));
    }

    #[test]
    fn exact_stratification() {
        let ds = strata_dataset(&[5, 5]);
        let plan = CvPlan { repetitions: 3, folds: 5, seed: 9 };
        for f in make_folds(&ds, &plan).unwrap() {
            let strata: Vec<usize> = f.test.iter().map(|&i| ds.labels()[i].argmax()).collect();
            assert_eq!(strata.len(), 2);
            assert!(strata.contains(&0) && strata.contains(&1));
        }
    }

    #[test]
    fn folds_are_deterministic_and_partition() {
        let ds = generate_synthetic(&SyntheticSpec { m: 97, n: 4, l: 3, spread: 0.2, concentration: 3.0, seed: 4 }).unwrap();
        let plan = CvPlan { repetitions: 4, folds: 5, seed: 77 };
        let a = make_folds(&ds, &plan).unwrap();
        assert_eq!(a, make_folds(&ds, &plan).unwrap());
        let counts = {
            let mut c = vec![0usize; 3];
            ds.labels().iter().for_each(|d| c[d.argmax()] += 1);
            c
        };
        for rep in 0..4 {
            let mut seen = vec![0; 97];
            for f in a.iter().filter(|f| f.repetition == rep) {
                f.test.iter().for_each(|&i| seen[i] += 1);
                assert_eq!(f.train.len() + f.test.len(), 97);
                for (s, &total) in counts.iter().enumerate() {
                    let here = f.test.iter().filter(|&&i| ds.labels()[i].argmax() == s).count() as f64;
                    assert!((here - total as f64 / 5.0).abs() <= 1.0);
                }
            }
            assert!(seen.iter().all(|&s| s == 1));
        }
    }

    #[test]
    fn too_few_samples() {
        let ds = strata_dataset(&[3]);
        let plan = CvPlan { repetitions: 1, folds: 5, seed: 0 };
        assert!(matches!(make_folds(&ds, &plan), Err(Error::TooFewSamples { samples: 3, folds: 5 })));
    }

    #[test]
    fn perfect_predictions_have_zero_distance() {
        // every row carries the same distribution, so 1-NN reproduces it
        let d = LabelDistribution::new(vec![0.2, 0.3, 0.5]).unwrap();
        let ds = LdlDataset::new(
            "const",
            (0..12).map(|i| FeatureVector::new(vec![1.0, i as f64]).unwrap()).collect(),
            vec![d; 12],
        )
        .unwrap();
        let plan = CvPlan { repetitions: 1, folds: 3, seed: 0 };
        let report = run_cv(&ds, &[NamedAlgorithm::new(PredictorConfig::vanilla(1))], &plan, &CvOptions::default()).unwrap();
        for metric in ["chebyshev", "clark", "canberra", "kl"] {
            let row = report.summary("knn", metric).unwrap();
            assert_eq!((row.mean, row.std), (0.0, 0.0), "{metric}");
        }
    }
}
