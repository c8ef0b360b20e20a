//! Command-line front end: `evaluate`, `predict`, `sweep`, `bench`,
//! `gen-synthetic` and `stats`.
//!
//! Exit codes: 0 on success, 2 for I/O, parse and usage errors, 3 for invalid
//! data or configuration, 4 for internal failures.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use crate::data_io::{
    dataset_stats, generate_synthetic, load_csv, load_features_csv, save_csv, write_distributions, DatasetManifest,
    SyntheticSpec,
};
use crate::distribution::LdlDataset;
use crate::error::{Error, Result};
use crate::evaluation::{
    bench_throughput, parameter_sweep, reference_rows, run_cv, write_sweep_csv, CvOptions, CvPlan, NamedAlgorithm,
    SweepGrid,
};
use crate::predictors::{EnsembleConfig, PredictorConfig, PredictorKind, DEFAULT_K};
use crate::prototypes::{IndexConfig, PrototypeIndex, PrototypeMode};
use crate::weighting::WeightConfig;

#[derive(Debug, Parser)]
#[command(name = "uaknn", version, about = "Uncertainty-aware KNN for label distribution learning")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Repeated stratified cross-validation of one or more algorithms.
    Evaluate {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        algo: AlgoArgs,
        #[command(flatten)]
        plan: PlanArgs,
        /// Also score label-sliced predictions (default threshold 0.014).
        #[arg(long, num_args = 0..=1, default_missing_value = "0.014", require_equals = true, value_name = "T")]
        extreme_labels: Option<f64>,
        #[arg(long)]
        threads: Option<usize>,
        /// Output directory for metrics.csv, pvalues.csv and timing.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Predict label distributions for feature-only query rows.
    Predict {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        algo: AlgoArgs,
        /// Feature-only CSV of queries.
        #[arg(long)]
        query: PathBuf,
        #[arg(long)]
        query_has_header: bool,
        #[arg(long)]
        threads: Option<usize>,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// One-at-a-time UAKNN parameter sweep over the default grids.
    Sweep {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        algo: AlgoArgs,
        #[command(flatten)]
        plan: PlanArgs,
        #[arg(long)]
        threads: Option<usize>,
        /// Output directory for sweep.csv.
        #[arg(long)]
        out: PathBuf,
    },
    /// Prediction latency and throughput.
    Bench {
        #[command(flatten)]
        data: OptionalDataArgs,
        #[command(flatten)]
        algo: AlgoArgs,
        /// Generate the dataset instead: `movie-like` or `sbu-like`.
        #[arg(long, conflicts_with = "data")]
        synthetic: Option<String>,
        /// Seconds per timing phase.
        #[arg(long, default_value_t = 2.0)]
        duration: f64,
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Write a clustered synthetic dataset as CSV.
    GenSynthetic {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        l: usize,
        #[arg(long, default_value_t = 0.1)]
        spread: f64,
        #[arg(long, default_value_t = 8.0)]
        concentration: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        has_header: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print dataset statistics.
    Stats {
        #[command(flatten)]
        data: DataArgs,
    },
}

#[derive(Debug, Args)]
pub struct DataArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub n_features: usize,
    #[arg(long)]
    pub n_labels: Option<usize>,
    #[arg(long)]
    pub has_header: bool,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// Z-score every feature column after loading.
    #[arg(long)]
    pub zscore: bool,
}

#[derive(Debug, Args)]
pub struct OptionalDataArgs {
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub n_features: Option<usize>,
    #[arg(long)]
    pub n_labels: Option<usize>,
    #[arg(long)]
    pub has_header: bool,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    #[arg(long)]
    pub zscore: bool,
}

#[derive(Debug, Args)]
pub struct AlgoArgs {
    /// Comma-separated list of uaknn, wuaknn, knn.
    #[arg(long, value_delimiter = ',')]
    pub algo: Vec<String>,
    /// Neighbors for vanilla KNN.
    #[arg(long, default_value_t = DEFAULT_K)]
    pub k: usize,
    #[arg(long, default_value_t = 0.5)]
    pub variance: f64,
    #[arg(long, default_value_t = 100)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.05)]
    pub perturb: f64,
    #[arg(long, default_value_t = 2.0)]
    pub base: f64,
    /// Use raw cosines as Gaussian means.
    #[arg(long)]
    pub raw_mu: bool,
    /// Add the five-member variance-grid ensemble.
    #[arg(long)]
    pub ensemble: bool,
    /// Literal threshold prototypes (a sample may join several).
    #[arg(long)]
    pub overlapping: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[arg(long, default_value_t = 10)]
    pub reps: usize,
}

fn delimiter_byte(c: char) -> Result<u8> {
    if c.is_ascii() {
        Ok(c as u8)
    } else {
        Err(Error::Usage(format!("delimiter {c:?} is not ASCII")))
    }
}

impl DataArgs {
    fn load(&self) -> Result<LdlDataset> {
        let manifest = DatasetManifest {
            path: self.data.clone(),
            n_features: self.n_features,
            n_labels: self.n_labels,
            has_header: self.has_header,
            delimiter: delimiter_byte(self.delimiter)?,
        };
        let ds = load_csv(&manifest)?;
        if self.zscore {
            ds.standardized()
        } else {
            Ok(ds)
        }
    }
}

impl AlgoArgs {
    fn base_config(&self) -> PredictorConfig {
        PredictorConfig {
            kind: PredictorKind::Uaknn,
            k: self.k,
            weights: WeightConfig {
                variance: self.variance,
                samples: self.samples,
                perturbation: self.perturb,
                base: self.base,
                raw_mu: self.raw_mu,
            },
            seed: self.seed,
        }
    }

    fn algorithms(&self) -> Result<Vec<NamedAlgorithm>> {
        let base = self.base_config();
        let mut out = Vec::new();
        for name in self.algo.iter().map(|s| s.trim()).filter(|s| !s.is_empty()) {
            let kind = match name {
                "uaknn" => PredictorKind::Uaknn,
                "wuaknn" => PredictorKind::Wuaknn,
                "knn" | "vanilla" => PredictorKind::VanillaKnn,
                other => return Err(Error::Usage(format!("unknown algorithm {other:?}"))),
            };
            let named = NamedAlgorithm::new(PredictorConfig { kind, ..base });
            if out.iter().any(|a: &NamedAlgorithm| a.name == named.name) {
                return Err(Error::Usage(format!("algorithm {name:?} listed twice")));
            }
            out.push(named);
        }
        if self.ensemble {
            out.push(NamedAlgorithm::new(EnsembleConfig::variance_grid(base)));
        }
        if out.is_empty() {
            return Err(Error::Usage("select at least one algorithm with --algo or --ensemble".into()));
        }
        for a in &out {
            a.algorithm.validate()?;
        }
        Ok(out)
    }

    fn index_config(&self) -> IndexConfig {
        IndexConfig {
            mode: if self.overlapping {
                PrototypeMode::Overlapping
            } else {
                PrototypeMode::Partition
            },
            ..Default::default()
        }
    }
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        if t == 0 {
            return Err(Error::Usage("--threads must be positive".into()));
        }
        builder = builder.num_threads(t);
    }
    builder.build().map_err(|e| Error::Internal(e.to_string()))
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn write_file(path: &Path, write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Result<()> {
    let mut buf = Vec::new();
    write(&mut buf).map_err(|e| Error::Internal(e.to_string()))?;
    fs::write(path, buf).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn plan(args: &PlanArgs, seed: u64) -> CvPlan {
    CvPlan {
        repetitions: args.reps,
        folds: args.folds,
        seed,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(Error::Usage(e.to_string())),
    };
    run(cli)
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Evaluate {
            data,
            algo,
            plan: plan_args,
            extreme_labels,
            threads,
            out,
        } => {
            let algorithms = algo.algorithms()?;
            let pool = pool(threads)?;
            if let Some(t) = extreme_labels {
                if !(t >= 0.0 && t < 1.0) {
                    return Err(Error::Usage(format!("--extreme-labels threshold {t} outside [0, 1)")));
                }
            }
            let dataset = data.load()?;
            let options = CvOptions {
                extreme_threshold: extreme_labels,
                index: algo.index_config(),
            };
            let plan = plan(&plan_args, algo.seed);
            let report = pool.install(|| run_cv(&dataset, &algorithms, &plan, &options))?;
            create_dir(&out)?;
            write_file(&out.join("metrics.csv"), |b| report.write_metrics_csv(b))?;
            write_file(&out.join("pvalues.csv"), |b| report.write_pvalues_csv(b))?;
            write_file(&out.join("timing.csv"), |b| report.write_timing_csv(b))?;
            println!(
                "{} ({} x {} features x {} labels), {} runs",
                dataset.name(),
                dataset.n_samples(),
                dataset.n_features(),
                dataset.n_labels(),
                report.runs
            );
            print!("{}", report.pretty_table());
            let refs = reference_rows(dataset.name());
            if !refs.is_empty() {
                println!("published means (chebyshev clark canberra kl cosine intersection):");
                for r in refs {
                    println!("  {:<8} {:?}", r.algorithm, r.means);
                }
            }
            Ok(())
        }
        Command::Predict {
            data,
            algo,
            query,
            query_has_header,
            threads,
            out,
        } => {
            let algorithms = algo.algorithms()?;
            if algorithms.len() != 1 {
                return Err(Error::Usage("predict takes exactly one algorithm".into()));
            }
            let pool = pool(threads)?;
            let dataset = data.load()?;
            let queries = load_features_csv(&query, dataset.n_features(), query_has_header, delimiter_byte(data.delimiter)?)?;
            let index = PrototypeIndex::with_config(&dataset, algo.index_config())?;
            let preds = pool.install(|| algorithms[0].algorithm.predict_batch(&index, &queries, 0))?;
            let mut buf = Vec::new();
            write_distributions(&mut buf, &preds)?;
            fs::write(&out, buf).map_err(|source| Error::Io { path: out.clone(), source })?;
            println!("wrote {} predictions to {}", preds.len(), out.display());
            Ok(())
        }
        Command::Sweep {
            data,
            algo,
            plan: plan_args,
            threads,
            out,
        } => {
            let pool = pool(threads)?;
            let dataset = data.load()?;
            let options = CvOptions {
                extreme_threshold: None,
                index: algo.index_config(),
            };
            let plan = plan(&plan_args, algo.seed);
            let rows = pool.install(|| parameter_sweep(&dataset, &SweepGrid::default(), &plan, &algo.base_config(), &options))?;
            create_dir(&out)?;
            write_file(&out.join("sweep.csv"), |b| write_sweep_csv(&rows, b))?;
            for r in rows.iter().filter(|r| r.metric == crate::metrics::Metric::Cosine) {
                println!("{:<13} {:>6} cosine {:.4}", r.parameter, r.value, r.mean);
            }
            Ok(())
        }
        Command::Bench {
            data,
            algo,
            synthetic,
            duration,
            threads,
        } => {
            let algorithms = algo.algorithms()?;
            if !(duration >= 1.0 && duration.is_finite()) {
                return Err(Error::Usage("--duration must be at least 1 second".into()));
            }
            let dataset = match (&synthetic, &data.data) {
                (Some(kind), None) => {
                    let spec = match kind.as_str() {
                        "movie-like" => SyntheticSpec::movie_like(algo.seed),
                        "sbu-like" => SyntheticSpec::sbu_like(algo.seed),
                        other => return Err(Error::Usage(format!("unknown synthetic preset {other:?}"))),
                    };
                    generate_synthetic(&spec)?
                }
                (None, Some(path)) => {
                    let n_features = data
                        .n_features
                        .ok_or_else(|| Error::Usage("--n-features is required with --data".into()))?;
                    DataArgs {
                        data: path.clone(),
                        n_features,
                        n_labels: data.n_labels,
                        has_header: data.has_header,
                        delimiter: data.delimiter,
                        zscore: data.zscore,
                    }
                    .load()?
                }
                _ => return Err(Error::Usage("pass either --data or --synthetic".into())),
            };
            let threads = threads.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            if threads == 0 {
                return Err(Error::Usage("--threads must be positive".into()));
            }
            for named in &algorithms {
                let stats = bench_throughput(&dataset, &named.algorithm, Duration::from_secs_f64(duration), threads)?;
                println!(
                    "{:<9} p50 {:.3} ms  p99 {:.3} ms  {:.1} samples/s (1 thread)  {:.1} samples/s ({} threads)",
                    named.name,
                    stats.p50_ms,
                    stats.p99_ms,
                    stats.samples_per_sec,
                    stats.parallel_samples_per_sec.unwrap_or(f64::NAN),
                    stats.threads
                );
            }
            Ok(())
        }
        Command::GenSynthetic {
            m,
            n,
            l,
            spread,
            concentration,
            seed,
            has_header,
            out,
        } => {
            let spec = SyntheticSpec {
                m,
                n,
                l,
                spread,
                concentration,
                seed,
            };
            let ds = generate_synthetic(&spec)?;
            save_csv(&ds, &out, has_header, b',')?;
            println!("wrote {} rows ({} features, {} labels) to {}", m, n, l, out.display());
            Ok(())
        }
        Command::Stats { data } => {
            let ds = data.load()?;
            let s = dataset_stats(&ds);
            println!("name            {}", ds.name());
            println!("samples         {}", s.n_samples);
            println!("features        {}", s.n_features);
            println!("labels          {}", s.n_labels);
            println!("mean entropy    {:.6}", s.mean_entropy);
            println!("label means     {:?}", s.label_means);
            println!("prototype sizes {:?}", s.prototype_counts);
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extreme_labels::DEFAULT_THRESHOLD;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_before_work() {
        let err = run_from(["uaknn", "evaluate", "--data", "/nonexistent.csv", "--n-features", "2", "--out", "/tmp/x"])
            .unwrap_err();
        assert!(matches!(err, Error::Usage(_)), "{err:?}");
        assert_eq!(err.exit_code(), 2);
        let err = run_from(["uaknn", "evaluate", "--bogus"]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = run_from([
            "uaknn", "evaluate", "--data", "/nonexistent.csv", "--n-features", "2", "--algo", "uaknn,foo", "--out", "/tmp/x",
        ])
        .unwrap_err();
        assert!(matches!(err, Error::Usage(_)));
    }

    #[test]
    fn extreme_labels_flag_forms() {
        let parse = |extra: &[&str]| {
            let mut args = vec!["uaknn", "evaluate", "--data", "d.csv", "--n-features", "2", "--algo", "uaknn", "--out", "o"];
            args.extend_from_slice(extra);
            match Cli::try_parse_from(args).unwrap().command {
                Command::Evaluate { extreme_labels, .. } => extreme_labels,
                _ => unreachable!(),
            }
        };
        assert_eq!(parse(&[]), None);
        assert_eq!(parse(&["--extreme-labels"]), Some(DEFAULT_THRESHOLD));
        assert_eq!(parse(&["--extreme-labels=0.02"]), Some(0.02));
    }
}
