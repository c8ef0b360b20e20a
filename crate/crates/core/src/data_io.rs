//! CSV ingestion and export, dataset statistics, and a seeded generator of
//! clustered synthetic LDL datasets.
//!
//! CSV layout: `f0..f{N-1},y0..y{L-1}`, optional header, configurable
//! delimiter, `.` as the decimal separator. Errors cite 1-based file lines and
//! columns.

use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::Rng as _;
use rand_distr::{Distribution, Gamma};

use crate::distribution::{FeatureVector, LabelDistribution, LdlDataset};
use crate::error::{Error, Result};
use crate::metrics::shannon_entropy;
use crate::rng::Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetManifest {
    pub path: PathBuf,
    pub n_features: usize,
    /// Label count; inferred from the first row when `None`.
    pub n_labels: Option<usize>,
    pub has_header: bool,
    pub delimiter: u8,
}

impl DatasetManifest {
    pub fn new(path: impl Into<PathBuf>, n_features: usize) -> Self {
        Self {
            path: path.into(),
            n_features,
            n_labels: None,
            has_header: false,
            delimiter: b',',
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    let row = e.position().map_or(0, |p| p.line() as usize);
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => Error::Parse {
            row,
            column: 0,
            message: format!("{other:?}"),
        },
    }
}

/// Reads every row as numbers, checking a fixed column count.
fn read_numeric_rows(
    path: &Path,
    has_header: bool,
    delimiter: u8,
    mut expected: Option<usize>,
) -> Result<Vec<(usize, Vec<f64>)>> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .delimiter(delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_err(path, e))?;
        let line = record.position().map_or(rows.len() + 1, |p| p.line() as usize);
        let width = *expected.get_or_insert(record.len());
        if record.len() != width {
            return Err(Error::Parse {
                row: line,
                column: record.len().min(width) + 1,
                message: format!("expected {width} columns, found {}", record.len()),
            });
        }
        let values = record
            .iter()
            .enumerate()
            .map(|(c, field)| {
                field.parse::<f64>().map_err(|_| Error::Parse {
                    row: line,
                    column: c + 1,
                    message: format!("cannot parse {field:?} as a number"),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push((line, values));
    }
    Ok(rows)
}

pub fn load_csv(manifest: &DatasetManifest) -> Result<LdlDataset> {
    let expected = manifest.n_labels.map(|l| manifest.n_features + l);
    let rows = read_numeric_rows(&manifest.path, manifest.has_header, manifest.delimiter, expected)?;
    if rows.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if rows[0].1.len() < manifest.n_features + 2 {
        return Err(Error::Parse {
            row: rows[0].0,
            column: rows[0].1.len(),
            message: format!(
                "{} columns leave fewer than 2 labels after {} features",
                rows[0].1.len(),
                manifest.n_features
            ),
        });
    }
    let mut features = Vec::with_capacity(rows.len());
    let mut labels = Vec::with_capacity(rows.len());
    for (line, mut values) in rows {
        let y = values.split_off(manifest.n_features);
        features.push(FeatureVector::new(values).map_err(|e| e.at_row(line))?);
        labels.push(LabelDistribution::new(y).map_err(|e| e.at_row(line))?);
    }
    let name = manifest
        .path
        .file_stem()
        .map_or_else(|| "dataset".to_string(), |s| s.to_string_lossy().into_owned());
    LdlDataset::new(name, features, labels)
}

/// Feature-only rows, e.g. prediction queries.
pub fn load_features_csv(path: &Path, n_features: usize, has_header: bool, delimiter: u8) -> Result<Vec<FeatureVector>> {
    read_numeric_rows(path, has_header, delimiter, Some(n_features))?
        .into_iter()
        .map(|(line, values)| FeatureVector::new(values).map_err(|e| e.at_row(line)))
        .collect()
}

fn header(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (0..n).map(move |i| format!("{prefix}{i}"))
}

/// Writes `dataset` in the layout [`load_csv`] reads. Values use the shortest
/// representation that parses back to the same bits.
pub fn save_csv(dataset: &LdlDataset, path: &Path, has_header: bool, delimiter: u8) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut writer = csv::WriterBuilder::new().delimiter(delimiter).from_writer(file);
    if has_header {
        let cols: Vec<String> = header("f", dataset.n_features())
            .chain(header("y", dataset.n_labels()))
            .collect();
        writer.write_record(&cols).map_err(|e| csv_err(path, e))?;
    }
    for (x, d) in dataset.features().iter().zip(dataset.labels()) {
        let row: Vec<String> = x.iter().chain(d.iter()).map(|v| v.to_string()).collect();
        writer.write_record(&row).map_err(|e| csv_err(path, e))?;
    }
    writer.flush().map_err(io_err(path))
}

/// Writes one distribution per row with a `y0..y{L-1}` header.
pub fn write_distributions<W: Write>(out: W, rows: &[LabelDistribution]) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    let labels = rows.first().map_or(0, |r| r.len());
    let to_err = |e: csv::Error| Error::Internal(e.to_string());
    writer
        .write_record(header("y", labels).collect::<Vec<_>>())
        .map_err(to_err)?;
    for d in rows {
        writer
            .write_record(d.iter().map(|v| v.to_string()))
            .map_err(to_err)?;
    }
    writer.flush().map_err(|e| Error::Internal(e.to_string()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetStats {
    pub n_samples: usize,
    pub n_features: usize,
    pub n_labels: usize,
    pub label_means: Vec<f64>,
    /// Samples per argmax prototype.
    pub prototype_counts: Vec<usize>,
    pub mean_entropy: f64,
}

pub fn dataset_stats(dataset: &LdlDataset) -> DatasetStats {
    let l = dataset.n_labels();
    let m = dataset.n_samples() as f64;
    let mut label_means = vec![0.0; l];
    let mut prototype_counts = vec![0; l];
    let mut entropy = 0.0;
    for d in dataset.labels() {
        for (acc, v) in label_means.iter_mut().zip(d.iter()) {
            *acc += v;
        }
        prototype_counts[d.argmax()] += 1;
        entropy += shannon_entropy(d);
    }
    label_means.iter_mut().for_each(|v| *v /= m);
    DatasetStats {
        n_samples: dataset.n_samples(),
        n_features: dataset.n_features(),
        n_labels: l,
        label_means,
        prototype_counts,
        mean_entropy: entropy / m,
    }
}

/// Clustered synthetic dataset parameters.
///
/// Each sample picks a cluster `k` uniformly from `0..l`. Its features are an
/// anchor pattern for `k` plus isotropic Gaussian noise of standard deviation
/// `spread`; anchors are unit basis vectors `e_k` (then sums `e_a + e_b` once
/// `l > n`), pairwise at least distance 1 apart. Its labels follow a Dirichlet
/// law with parameter `concentration` on component `k` and 1 elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub m: usize,
    pub n: usize,
    pub l: usize,
    pub spread: f64,
    pub concentration: f64,
    pub seed: u64,
}

/// Stream id reserved for the generator.
const SYNTHETIC_STREAM: u64 = u64::MAX;

impl SyntheticSpec {
    /// 2,500 x 243 features x 6 labels with flat, low-concentration labels.
    pub fn sbu_like(seed: u64) -> Self {
        Self {
            m: 2500,
            n: 243,
            l: 6,
            spread: 0.1,
            concentration: 2.0,
            seed,
        }
    }

    /// 7,755 x 1,869 features x 5 labels.
    pub fn movie_like(seed: u64) -> Self {
        Self {
            m: 7755,
            n: 1869,
            l: 5,
            spread: 0.1,
            concentration: 8.0,
            seed,
        }
    }

    fn min_anchor_distance(&self) -> f64 {
        if self.l <= self.n {
            std::f64::consts::SQRT_2
        } else {
            1.0
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::BadSpec(msg));
        if self.m == 0 || self.n == 0 {
            return bad("m and n must be positive".into());
        }
        if self.l < 2 {
            return bad(format!("need at least 2 labels, got {}", self.l));
        }
        if self.l > self.n + self.n * (self.n - 1) / 2 {
            return bad(format!("{} features cannot host {} distinct anchors", self.n, self.l));
        }
        if !(self.spread >= 0.0) || !self.spread.is_finite() {
            return bad(format!("spread must be finite and non-negative, got {}", self.spread));
        }
        if 4.0 * self.spread > self.min_anchor_distance() {
            return bad(format!(
                "spread {} exceeds a quarter of the anchor distance {}",
                self.spread,
                self.min_anchor_distance()
            ));
        }
        if !(self.concentration >= 1.0) || !self.concentration.is_finite() {
            return bad(format!("concentration must be >= 1, got {}", self.concentration));
        }
        Ok(())
    }
}

fn anchor(k: usize, n: usize) -> Vec<usize> {
    if k < n {
        return vec![k];
    }
    let mut rest = k - n;
    for a in 0..n {
        let span = n - a - 1;
        if rest < span {
            return vec![a, a + 1 + rest];
        }
        rest -= span;
    }
    unreachable!("anchor index validated against capacity")
}

pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<LdlDataset> {
    generate_synthetic_with_clusters(spec).map(|(ds, _)| ds)
}

/// Like [`generate_synthetic`], also returning each sample's cluster.
pub fn generate_synthetic_with_clusters(spec: &SyntheticSpec) -> Result<(LdlDataset, Vec<usize>)> {
    spec.validate()?;
    let mut rng = Rng::new(spec.seed, SYNTHETIC_STREAM);
    let peak = Gamma::new(spec.concentration, 1.0).map_err(|e| Error::BadSpec(e.to_string()))?;
    let flat = Gamma::new(1.0, 1.0).map_err(|e| Error::BadSpec(e.to_string()))?;
    let anchors: Vec<Vec<usize>> = (0..spec.l).map(|k| anchor(k, spec.n)).collect();

    let mut features = Vec::with_capacity(spec.m);
    let mut labels = Vec::with_capacity(spec.m);
    let mut clusters = Vec::with_capacity(spec.m);
    while features.len() < spec.m {
        let k = rng.inner().random_range(0..spec.l);
        let mut x: Vec<f64> = (0..spec.n)
            .map(|_| rng.gaussian_unchecked(0.0, spec.spread))
            .collect();
        for &a in &anchors[k] {
            x[a] += 1.0;
        }
        let raw: Vec<f64> = (0..spec.l)
            .map(|j| {
                let g = if j == k { &peak } else { &flat };
                g.sample(rng.inner())
            })
            .collect();
        let total: f64 = raw.iter().sum();
        let Ok(x) = FeatureVector::new(x) else { continue };
        labels.push(LabelDistribution::new(raw.into_iter().map(|v| v / total).collect())?);
        features.push(x);
        clusters.push(k);
    }
    let name = format!("synthetic-{}x{}x{}", spec.m, spec.n, spec.l);
    Ok((LdlDataset::new(name, features, labels)?, clusters))
}
