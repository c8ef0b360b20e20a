use std::fmt::Write as _;
use std::io::Write;

use crate::error::{Error, Result};
use crate::metrics::{Metric, MetricReport};

use super::bench::{percentile, TimingStats};
use super::significance::significance_test;

/// Scores of one algorithm on one fold-run.
#[derive(Debug, Clone)]
pub(crate) struct RunRecord {
    pub(crate) metrics: MetricReport,
    pub(crate) sliced: Option<MetricReport>,
    pub(crate) pred_variance: f64,
    pub(crate) pred_entropy: f64,
    pub(crate) latencies_ms: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algorithm: String,
    pub metric: String,
    pub mean: f64,
    /// Sample standard deviation over runs; 0 for a single run.
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PValueRow {
    pub algorithm_a: String,
    pub algorithm_b: String,
    pub metric: String,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct Series {
    algorithm: String,
    metric: String,
    values: Vec<f64>,
}

/// Cross-validation results: per-run scores, their mean and std, pairwise
/// p-values, and prediction timing.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub algorithms: Vec<String>,
    pub runs: usize,
    pub summary: Vec<SummaryRow>,
    pub p_values: Vec<PValueRow>,
    pub timing: Vec<(String, TimingStats)>,
    series: Vec<Series>,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn metric_columns(record: &RunRecord) -> Vec<(String, f64)> {
    let mut cols: Vec<(String, f64)> = Metric::ALL
        .iter()
        .map(|m| (m.name().to_string(), record.metrics.get(*m)))
        .collect();
    if let Some(sliced) = &record.sliced {
        cols.extend(Metric::ALL.iter().map(|m| (format!("sliced_{}", m.name()), sliced.get(*m))));
    }
    cols.push(("pred_variance".into(), record.pred_variance));
    cols.push(("pred_entropy".into(), record.pred_entropy));
    cols
}

impl EvaluationReport {
    /// `runs[r][a]` is algorithm `a` on fold-run `r`.
    pub(crate) fn from_runs(algorithms: Vec<String>, runs: Vec<Vec<RunRecord>>) -> Result<Self> {
        if runs.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut series = Vec::new();
        for (a, name) in algorithms.iter().enumerate() {
            let columns: Vec<Vec<(String, f64)>> = runs.iter().map(|r| metric_columns(&r[a])).collect();
            for (c, (metric, _)) in columns[0].iter().enumerate() {
                series.push(Series {
                    algorithm: name.clone(),
                    metric: metric.clone(),
                    values: columns.iter().map(|col| col[c].1).collect(),
                });
            }
        }
        let summary = series
            .iter()
            .map(|s| {
                let (mean, std) = mean_std(&s.values);
                SummaryRow {
                    algorithm: s.algorithm.clone(),
                    metric: s.metric.clone(),
                    mean,
                    std,
                }
            })
            .collect();

        let mut p_values = Vec::new();
        if runs.len() >= 2 {
            for (i, a) in algorithms.iter().enumerate() {
                for b in &algorithms[i + 1..] {
                    for sa in series.iter().filter(|s| &s.algorithm == a) {
                        let sb = series
                            .iter()
                            .find(|s| &s.algorithm == b && s.metric == sa.metric)
                            .ok_or_else(|| Error::Internal(format!("missing series {b}/{}", sa.metric)))?;
                        p_values.push(PValueRow {
                            algorithm_a: a.clone(),
                            algorithm_b: b.clone(),
                            metric: sa.metric.clone(),
                            p_value: significance_test(&sa.values, &sb.values)?,
                        });
                    }
                }
            }
        }

        let timing = algorithms
            .iter()
            .enumerate()
            .map(|(a, name)| {
                let mut lat: Vec<f64> = runs.iter().flat_map(|r| r[a].latencies_ms.iter().copied()).collect();
                lat.sort_by(f64::total_cmp);
                let total_s = lat.iter().sum::<f64>() / 1e3;
                let stats = TimingStats {
                    p50_ms: percentile(&lat, 50.0),
                    p99_ms: percentile(&lat, 99.0),
                    samples_per_sec: if total_s > 0.0 { lat.len() as f64 / total_s } else { f64::INFINITY },
                    parallel_samples_per_sec: None,
                    threads: 1,
                    timed: lat.len(),
                };
                (name.clone(), stats)
            })
            .collect();

        Ok(Self {
            algorithms,
            runs: runs.len(),
            summary,
            p_values,
            timing,
            series,
        })
    }

    pub fn summary(&self, algorithm: &str, metric: &str) -> Option<&SummaryRow> {
        self.summary
            .iter()
            .find(|r| r.algorithm == algorithm && r.metric == metric)
    }

    pub fn mean(&self, algorithm: &str, metric: &str) -> Option<f64> {
        self.summary(algorithm, metric).map(|r| r.mean)
    }

    /// Raw per-run values, in fold order.
    pub fn values(&self, algorithm: &str, metric: &str) -> Option<&[f64]> {
        self.series
            .iter()
            .find(|s| s.algorithm == algorithm && s.metric == metric)
            .map(|s| s.values.as_slice())
    }

    pub fn p_value(&self, a: &str, b: &str, metric: &str) -> Option<f64> {
        self.p_values
            .iter()
            .find(|r| {
                r.metric == metric
                    && ((r.algorithm_a == a && r.algorithm_b == b) || (r.algorithm_a == b && r.algorithm_b == a))
            })
            .map(|r| r.p_value)
    }

    pub fn write_metrics_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "algorithm,metric,mean,std")?;
        for r in &self.summary {
            writeln!(out, "{},{},{},{}", r.algorithm, r.metric, r.mean, r.std)?;
        }
        Ok(())
    }

    pub fn write_pvalues_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "algorithm_a,algorithm_b,metric,p_value")?;
        for r in &self.p_values {
            writeln!(out, "{},{},{},{}", r.algorithm_a, r.algorithm_b, r.metric, r.p_value)?;
        }
        Ok(())
    }

    pub fn write_timing_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "algorithm,p50_ms,p99_ms,samples_per_sec")?;
        for (name, t) in &self.timing {
            writeln!(out, "{},{},{},{}", name, t.p50_ms, t.p99_ms, t.samples_per_sec)?;
        }
        Ok(())
    }

    /// Human-readable `mean ± std` table, one row per algorithm.
    pub fn pretty_table(&self) -> String {
        let metrics: Vec<&str> = {
            let mut seen = Vec::new();
            for r in &self.summary {
                if !seen.contains(&r.metric.as_str()) {
                    seen.push(r.metric.as_str());
                }
            }
            seen
        };
        let mut s = String::new();
        let _ = write!(s, "{:<12}", "algorithm");
        for m in &metrics {
            let _ = write!(s, " {:>22}", m);
        }
        s.push('\n');
        for a in &self.algorithms {
            let _ = write!(s, "{:<12}", a);
            for m in &metrics {
                match self.summary(a, m) {
                    Some(r) => {
                        let _ = write!(s, " {:>22}", format!("{:.4} ± {:.4}", r.mean, r.std));
                    }
                    None => {
                        let _ = write!(s, " {:>22}", "-");
                    }
                }
            }
            s.push('\n');
        }
        s
    }
}

/// Published six-metric scores for one algorithm on a benchmark, in the order
/// chebyshev, clark, canberra, kl, cosine, intersection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceRow {
    pub dataset: &'static str,
    pub algorithm: &'static str,
    pub means: [f64; 6],
}

const REFERENCE: [ReferenceRow; 4] = [
    ReferenceRow {
        dataset: "sjaffe",
        algorithm: "uaknn",
        means: [0.0825, 0.4011, 0.7892, 0.04015, 0.9890, 0.8849],
    },
    ReferenceRow {
        dataset: "sjaffe",
        algorithm: "wuaknn",
        means: [0.0899, 0.4129, 0.8013, 0.04224, 0.9655, 0.8589],
    },
    ReferenceRow {
        dataset: "sbu",
        algorithm: "uaknn",
        means: [0.0811, 0.3987, 0.7533, 0.03541, 0.9888, 0.8997],
    },
    ReferenceRow {
        dataset: "sbu",
        algorithm: "wuaknn",
        means: [0.0970, 0.4151, 0.7810, 0.04140, 0.9711, 0.8797],
    },
];

/// Published rows for a dataset whose name mentions SJAFFE or SBU-3DFE.
pub fn reference_rows(dataset_name: &str) -> Vec<ReferenceRow> {
    let lower = dataset_name.to_ascii_lowercase();
    REFERENCE
        .iter()
        .filter(|r| lower.contains(r.dataset))
        .copied()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_std_conventions() {
        assert_eq!(mean_std(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn reference_lookup() {
        assert_eq!(reference_rows("SBU-3DFE").len(), 2);
        assert_eq!(reference_rows("sjaffe_features").len(), 2);
        assert!(reference_rows("gene").is_empty());
    }
}
