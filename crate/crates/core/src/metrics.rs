//! The six label distribution learning measures, plus the entropy and
//! variance diagnostics for predicted distributions.
//!
//! Distances (lower is better): Chebyshev, Clark, Canberra, Kullback-Leibler.
//! Similarities (higher is better): cosine, intersection. All functions take
//! the ground truth first and the prediction second; only KL is asymmetric.

use std::fmt;

use crate::error::{Error, Result};

/// Floor applied inside the KL logarithm.
pub const KL_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Chebyshev,
    Clark,
    Canberra,
    Kl,
    Cosine,
    Intersection,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::Chebyshev,
        Metric::Clark,
        Metric::Canberra,
        Metric::Kl,
        Metric::Cosine,
        Metric::Intersection,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Chebyshev => "chebyshev",
            Metric::Clark => "clark",
            Metric::Canberra => "canberra",
            Metric::Kl => "kl",
            Metric::Cosine => "cosine",
            Metric::Intersection => "intersection",
        }
    }

    pub fn higher_is_better(self) -> bool {
        matches!(self, Metric::Cosine | Metric::Intersection)
    }

    pub fn compute(self, truth: &[f64], pred: &[f64]) -> Result<f64> {
        match self {
            Metric::Chebyshev => chebyshev(truth, pred),
            Metric::Clark => clark(truth, pred),
            Metric::Canberra => canberra(truth, pred),
            Metric::Kl => kl_divergence(truth, pred),
            Metric::Cosine => cosine_similarity(truth, pred),
            Metric::Intersection => intersection(truth, pred),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn check_len(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: b.len(),
        });
    }
    Ok(())
}

pub fn chebyshev(truth: &[f64], pred: &[f64]) -> Result<f64> {
    check_len(truth, pred)?;
    Ok(truth
        .iter()
        .zip(pred)
        .map(|(d, l)| (d - l).abs())
        .fold(0.0, f64::max))
}

/// `sqrt(sum((d - l)^2 / (d + l)^2))`; components with `d + l = 0` add nothing.
pub fn clark(truth: &[f64], pred: &[f64]) -> Result<f64> {
    check_len(truth, pred)?;
    let sum: f64 = truth
        .iter()
        .zip(pred)
        .map(|(d, l)| {
            let s = d + l;
            if s == 0.0 {
                0.0
            } else {
                let r = (d - l) / s;
                r * r
            }
        })
        .sum();
    Ok(sum.sqrt())
}

/// `sum(|d - l| / (d + l))`; components with `d + l = 0` add nothing.
pub fn canberra(truth: &[f64], pred: &[f64]) -> Result<f64> {
    check_len(truth, pred)?;
    Ok(truth
        .iter()
        .zip(pred)
        .map(|(d, l)| {
            let s = d + l;
            if s == 0.0 {
                0.0
            } else {
                (d - l).abs() / s
            }
        })
        .sum())
}

/// `sum(d ln(d / l))` with the ground truth `d` first. Terms with `d = 0` are
/// exactly zero; otherwise both arguments of the logarithm are floored at
/// [`KL_EPSILON`].
pub fn kl_divergence(truth: &[f64], pred: &[f64]) -> Result<f64> {
    check_len(truth, pred)?;
    Ok(truth
        .iter()
        .zip(pred)
        .map(|(&d, &l)| {
            if d == 0.0 {
                0.0
            } else {
                d * (d.max(KL_EPSILON) / l.max(KL_EPSILON)).ln()
            }
        })
        .sum())
}

pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    check_len(a, b)?;
    let (mut dot, mut na, mut nb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok((dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0))
}

pub fn intersection(truth: &[f64], pred: &[f64]) -> Result<f64> {
    check_len(truth, pred)?;
    Ok(truth.iter().zip(pred).map(|(d, l)| d.min(*l)).sum())
}

/// Natural-log Shannon entropy with `0 ln 0 = 0`.
pub fn shannon_entropy(dist: &[f64]) -> f64 {
    -dist
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|p| p * p.ln())
        .sum::<f64>()
}

/// Population variance of the degree values.
pub fn component_variance(dist: &[f64]) -> f64 {
    let n = dist.len() as f64;
    let mean = dist.iter().sum::<f64>() / n;
    dist.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / n
}

/// Per-metric means over a prediction set.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MetricReport {
    pub chebyshev: f64,
    pub clark: f64,
    pub canberra: f64,
    pub kl: f64,
    pub cosine: f64,
    pub intersection: f64,
    pub count: usize,
}

impl MetricReport {
    pub fn get(&self, metric: Metric) -> f64 {
        match metric {
            Metric::Chebyshev => self.chebyshev,
            Metric::Clark => self.clark,
            Metric::Canberra => self.canberra,
            Metric::Kl => self.kl,
            Metric::Cosine => self.cosine,
            Metric::Intersection => self.intersection,
        }
    }

    fn slot(&mut self, metric: Metric) -> &mut f64 {
        match metric {
            Metric::Chebyshev => &mut self.chebyshev,
            Metric::Clark => &mut self.clark,
            Metric::Canberra => &mut self.canberra,
            Metric::Kl => &mut self.kl,
            Metric::Cosine => &mut self.cosine,
            Metric::Intersection => &mut self.intersection,
        }
    }
}

/// Unweighted mean of every metric over paired truths and predictions.
pub fn evaluate_set<T, P>(truths: &[T], preds: &[P]) -> Result<MetricReport>
where
    T: AsRef<[f64]>,
    P: AsRef<[f64]>,
{
    if truths.is_empty() {
        return Err(Error::EmptySet);
    }
    if truths.len() != preds.len() {
        return Err(Error::LengthMismatch {
            expected: truths.len(),
            actual: preds.len(),
        });
    }
    let mut report = MetricReport::default();
    for (d, l) in truths.iter().zip(preds) {
        for metric in Metric::ALL {
            *report.slot(metric) += metric.compute(d.as_ref(), l.as_ref())?;
        }
    }
    let n = truths.len() as f64;
    for metric in Metric::ALL {
        *report.slot(metric) /= n;
    }
    report.count = truths.len();
    Ok(report)
}

impl AsRef<[f64]> for crate::distribution::LabelDistribution {
    fn as_ref(&self) -> &[f64] {
        self.degrees()
    }
}
