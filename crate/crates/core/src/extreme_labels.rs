//! Evaluation on very wide label spaces.
//!
//! The retained label indices ("LON") are those where the ground truth exceeds
//! a threshold. Truth and prediction are both restricted to them and each
//! renormalized with a base-2 softmax before scoring.

use crate::error::{Error, Result};
use crate::metrics::{evaluate_set, MetricReport};
use crate::weighting::softmax_star;

pub const DEFAULT_THRESHOLD: f64 = 0.014;
pub const SLICE_BASE: f64 = 2.0;

#[derive(Debug, Clone, PartialEq)]
pub struct LabelSliceResult {
    /// Retained label indices, ascending.
    pub lon: Vec<usize>,
    pub truth: Vec<f64>,
    pub prediction: Vec<f64>,
}

pub fn slice_and_normalize(truth: &[f64], prediction: &[f64], threshold: f64) -> Result<LabelSliceResult> {
    if truth.len() != prediction.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            actual: prediction.len(),
        });
    }
    let limit = 1.0 / truth.len() as f64;
    if !(threshold < limit) {
        return Err(Error::ThresholdTooHigh { threshold, limit });
    }
    let lon: Vec<usize> = truth
        .iter()
        .enumerate()
        .filter(|(_, &d)| d > threshold)
        .map(|(i, _)| i)
        .collect();
    let pick = |v: &[f64]| lon.iter().map(|&i| v[i]).collect::<Vec<_>>();
    Ok(LabelSliceResult {
        truth: softmax_star(&pick(truth), SLICE_BASE)?,
        prediction: softmax_star(&pick(prediction), SLICE_BASE)?,
        lon,
    })
}

/// Metric means over sliced pairs.
pub fn evaluate_sliced<T, P>(truths: &[T], preds: &[P], threshold: f64) -> Result<MetricReport>
where
    T: AsRef<[f64]>,
    P: AsRef<[f64]>,
{
    if truths.len() != preds.len() {
        return Err(Error::LengthMismatch {
            expected: truths.len(),
            actual: preds.len(),
        });
    }
    let slices = truths
        .iter()
        .zip(preds)
        .map(|(d, l)| slice_and_normalize(d.as_ref(), l.as_ref(), threshold))
        .collect::<Result<Vec<_>>>()?;
    let t: Vec<&[f64]> = slices.iter().map(|s| s.truth.as_slice()).collect();
    let p: Vec<&[f64]> = slices.iter().map(|s| s.prediction.as_slice()).collect();
    evaluate_set(&t, &p)
}
