use std::fmt;
use std::io::Write;

use crate::distribution::LdlDataset;
use crate::error::{Error, Result};
use crate::metrics::Metric;
use crate::predictors::PredictorConfig;

use super::cv::{run_cv, CvOptions, CvPlan, NamedAlgorithm};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParameter {
    Variance,
    Samples,
    Perturbation,
    Base,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            SweepParameter::Variance => "variance",
            SweepParameter::Samples => "samples",
            SweepParameter::Perturbation => "perturbation",
            SweepParameter::Base => "base",
        }
    }

    fn apply(self, mut config: PredictorConfig, value: f64) -> Result<PredictorConfig> {
        let w = &mut config.weights;
        match self {
            SweepParameter::Variance => w.variance = value,
            SweepParameter::Samples => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(Error::Config(format!("sample count must be a positive integer, got {value}")));
                }
                w.samples = value as usize;
            }
            SweepParameter::Perturbation => w.perturbation = value,
            SweepParameter::Base => w.base = value,
        }
        Ok(config)
    }
}

impl fmt::Display for SweepParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Value lists per parameter; each parameter is varied alone.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub grids: Vec<(SweepParameter, Vec<f64>)>,
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self {
            grids: vec![
                (SweepParameter::Variance, vec![0.1, 0.3, 0.5, 0.7, 0.9]),
                (SweepParameter::Samples, vec![50.0, 100.0, 150.0, 200.0, 300.0]),
                (SweepParameter::Perturbation, vec![0.02, 0.03, 0.05, 0.10, 0.15]),
                (SweepParameter::Base, vec![1.2, 1.5, 1.8, 2.1, 2.4]),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub parameter: SweepParameter,
    pub value: f64,
    pub metric: Metric,
    pub mean: f64,
}

/// One cross-validated UAKNN run per grid value, other settings from `base`.
pub fn parameter_sweep(
    dataset: &LdlDataset,
    grid: &SweepGrid,
    plan: &CvPlan,
    base: &PredictorConfig,
    options: &CvOptions,
) -> Result<Vec<SweepRow>> {
    if grid.grids.is_empty() {
        return Err(Error::EmptyGrid("all parameters".into()));
    }
    if let Some((p, _)) = grid.grids.iter().find(|(_, v)| v.is_empty()) {
        return Err(Error::EmptyGrid(p.name().into()));
    }
    let mut rows = Vec::new();
    for (parameter, values) in &grid.grids {
        for &value in values {
            let config = parameter.apply(*base, value)?;
            let report = run_cv(dataset, &[NamedAlgorithm::new(config)], plan, options)?;
            for metric in Metric::ALL {
                let mean = report
                    .mean(&config.kind.to_string(), metric.name())
                    .ok_or_else(|| Error::Internal(format!("missing {metric}")))?;
                rows.push(SweepRow {
                    parameter: *parameter,
                    value,
                    metric,
                    mean,
                });
            }
        }
    }
    Ok(rows)
}

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "parameter,value,metric,mean")?;
    for r in rows {
        writeln!(out, "{},{},{},{}", r.parameter, r.value, r.metric, r.mean)?;
    }
    Ok(())
}
