//! One-at-a-time sweep of the UAKNN hyperparameters, written as CSV.

use uaknn::data_io::{generate_synthetic, SyntheticSpec};
use uaknn::evaluation::{parameter_sweep, write_sweep_csv, CvOptions, CvPlan, SweepGrid};
use uaknn::PredictorConfig;

fn main() -> uaknn::Result<()> {
    let ds = generate_synthetic(&SyntheticSpec {
        m: 600,
        n: 32,
        l: 6,
        spread: 0.1,
        concentration: 2.0,
        seed: 4,
    })?;
    let plan = CvPlan {
        repetitions: 1,
        ..Default::default()
    };
    let rows = parameter_sweep(&ds, &SweepGrid::default(), &plan, &PredictorConfig::uaknn(), &CvOptions::default())?;
    write_sweep_csv(&rows, std::io::stdout().lock()).map_err(|e| uaknn::Error::Internal(e.to_string()))?;
    Ok(())
}
