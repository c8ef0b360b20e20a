//! Repeated stratified cross-validation with paired significance tests.

use uaknn::data_io::{generate_synthetic, SyntheticSpec};
use uaknn::evaluation::{run_cv, CvOptions, CvPlan, NamedAlgorithm};
use uaknn::PredictorConfig;

fn main() -> uaknn::Result<()> {
    let ds = generate_synthetic(&SyntheticSpec::sbu_like(1))?;
    let algorithms = [
        NamedAlgorithm::new(PredictorConfig::uaknn()),
        NamedAlgorithm::new(PredictorConfig::wuaknn()),
        NamedAlgorithm::new(PredictorConfig::vanilla(5)),
    ];
    let plan = CvPlan {
        repetitions: 2,
        ..Default::default()
    };
    let report = run_cv(&ds, &algorithms, &plan, &CvOptions::default())?;
    print!("{}", report.pretty_table());
    for other in ["wuaknn", "knn"] {
        println!(
            "cosine p-value uaknn vs {other}: {:.3e}",
            report.p_value("uaknn", other, "cosine").unwrap_or(f64::NAN)
        );
    }
    report.write_metrics_csv(std::io::stdout().lock()).map_err(|e| uaknn::Error::Internal(e.to_string()))?;
    Ok(())
}
