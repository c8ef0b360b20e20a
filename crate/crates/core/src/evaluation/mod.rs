//! Repeated stratified cross-validation, paired significance tests,
//! one-at-a-time parameter sweeps and throughput benchmarks.

mod bench;
mod cv;
mod report;
mod significance;
mod sweep;

pub use bench::{bench_throughput, percentile, TimingStats};
pub use cv::{make_folds, run_cv, CvOptions, CvPlan, Fold, NamedAlgorithm};
pub use report::{reference_rows, EvaluationReport, PValueRow, ReferenceRow, SummaryRow};
pub use significance::significance_test;
pub use sweep::{parameter_sweep, write_sweep_csv, SweepGrid, SweepParameter, SweepRow};
