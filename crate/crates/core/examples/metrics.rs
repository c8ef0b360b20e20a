//! The six label-distribution metrics on a single truth/prediction pair.

use uaknn::metrics::{evaluate_set, Metric};
use uaknn::LabelDistribution;

fn main() -> uaknn::Result<()> {
    let truth = LabelDistribution::new(vec![0.6, 0.3, 0.1])?;
    let pred = LabelDistribution::new(vec![0.5, 0.3, 0.2])?;
    for m in Metric::ALL {
        let dir = if m.higher_is_better() { "higher is better" } else { "lower is better" };
        println!("{:<13} {:.6}  ({dir})", m.name(), m.compute(&truth, &pred)?);
    }
    let report = evaluate_set(&[truth], &[pred])?;
    println!("averaged over {} pair(s): cosine {:.6}", report.count, report.cosine);
    Ok(())
}
