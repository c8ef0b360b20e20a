//! Monte Carlo prototype weights: the Gaussian means are the base-2 softmax
//! of the prototype similarities, each weight is a clipped-Gaussian estimate
//! plus a small perturbation term.

use uaknn::weighting::{compute_weights, softmax_star, WeightConfig};

fn main() -> uaknn::Result<()> {
    let sims = [Some(0.92), Some(0.85), None, Some(0.40)];
    let config = WeightConfig::default();
    let present: Vec<f64> = sims.iter().flatten().copied().collect();
    println!("softmax* of {present:?}: {:?}", softmax_star(&present, config.base)?);
    for query in 0..3 {
        let w = compute_weights(7, query, &sims, &config)?;
        println!("query {query}: weights {:.4?}", w.weights);
    }
    let sharp = WeightConfig {
        variance: 1e-8,
        perturbation: 0.0,
        ..config
    };
    println!("near-deterministic limit: {:.4?}", compute_weights(7, 0, &sims, &sharp)?.weights);
    Ok(())
}
