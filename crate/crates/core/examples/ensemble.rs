//! The five-member variance-grid ensemble next to a single UAKNN.

use uaknn::data_io::{generate_synthetic, SyntheticSpec};
use uaknn::predictors::{predict, predict_ensemble};
use uaknn::{EnsembleConfig, PredictorConfig, PrototypeIndex};

fn main() -> uaknn::Result<()> {
    let ds = generate_synthetic(&SyntheticSpec {
        m: 400,
        n: 10,
        l: 5,
        spread: 0.2,
        concentration: 3.0,
        seed: 3,
    })?;
    let index = PrototypeIndex::build(&ds)?;
    let grid = EnsembleConfig::variance_grid(PredictorConfig::uaknn());
    let variances: Vec<f64> = grid.members.iter().map(|m| m.weights.variance).collect();
    println!("member variances {variances:?}");
    let x = [0.9, 0.1, 0.0, 0.0, 0.3, 0.0, 0.0, 0.0, 0.0, 0.1];
    println!("single   {:.4?}", predict(&index, &x, &PredictorConfig::uaknn(), 0)?.degrees());
    println!("ensemble {:.4?}", predict_ensemble(&index, &x, &grid, 0)?.degrees());
    Ok(())
}
