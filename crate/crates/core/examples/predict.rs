//! UAKNN, WUAKNN and vanilla KNN on the same query.

use uaknn::data_io::{generate_synthetic, SyntheticSpec};
use uaknn::predictors::predict;
use uaknn::{PredictorConfig, PrototypeIndex};

fn main() -> uaknn::Result<()> {
    let ds = generate_synthetic(&SyntheticSpec {
        m: 500,
        n: 12,
        l: 4,
        spread: 0.2,
        concentration: 3.0,
        seed: 2,
    })?;
    let (train, test) = (ds.subset(&(1..500).collect::<Vec<_>>())?, 0);
    let index = PrototypeIndex::build(&train)?;
    let x = &ds.features()[test];
    println!("truth   {:.4?}", ds.labels()[test].degrees());
    for config in [PredictorConfig::uaknn(), PredictorConfig::wuaknn(), PredictorConfig::vanilla(5)] {
        let p = predict(&index, x, &config, 0)?;
        println!("{:<7} {:.4?}", config.kind.to_string(), p.degrees());
    }
    Ok(())
}
