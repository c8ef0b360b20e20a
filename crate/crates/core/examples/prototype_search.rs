//! Partition a training set into argmax prototypes and query the nearest
//! member of each, plus the global k nearest rows.

use uaknn::data_io::{generate_synthetic, SyntheticSpec};
use uaknn::PrototypeIndex;

fn main() -> uaknn::Result<()> {
    let ds = generate_synthetic(&SyntheticSpec {
        m: 1000,
        n: 16,
        l: 4,
        spread: 0.2,
        concentration: 4.0,
        seed: 1,
    })?;
    let index = PrototypeIndex::build(&ds)?;
    println!("prototype sizes: {:?}", index.member_counts());

    let query = ds.features()[0].values().to_vec();
    for (p, hit) in index.nearest_per_prototype(&query)?.iter().enumerate() {
        match hit {
            Some(h) => println!("prototype {p}: row {:>4} cosine {:.4}", h.index, h.similarity),
            None => println!("prototype {p}: empty"),
        }
    }
    let global: Vec<usize> = index.k_nearest_global(&query, 5)?.iter().map(|h| h.index).collect();
    println!("5 nearest rows overall: {global:?}");
    Ok(())
}
