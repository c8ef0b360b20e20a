//! Write a dataset to CSV, load it back, and print its statistics.

use uaknn::data_io::{dataset_stats, generate_synthetic, load_csv, save_csv, DatasetManifest, SyntheticSpec};

fn main() -> uaknn::Result<()> {
    let ds = generate_synthetic(&SyntheticSpec {
        m: 200,
        n: 6,
        l: 3,
        spread: 0.2,
        concentration: 3.0,
        seed: 5,
    })?;
    let path = std::env::temp_dir().join("uaknn-roundtrip.csv");
    save_csv(&ds, &path, true, b',')?;
    let manifest = DatasetManifest {
        has_header: true,
        ..DatasetManifest::new(&path, 6)
    };
    let back = load_csv(&manifest)?;
    assert_eq!(back.labels(), ds.labels());
    let stats = dataset_stats(&back);
    println!("{} rows, {} features, {} labels", stats.n_samples, stats.n_features, stats.n_labels);
    println!("label means {:.4?}", stats.label_means);
    println!("prototype sizes {:?}", stats.prototype_counts);
    Ok(())
}
