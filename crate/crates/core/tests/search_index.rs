use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;

use uaknn::prototypes::IndexConfig;
use uaknn::search::SearchMode;
use uaknn::{FeatureVector, LabelDistribution, LdlDataset, PrototypeIndex, PrototypeMode};

fn random_rows(rng: &mut ChaCha8Rng, m: usize, n: usize, l: usize) -> (Vec<Vec<f64>>, Vec<LabelDistribution>) {
    let xs = (0..m)
        .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect();
    let ds = (0..m)
        .map(|_| {
            let raw: Vec<f64> = (0..l).map(|_| rng.random::<f64>() + 1e-3).collect();
            let s: f64 = raw.iter().sum();
            LabelDistribution::new(raw.iter().map(|v| v / s).collect()).unwrap()
        })
        .collect();
    (xs, ds)
}

fn dataset(xs: &[Vec<f64>], ds: &[LabelDistribution]) -> LdlDataset {
    let features = xs.iter().map(|x| FeatureVector::new(x.clone()).unwrap()).collect();
    LdlDataset::new("t", features, ds.to_vec()).unwrap()
}

#[test]
fn inserts_match_a_fresh_build() {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let (xs, ds) = random_rows(&mut rng, 400, 12, 5);
    for mode in [SearchMode::Tree, SearchMode::BruteForce] {
        let config = IndexConfig {
            search: mode,
            ..Default::default()
        };
        let mut grown = PrototypeIndex::with_config(&dataset(&xs[..300], &ds[..300]), config).unwrap();
        for i in 300..400 {
            assert_eq!(grown.insert_sample(&xs[i], &ds[i]).unwrap(), i);
        }
        let fresh = PrototypeIndex::with_config(&dataset(&xs, &ds), config).unwrap();
        assert_eq!(grown.assignments(), fresh.assignments());
        for _ in 0..200 {
            let q: Vec<f64> = (0..12).map(|_| rng.random_range(-1.0..1.0)).collect();
            assert_eq!(grown.nearest_per_prototype(&q).unwrap(), fresh.nearest_per_prototype(&q).unwrap());
            assert_eq!(grown.k_nearest_global(&q, 7).unwrap(), fresh.k_nearest_global(&q, 7).unwrap());
        }
    }
}

#[test]
fn tree_and_scan_agree_in_high_dimension() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let (xs, ds) = random_rows(&mut rng, 700, 300, 4);
    let data = dataset(&xs, &ds);
    let tree = PrototypeIndex::with_config(
        &data,
        IndexConfig {
            search: SearchMode::Tree,
            ..Default::default()
        },
    )
    .unwrap();
    let scan = PrototypeIndex::with_config(
        &data,
        IndexConfig {
            search: SearchMode::BruteForce,
            ..Default::default()
        },
    )
    .unwrap();
    for _ in 0..50 {
        let q: Vec<f64> = (0..300).map(|_| rng.random_range(-1.0..1.0)).collect();
        assert_eq!(tree.nearest_per_prototype(&q).unwrap(), scan.nearest_per_prototype(&q).unwrap());
        assert_eq!(tree.k_nearest_global(&q, 10).unwrap(), scan.k_nearest_global(&q, 10).unwrap());
    }
}

#[test]
fn overlapping_mode_assigns_every_component_above_uniform() {
    let xs = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]];
    let ds = vec![
        LabelDistribution::new(vec![0.5, 0.4, 0.1]).unwrap(),
        LabelDistribution::new(vec![0.1, 0.2, 0.7]).unwrap(),
        LabelDistribution::new(vec![0.3, 0.3, 0.4]).unwrap(),
    ];
    let config = IndexConfig {
        mode: PrototypeMode::Overlapping,
        ..Default::default()
    };
    let index = PrototypeIndex::with_config(&dataset(&xs, &ds), config).unwrap();
    assert_eq!(index.members(0), &[0]);
    assert_eq!(index.members(1), &[0]);
    assert_eq!(index.members(2), &[1, 2]);
}
