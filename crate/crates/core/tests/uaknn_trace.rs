//! Step-by-step recomputation of a UAKNN prediction from raw generator draws.

use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use uaknn::data_io::{generate_synthetic, SyntheticSpec};
use uaknn::predictors::predict_uaknn;
use uaknn::{PredictorConfig, PrototypeIndex, WeightConfig};

fn softmax2(x: &[f64], base: f64) -> Vec<f64> {
    let max = x.iter().cloned().fold(f64::MIN, f64::max);
    let p: Vec<f64> = x.iter().map(|v| base.powf(v - max)).collect();
    let s: f64 = p.iter().sum();
    p.iter().map(|v| v / s).collect()
}

fn clipped_mean(seed: u64, query: u64, prototype: u64, step: u64, mean: f64, cfg: &WeightConfig) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((query << 32) | (prototype << 1) | step);
    let sd = cfg.variance.sqrt();
    let mut total = 0.0;
    for _ in 0..cfg.samples {
        let z: f64 = rng.sample(StandardNormal);
        total += (mean + sd * z).clamp(0.0, 1.0);
    }
    total / cfg.samples as f64
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

#[test]
fn prediction_matches_manual_trace() {
    let ds = generate_synthetic(&SyntheticSpec {
        m: 120,
        n: 8,
        l: 4,
        spread: 0.25,
        concentration: 3.0,
        seed: 31,
    })
    .unwrap();
    let index = PrototypeIndex::build(&ds).unwrap();
    let config = PredictorConfig::uaknn().with_seed(77);
    let cfg = config.weights;
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    for query in 0..25u64 {
        let x: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();

        // nearest member of each argmax group, ties to the lower row
        let mut best: Vec<Option<(usize, f64)>> = vec![None; 4];
        for (i, (f, d)) in ds.features().iter().zip(ds.labels()).enumerate() {
            let s = cosine(f, &x);
            let slot = &mut best[d.argmax()];
            if slot.is_none_or(|(_, b)| s > b) {
                *slot = Some((i, s));
            }
        }
        let present: Vec<(usize, usize, f64)> = best
            .iter()
            .enumerate()
            .filter_map(|(p, b)| b.map(|(i, s)| (p, i, s)))
            .collect();
        let mus = softmax2(&present.iter().map(|t| t.2).collect::<Vec<_>>(), cfg.base);

        let mut combined = vec![0.0; 4];
        for (&(p, row, _), mu) in present.iter().zip(&mus) {
            let w = clipped_mean(77, query, p as u64, 0, *mu, &cfg)
                + clipped_mean(77, query, p as u64, 1, cfg.perturbation * mu, &cfg);
            for (c, d) in combined.iter_mut().zip(ds.labels()[row].iter()) {
                *c += w * d;
            }
        }
        let want = softmax2(&combined, cfg.base);

        let got = predict_uaknn(&index, &x, &config, query).unwrap();
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).abs() <= 1e-12, "query {query}: {:?} vs {want:?}", got.degrees());
        }
    }
}
