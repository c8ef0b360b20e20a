//! Slicing a 68-label distribution down to its significant labels before
//! scoring.

use uaknn::extreme_labels::{slice_and_normalize, DEFAULT_THRESHOLD};

fn main() -> uaknn::Result<()> {
    let mut truth = vec![0.002; 68];
    truth[3] = 0.5;
    truth[10] = 0.2;
    truth[40] = 0.166;
    let pred = vec![1.0 / 68.0; 68];
    let s = slice_and_normalize(&truth, &pred, DEFAULT_THRESHOLD)?;
    println!("kept labels {:?}", s.lon);
    println!("sliced truth      {:.4?}", s.truth);
    println!("sliced prediction {:.4?}", s.prediction);

    let small = slice_and_normalize(&[0.5, 0.3, 0.2], &[0.4, 0.2, 0.4], DEFAULT_THRESHOLD)?;
    println!("3-label slice of [0.5, 0.3, 0.2]: {:.6?}", small.truth);
    Ok(())
}
