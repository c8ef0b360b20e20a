//! Paired two-sided t-test over per-fold scores.

use uaknn::evaluation::significance_test;

fn main() -> uaknn::Result<()> {
    let a = [0.91, 0.93, 0.92, 0.94, 0.90];
    let b = [0.89, 0.90, 0.91, 0.91, 0.88];
    println!("p = {:.6}", significance_test(&a, &b)?);
    println!("identical inputs: p = {}", significance_test(&a, &a)?);
    Ok(())
}
