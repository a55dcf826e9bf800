//! Spearman correlation with tied values.
//!
//! `cargo run --example spearman_ties`

use strank::metrics::{average_ranks, spearman};

fn main() -> strank::Result<()> {
    let pred = [1.0, 2.0, 2.0, 3.0];
    let truth = [1.0, 2.0, 3.0, 4.0];
    println!("ranks of {pred:?}: {:?}", average_ranks(&pred));
    println!("spearman = {:.6}", spearman(&pred, &truth)?);
    println!("constant prediction -> {}", spearman(&[5.0; 4], &truth)?);
    let squashed: Vec<f64> = truth.iter().map(|v: &f64| v.ln()).collect();
    println!("monotone transform -> {:.6}", spearman(&squashed, &truth)?);
    Ok(())
}
