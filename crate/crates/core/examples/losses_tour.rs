//! Evaluate every loss on one small two-tissue batch.
//!
//! `cargo run --example losses_tour`

use ndarray::array;
use strank::losses::{compute_loss, LossKind, LossSpec, Relations};

fn main() -> strank::Result<()> {
    // Tissue 0 is rows 0..3, tissue 1 (ten times the scale) is rows 3..6.
    let counts = array![[1.0], [3.0], [6.0], [12.0], [31.0], [58.0]];
    let scores = array![[0.1], [0.9], [1.7], [0.2], [1.1], [1.8]];
    let libs: Vec<f64> = counts.column(0).to_vec();
    let pairs = vec![(0, 1), (1, 2), (3, 4), (4, 5)];
    let lists = vec![vec![0, 1, 2], vec![3, 4, 5]];
    for kind in LossKind::ALL {
        let relations = match kind {
            LossKind::Rank | LossKind::PairStrank => Relations::Pairs(pairs.clone()),
            LossKind::ListStrank => Relations::Groups(lists.clone()),
            _ => Relations::None,
        };
        let out = compute_loss(&LossSpec::new(kind), counts.view(), scores.view(), &relations, &libs)?;
        let grad: Vec<String> = out.grad.iter().map(|g| format!("{g:+.3}")).collect();
        println!("{:<11} value {:>10.4}  grad [{}]", kind.label(), out.value, grad.join(" "));
    }
    Ok(())
}
