//! Two identities of the count-aware losses: lists of two reproduce the
//! pairwise loss, and a zero-count partner turns the pairwise term into a
//! softplus ranking penalty.
//!
//! `cargo run --example pair_list_identity`

use ndarray::array;
use strank::losses::{list_strank_loss, pair_strank_loss, softplus};

fn main() -> strank::Result<()> {
    let counts = array![[5.0, 0.0], [2.0, 4.0], [0.0, 1.0], [7.0, 3.0]];
    let scores = array![[1.0, -0.5], [0.0, 0.3], [-2.0, 0.0], [0.4, 0.8]];
    let pairs = [(0, 1), (2, 3)];
    let lists: Vec<Vec<usize>> = pairs.iter().map(|&(i, j)| vec![i, j]).collect();
    let pair = pair_strank_loss(counts.view(), scores.view(), &pairs)?;
    let list = list_strank_loss(counts.view(), scores.view(), &lists, None)?;
    println!("pairwise {:.12}  listwise {:.12}", pair.value, list.value);
    let max_diff = pair.grad.iter().zip(&list.grad).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("largest gradient difference {max_diff:.1e}");

    println!("\nzero-count partner, count 3:");
    for gap in [-4.0, -1.0, 0.0, 1.0, 4.0] {
        let v = pair_strank_loss(array![[3.0], [0.0]].view(), array![[0.0], [gap]].view(), &[(0, 1)])?.value;
        println!("  s_j - s_i = {gap:+.1}: loss {v:.6}  3*softplus {:.6}", 3.0 * softplus(gap));
    }
    Ok(())
}
