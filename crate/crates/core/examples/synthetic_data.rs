//! Generate the two-tissue synthetic benchmark and summarize each tissue.
//!
//! `cargo run --release --example synthetic_data -- [uniform|imbalanced]`

use strank::synthgen::{generate_dataset, mean_function, SamplingMode, SynthConfig};

fn main() -> strank::Result<()> {
    let mode = match std::env::args().nth(1).as_deref() {
        Some("imbalanced") => SamplingMode::Imbalanced,
        _ => SamplingMode::Uniform,
    };
    let config = SynthConfig {
        n_train_per_tissue: 5_000,
        n_val: 1_000,
        n_test: 1_000,
        mode,
        ..SynthConfig::default()
    };
    let splits = generate_dataset(&config)?;
    let train = &splits.train;
    println!("mode {mode:?}: {} training spots, {} tissues", train.n_spots(), train.n_tissues());
    for t in 0..train.n_tissues() {
        let rows: Vec<usize> = (0..train.n_spots()).filter(|&i| train.tissue_ids()[i] == t).collect();
        let xs: Vec<f64> = rows.iter().map(|&i| train.features()[[i, 0]]).collect();
        let es: Vec<f64> = rows.iter().map(|&i| train.counts()[[i, 0]] as f64).collect();
        let mean = es.iter().sum::<f64>() / es.len() as f64;
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        println!("  tissue {t}: x in [{lo:.3}, {hi:.3}], mean count {mean:.2}");
    }
    println!("mean function on a coarse grid:");
    for k in 0..=10 {
        let x = k as f64 / 10.0;
        println!("  mu({x:.1}) = {:.3}", mean_function(x, &config.mean_fn)?);
    }
    Ok(())
}
