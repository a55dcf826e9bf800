//! Binomial thinning of the training counts and its effect on the relational
//! losses.
//!
//! `cargo run --release --example downsampling -- [desk|smoke]`

use strank::harness::bench::{DEFAULT_RATES, DOWNSAMPLE_LOSSES};
use strank::harness::{sweep_downsample, Preset};
use strank::sampling::RngStream;
use strank::synthgen::{downsample_counts, generate_dataset, SamplingMode, SynthConfig};

fn main() -> strank::Result<()> {
    let preset: Preset = std::env::args().nth(1).as_deref().unwrap_or("smoke").parse()?;
    let train = generate_dataset(&SynthConfig { n_train_per_tissue: 2_000, ..SynthConfig::default() })?.train;
    let mut rng = RngStream::new(0, 0);
    for rate in DEFAULT_RATES {
        let thinned = downsample_counts(&train, rate, &mut rng)?;
        let zeros = thinned.counts().iter().filter(|&&c| c == 0).count();
        println!("rate {rate:<4}: total {:>8}, zero fraction {:.3}", thinned.total_count(), zeros as f64 / thinned.n_spots() as f64);
    }
    let table = sweep_downsample(&preset.settings(), &DEFAULT_RATES, &DOWNSAMPLE_LOSSES, SamplingMode::Imbalanced)?;
    print!("{}", table.to_csv());
    Ok(())
}
