//! ListSTRank accuracy as a function of the list size.
//!
//! `cargo run --release --example list_size_sweep -- [desk|smoke]`

use strank::harness::bench::DEFAULT_NK;
use strank::harness::{sweep_nk, Preset};
use strank::synthgen::SamplingMode;

fn main() -> strank::Result<()> {
    let preset: Preset = std::env::args().nth(1).as_deref().unwrap_or("smoke").parse()?;
    let modes = [SamplingMode::Uniform, SamplingMode::Imbalanced];
    let table = sweep_nk(&preset.settings(), &DEFAULT_NK, &modes)?;
    print!("{}", table.to_csv());
    Ok(())
}
