//! Vary the second tissue's batch scale and compare a pointwise loss with a
//! listwise one. At alpha2 = 1 there is no scale distortion left to undo.
//!
//! `cargo run --release --example batch_effect_sweep -- [desk|smoke]`

use strank::harness::{sweep_params, Preset, SweepParam};
use strank::losses::LossKind;
use strank::synthgen::SamplingMode;

fn main() -> strank::Result<()> {
    let preset: Preset = std::env::args().nth(1).as_deref().unwrap_or("smoke").parse()?;
    let grid = [(SweepParam::Alpha2, vec![1.0, 10.0])];
    let table = sweep_params(
        &preset.settings(),
        &grid,
        &[SamplingMode::Imbalanced],
        &[LossKind::Poisson, LossKind::ListStrank],
    )?;
    print!("{}", table.to_csv());
    Ok(())
}
