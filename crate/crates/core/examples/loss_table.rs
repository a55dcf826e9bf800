//! Loss comparison table over both sampling settings.
//!
//! `cargo run --release --example loss_table -- [desk|paper|smoke] [workers]`
//! The desk preset takes several minutes per core.

use strank::harness::{reproduce_table1, Preset};

fn main() -> strank::Result<()> {
    let mut args = std::env::args().skip(1);
    let preset: Preset = args.next().as_deref().unwrap_or("smoke").parse()?;
    let workers = args.next().and_then(|w| w.parse().ok()).unwrap_or(1);
    let table = reproduce_table1(&preset.settings().with_workers(workers))?;
    print!("{}", table.to_csv());
    Ok(())
}
