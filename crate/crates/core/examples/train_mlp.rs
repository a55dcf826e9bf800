//! Train the 1-128-128-1 network with a pointwise and a listwise loss on the
//! imbalanced benchmark and compare test SCC against the noiseless mean.
//!
//! `cargo run --release --example train_mlp`

use strank::losses::{LossKind, LossSpec};
use strank::metrics::evaluate;
use strank::model::Mlp;
use strank::optim::{train, TrainConfig};
use strank::sampling::RngStream;
use strank::synthgen::{generate_dataset, SamplingMode, SynthConfig};

fn main() -> strank::Result<()> {
    let data = generate_dataset(&SynthConfig {
        n_train_per_tissue: 3_000,
        n_val: 2_000,
        n_test: 5_000,
        mode: SamplingMode::Imbalanced,
        seed: 7,
        ..SynthConfig::default()
    })?;
    let config = TrainConfig { epochs: 40, seed: 7, ..TrainConfig::default() };
    for kind in [LossKind::Poisson, LossKind::PairStrank, LossKind::ListStrank] {
        let model = Mlp::init(1, config.hidden_dim, 1, &mut RngStream::new(config.seed, 0))?;
        let (model, history) = train(model, &data.train, &LossSpec::new(kind), &config, None)?;
        let last = history.epochs.last().map_or(f64::NAN, |e| e.train_loss);
        let report = evaluate(&model, &data.test)?;
        println!("{:<11} final train loss {last:>10.4}  test SCC {:.4}", kind.label(), report.mean_scc);
    }
    Ok(())
}
