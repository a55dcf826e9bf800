//! Run an experiment on a dataset stored as CSV files, split by tissue.
//!
//! `cargo run --release --example ingest_csv`

use ndarray::Array2;
use strank::dataset::{load_dataset, save_dataset, Dataset};
use strank::harness::{run_experiment, ExperimentConfig, IngestConfig};
use strank::losses::{LossKind, LossSpec};
use strank::optim::TrainConfig;
use strank::synthgen::{generate_tissue, SynthConfig};
use strank::sampling::RngStream;

fn main() -> strank::Result<()> {
    // Four tissues with alternating batch scales, written as a CSV dataset.
    let mut config = SynthConfig::default();
    config.tissues = vec![config.tissues[0], config.tissues[1], config.tissues[0], config.tissues[1]];
    let mut rng = RngStream::new(1, 0);
    let (mut xs, mut es, mut ids) = (Vec::new(), Vec::new(), Vec::new());
    for t in 0..4 {
        let (x, e) = generate_tissue(&config, t, 1_500, &mut rng)?;
        ids.extend(std::iter::repeat_n(t, x.len()));
        xs.extend(x);
        es.extend(e);
    }
    let n = xs.len();
    let dataset = Dataset::new(
        Array2::from_shape_vec((n, 1), xs).expect("one feature"),
        Array2::from_shape_vec((n, 1), es).expect("one gene"),
        ids,
    )?;
    let dir = std::env::temp_dir().join("strank-ingest-example");
    save_dataset(&dataset, &dir.join("data"))?;
    let loaded = load_dataset(&dir.join("data"))?;
    println!("loaded {} spots from {} tissues", loaded.n_spots(), loaded.n_tissues());

    let experiment = ExperimentConfig {
        synth: None,
        ingest: Some(IngestConfig {
            dir: dir.join("data"),
            train_tissues: vec![0, 1],
            val_tissues: vec![2],
            test_tissues: vec![3],
        }),
        loss: LossSpec::new(LossKind::ListStrank).with_list_size(64),
        train: TrainConfig { epochs: 30, ..TrainConfig::default() },
        repeats: 2,
        output_dir: dir.join("run"),
    };
    let outcome = run_experiment(&experiment)?;
    println!(
        "test SCC against observed counts: {:.4} +/- {:.4}; reports in {}",
        outcome.mean,
        outcome.std,
        dir.join("run").display()
    );
    Ok(())
}
