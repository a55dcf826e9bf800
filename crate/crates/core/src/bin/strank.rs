use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use strank::dataset::{load_dataset, save_dataset};
use strank::harness::{
    bench::{DEFAULT_NK, DEFAULT_RATES, DOWNSAMPLE_LOSSES},
    experiment::{run_experiment, ExperimentConfig},
    sweep_downsample, sweep_nk, sweep_params, BenchSettings, Preset, SweepParam,
};
use strank::losses::LossKind;
use strank::metrics::evaluate;
use strank::model::Mlp;
use strank::synthgen::{generate_dataset, SamplingMode, SynthConfig};
use strank::{Error, Result};

#[derive(Parser)]
#[command(name = "strank", version, about = "Batch-robust ranking losses for count regression")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset into `<out>/{train,val,test}`.
    Gen {
        /// JSON synthetic config; defaults are used when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an experiment config.
    Train {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Score a checkpoint on a dataset directory.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Loss comparison table in both sampling settings.
    Table1(GridArgs),
    /// ListSTRank list-size sweep.
    SweepNk {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<usize>>,
    },
    /// Binomial downsampling sweep.
    SweepDownsample {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_delimiter = ',')]
        rates: Option<Vec<f64>>,
        /// uniform or imbalanced.
        #[arg(long, default_value = "imbalanced")]
        setting: String,
    },
    /// Batch-effect and dispersion sweep.
    SweepParams {
        #[command(flatten)]
        grid: GridArgs,
        /// One of alpha2, beta2, dispersion; all three when omitted.
        #[arg(long)]
        param: Option<String>,
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
    },
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value = "desk")]
    preset: String,
    /// JSON benchmark settings; replaces the preset.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    out: PathBuf,
}

impl GridArgs {
    fn settings(&self) -> Result<BenchSettings> {
        let mut settings = match &self.config {
            Some(path) => read_json(path)?,
            None => self.preset.parse::<Preset>()?.settings(),
        };
        if let Some(seeds) = self.seeds {
            settings.seeds = seeds;
        }
        settings.workers = self.workers;
        settings.validate()?;
        Ok(settings)
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| match e.kind() {
        std::io::ErrorKind::NotFound => Error::NotFound(path.to_path_buf()),
        _ => Error::Io { path: path.to_path_buf(), source: e },
    })?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| Error::Config {
        field: e.path().to_string(),
        msg: e.into_inner().to_string(),
    })
}

fn write(dir: &Path, name: &str, body: &str) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.to_path_buf(), source: e })?;
    let path = dir.join(name);
    fs::write(&path, body).map_err(|e| Error::Io { path: path.clone(), source: e })?;
    println!("wrote {}", path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen { config, out } => {
            let config: SynthConfig = match config {
                Some(p) => read_json(&p)?,
                None => SynthConfig::default(),
            };
            config.validate()?;
            let splits = generate_dataset(&config)?;
            for (name, ds) in [("train", &splits.train), ("val", &splits.val), ("test", &splits.test)] {
                save_dataset(ds, &out.join(name))?;
            }
            println!("wrote {}", out.display());
        }
        Command::Train { config, out } => {
            let mut config = ExperimentConfig::load(&config)?;
            if let Some(out) = out {
                config.output_dir = out;
            }
            let outcome = run_experiment(&config)?;
            println!(
                "mean_scc {:.6} std {:.6} over {} repeats",
                outcome.mean,
                outcome.std,
                outcome.reports.len()
            );
        }
        Command::Eval { model, data, out } => {
            let model = Mlp::load_checkpoint(&model)?;
            let ds = load_dataset(&data)?;
            let report = evaluate(&model, &ds)?;
            report.write(&out, ds.gene_names())?;
            println!("mean_scc {:.6}", report.mean_scc);
        }
        Command::Table1(grid) => {
            let table = strank::harness::reproduce_table1(&grid.settings()?)?;
            write(&grid.out, "table1.csv", &table.to_csv())?;
        }
        Command::SweepNk { grid, values } => {
            let values = values.unwrap_or_else(|| DEFAULT_NK.to_vec());
            let modes = [SamplingMode::Uniform, SamplingMode::Imbalanced];
            let table = sweep_nk(&grid.settings()?, &values, &modes)?;
            write(&grid.out, "sweep_nk.csv", &table.to_csv())?;
        }
        Command::SweepDownsample { grid, rates, setting } => {
            let rates = rates.unwrap_or_else(|| DEFAULT_RATES.to_vec());
            let mode = match setting.as_str() {
                "uniform" => SamplingMode::Uniform,
                "imbalanced" => SamplingMode::Imbalanced,
                other => {
                    return Err(Error::Config {
                        field: "setting".into(),
                        msg: format!("expected uniform or imbalanced, got `{other}`"),
                    })
                }
            };
            let table = sweep_downsample(&grid.settings()?, &rates, &DOWNSAMPLE_LOSSES, mode)?;
            write(&grid.out, "sweep_downsample.csv", &table.to_csv())?;
        }
        Command::SweepParams { grid, param, values } => {
            let params = match param.as_deref() {
                None => vec![SweepParam::Alpha2, SweepParam::Beta2, SweepParam::Dispersion],
                Some("alpha2") => vec![SweepParam::Alpha2],
                Some("beta2") => vec![SweepParam::Beta2],
                Some("dispersion") => vec![SweepParam::Dispersion],
                Some(other) => {
                    return Err(Error::Config {
                        field: "param".into(),
                        msg: format!("unknown parameter `{other}`"),
                    })
                }
            };
            if values.is_some() && params.len() != 1 {
                return Err(Error::Config {
                    field: "values".into(),
                    msg: "--values needs a single --param".into(),
                });
            }
            let axes: Vec<_> = params
                .into_iter()
                .map(|p| (p, values.clone().unwrap_or_else(|| p.default_values())))
                .collect();
            let modes = [SamplingMode::Uniform, SamplingMode::Imbalanced];
            let table = sweep_params(&grid.settings()?, &axes, &modes, &LossKind::ALL)?;
            write(&grid.out, "sweep_params.csv", &table.to_csv())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error[{}]: {msg}", e.code());
            ExitCode::FAILURE
        }
    }
}
