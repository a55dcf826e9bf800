//! Config-file experiments: generate or load data, train `repeats` seeds and
//! write per-seed reports plus an aggregate.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dataset::{load_dataset, split_by_tissue, Dataset};
use crate::error::{Error, Result};
use crate::losses::LossSpec;
use crate::metrics::{evaluate, fmt_real, Report};
use crate::model::Mlp;
use crate::optim::{train, TrainConfig};
use crate::sampling::RngStream;
use crate::synthgen::{generate_dataset, SynthConfig};

use super::bench::mean_std;

/// A dataset directory on disk and its tissue-level split.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IngestConfig {
    pub dir: PathBuf,
    pub train_tissues: Vec<usize>,
    pub val_tissues: Vec<usize>,
    pub test_tissues: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub synth: Option<SynthConfig>,
    #[serde(default)]
    pub ingest: Option<IngestConfig>,
    pub loss: LossSpec,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default = "one")]
    pub repeats: usize,
    pub output_dir: PathBuf,
}

fn one() -> usize {
    1
}

impl ExperimentConfig {
    /// Parse a JSON document. Schema errors name the offending field path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let config: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::config(path, e.into_inner().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        match (&self.synth, &self.ingest) {
            (Some(s), None) => s.validate()?,
            (None, Some(_)) => {}
            _ => return Err(Error::config("synth", "exactly one of `synth` and `ingest` is required")),
        }
        self.loss.validate()?;
        self.train.validate()?;
        if self.repeats == 0 {
            return Err(Error::config("repeats", "must be at least 1"));
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON rendering, minus the output directory.
    pub fn fingerprint(&self) -> String {
        let canonical = Self { output_dir: PathBuf::new(), ..self.clone() };
        let digest = Sha256::digest(canonical.to_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Train/val/test sets for repeat `k`.
fn load_splits(config: &ExperimentConfig, k: usize) -> Result<(Dataset, Dataset, Dataset)> {
    if let Some(synth) = &config.synth {
        let synth = SynthConfig { seed: synth.seed + k as u64, ..synth.clone() };
        let s = generate_dataset(&synth)?;
        return Ok((s.train, s.val, s.test));
    }
    let ingest = config.ingest.as_ref().expect("validated");
    let ds = load_dataset(&ingest.dir)?;
    split_by_tissue(&ds, &ingest.train_tissues, &ingest.val_tissues, &ingest.test_tissues)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentOutcome {
    pub reports: Vec<Report>,
    pub mean: f64,
    pub std: f64,
}

/// Run every repeat and write `seed_<k>/{report.csv, summary.json,
/// history.csv, model.bin}` and `aggregate.json` under the output directory.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let fingerprint = config.fingerprint();
    let out = &config.output_dir;
    let mut reports = Vec::with_capacity(config.repeats);
    for k in 0..config.repeats {
        let (train_set, val, test) = load_splits(config, k)?;
        let train_cfg = TrainConfig { seed: config.train.seed + k as u64, ..config.train.clone() };
        let mut init_rng = RngStream::new(train_cfg.seed, 0);
        let model = Mlp::init(train_set.dim(), train_cfg.hidden_dim, train_set.n_genes(), &mut init_rng)?;
        let val = train_cfg.early_stop_patience.map(|_| &val);
        let (model, history) = train(model, &train_set, &config.loss, &train_cfg, val)?;
        let mut report = evaluate(&model, &test)?;
        report.history = history.epochs;
        report.fingerprint = fingerprint.clone();
        let dir = out.join(format!("seed_{k}"));
        report.write(&dir, test.gene_names())?;
        model.save_checkpoint(&dir.join("model.bin"))?;
        reports.push(report);
    }
    let means: Vec<f64> = reports.iter().map(|r| r.mean_scc).collect();
    let (mean, std) = mean_std(&means);
    let aggregate = serde_json::json!({
        "repeats": config.repeats,
        "mean_scc": fmt_real(mean),
        "std_scc": fmt_real(std),
        "per_seed_mean_scc": means.iter().map(|v| fmt_real(*v)).collect::<Vec<_>>(),
        "config_fingerprint": fingerprint,
    });
    let path = out.join("aggregate.json");
    let body = serde_json::to_string_pretty(&aggregate).expect("json") + "\n";
    fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
    Ok(ExperimentOutcome { reports, mean, std })
}
