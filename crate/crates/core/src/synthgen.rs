//! One-dimensional negative-binomial data with per-tissue batch effects.
//!
//! Tissue `n` observes `e ~ NB(alpha_n * mu(x) + beta_n, r)` where
//! `mu(x) = a sin(cx) + b sin(dx) + a + b`. Held-out sets draw `x` uniformly on
//! `[0, 1]` and carry the noiseless `mu(x)` as their evaluation truth.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::sampling::{binomial_sample, nb_sample, RngStream};

const VAL_STREAM: u64 = 1;
const TEST_STREAM: u64 = 2;
const TISSUE_STREAM_BASE: u64 = 100;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanFnParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl MeanFnParams {
    /// The four mixed-frequency waveforms used for the benchmark tables.
    pub const PRESETS: [MeanFnParams; 4] = [
        MeanFnParams { a: 2.0, b: 1.0, c: 6.0, d: 20.0 },
        MeanFnParams { a: 1.0, b: 1.0, c: 3.0, d: 9.0 },
        MeanFnParams { a: 3.0, b: 0.5, c: 4.0, d: 25.0 },
        MeanFnParams { a: 1.5, b: 2.5, c: 8.0, d: 15.0 },
    ];

    pub fn validate(&self) -> Result<()> {
        if !(self.a >= 0.0 && self.b >= 0.0) {
            return Err(Error::config("mean_fn", "a and b must be non-negative"));
        }
        if ![self.a, self.b, self.c, self.d].iter().all(|v| v.is_finite()) {
            return Err(Error::config("mean_fn", "parameters must be finite"));
        }
        Ok(())
    }

    fn eval(&self, x: f64) -> f64 {
        self.a * (self.c * x).sin() + self.b * (self.d * x).sin() + self.a + self.b
    }
}

pub fn mean_function(x: f64, params: &MeanFnParams) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("x must lie in [0, 1], got {x}")));
    }
    Ok(params.eval(x).max(0.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TissueBatchParams {
    pub alpha: f64,
    pub beta: f64,
    /// Input range used in imbalanced mode.
    pub interval: [f64; 2],
}

impl TissueBatchParams {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta, interval: [0.0, 1.0] }
    }

    pub fn with_interval(mut self, lo: f64, hi: f64) -> Self {
        self.interval = [lo, hi];
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    Uniform,
    Imbalanced,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SynthConfig {
    pub mean_fn: MeanFnParams,
    pub tissues: Vec<TissueBatchParams>,
    pub dispersion: f64,
    pub n_train_per_tissue: usize,
    pub n_val: usize,
    pub n_test: usize,
    pub mode: SamplingMode,
    pub seed: u64,
}

impl Default for SynthConfig {
    /// Two tissues: (alpha, beta) = (1, 0) and (10, 10); the second is confined
    /// to `[0, 0.5]` in imbalanced mode.
    fn default() -> Self {
        Self {
            mean_fn: MeanFnParams::PRESETS[0],
            tissues: vec![
                TissueBatchParams::new(1.0, 0.0),
                TissueBatchParams::new(10.0, 10.0).with_interval(0.0, 0.5),
            ],
            dispersion: 2.0,
            n_train_per_tissue: 50_000,
            n_val: 10_000,
            n_test: 10_000,
            mode: SamplingMode::Uniform,
            seed: 0,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        self.mean_fn.validate()?;
        if self.tissues.is_empty() {
            return Err(Error::config("synth.tissues", "at least one tissue is required"));
        }
        for (k, t) in self.tissues.iter().enumerate() {
            let field = format!("synth.tissues[{k}]");
            if !(t.alpha > 0.0 && t.alpha.is_finite()) {
                return Err(Error::config(field, "alpha must be positive"));
            }
            if !(t.beta >= 0.0 && t.beta.is_finite()) {
                return Err(Error::config(field, "beta must be non-negative"));
            }
            let [lo, hi] = t.interval;
            if !(0.0 <= lo && lo < hi && hi <= 1.0) {
                return Err(Error::config(field, "interval must satisfy 0 <= lo < hi <= 1"));
            }
        }
        if !(self.dispersion > 0.0 && self.dispersion.is_finite()) {
            return Err(Error::config("synth.dispersion", "must be positive"));
        }
        for (name, n) in [
            ("synth.n_train_per_tissue", self.n_train_per_tissue),
            ("synth.n_val", self.n_val),
            ("synth.n_test", self.n_test),
        ] {
            if n == 0 {
                return Err(Error::config(name, "must be positive"));
            }
        }
        Ok(())
    }

    fn interval(&self, tissue: &TissueBatchParams) -> [f64; 2] {
        match self.mode {
            SamplingMode::Uniform => [0.0, 1.0],
            SamplingMode::Imbalanced => tissue.interval,
        }
    }
}

/// Draw `count` spots for one tissue: inputs from the tissue's interval and
/// counts from its batch-distorted NB.
pub fn generate_tissue(
    config: &SynthConfig,
    tissue_index: usize,
    count: usize,
    rng: &mut RngStream,
) -> Result<(Vec<f64>, Vec<u64>)> {
    let tissue = config.tissues.get(tissue_index).ok_or_else(|| {
        Error::Argument(format!(
            "tissue index {tissue_index} out of range for {} tissues",
            config.tissues.len()
        ))
    })?;
    let [lo, hi] = config.interval(tissue);
    let mut xs = Vec::with_capacity(count);
    let mut es = Vec::with_capacity(count);
    for _ in 0..count {
        let x = rng.uniform(lo, hi);
        let mean = tissue.alpha * mean_function(x, &config.mean_fn)? + tissue.beta;
        xs.push(x);
        es.push(nb_sample(mean, config.dispersion, rng)?);
    }
    Ok((xs, es))
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthSplits {
    pub train: Dataset,
    pub val: Dataset,
    pub test: Dataset,
}

pub fn generate_dataset(config: &SynthConfig) -> Result<SynthSplits> {
    config.validate()?;
    let total = config.n_train_per_tissue * config.tissues.len();
    let mut xs = Vec::with_capacity(total);
    let mut es = Vec::with_capacity(total);
    let mut ids = Vec::with_capacity(total);
    for t in 0..config.tissues.len() {
        let mut rng = RngStream::new(config.seed, TISSUE_STREAM_BASE + t as u64);
        let (x, e) = generate_tissue(config, t, config.n_train_per_tissue, &mut rng)?;
        xs.extend(x);
        es.extend(e);
        ids.extend(std::iter::repeat_n(t, config.n_train_per_tissue));
    }
    let provenance = format!(
        "synthetic nb: mean_fn={:?} dispersion={} mode={:?} seed={}",
        config.mean_fn, config.dispersion, config.mode, config.seed
    );
    let train = column_dataset(xs, es, ids)?.with_provenance(provenance.clone());
    let val = held_out(config, config.n_val, VAL_STREAM)?.with_provenance(provenance.clone());
    let test = held_out(config, config.n_test, TEST_STREAM)?.with_provenance(provenance);
    Ok(SynthSplits { train, val, test })
}

/// Uniform inputs, counts observed without batch distortion, truth `mu(x)`.
fn held_out(config: &SynthConfig, n: usize, stream: u64) -> Result<Dataset> {
    let mut rng = RngStream::new(config.seed, stream);
    let mut xs = Vec::with_capacity(n);
    let mut es = Vec::with_capacity(n);
    let mut mus = Vec::with_capacity(n);
    for _ in 0..n {
        let x = rng.uniform(0.0, 1.0);
        let mu = mean_function(x, &config.mean_fn)?;
        xs.push(x);
        mus.push(mu);
        es.push(nb_sample(mu, config.dispersion, &mut rng)?);
    }
    let truth = Array2::from_shape_vec((n, 1), mus).expect("column");
    column_dataset(xs, es, vec![0; n])?.with_truth(truth)
}

fn column_dataset(xs: Vec<f64>, es: Vec<u64>, tissue_ids: Vec<usize>) -> Result<Dataset> {
    let n = xs.len();
    let features = Array2::from_shape_vec((n, 1), xs).expect("column");
    let counts = Array2::from_shape_vec((n, 1), es).expect("column");
    Dataset::new(features, counts, tissue_ids)
}

/// Binomially thin every count with keep-probability `rate`.
pub fn downsample_counts(dataset: &Dataset, rate: f64, rng: &mut RngStream) -> Result<Dataset> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::Domain(format!("downsampling rate must lie in [0, 1], got {rate}")));
    }
    let mut counts = dataset.counts().clone();
    for c in counts.iter_mut() {
        *c = binomial_sample(*c, rate, rng)?;
    }
    dataset.with_counts(counts)
}
