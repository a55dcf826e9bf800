//! Synthetic benchmark grids: loss comparison, list-size sweep, downsampling
//! sweep and batch-parameter sweep.
//!
//! Every grid is a list of independent [`Cell`]s. A cell generates its data,
//! trains one model and returns the test mean SCC. Cells are run on a rayon
//! pool and collected in grid order, so results do not depend on the worker
//! count.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::losses::{LossKind, LossSpec};
use crate::metrics::{evaluate, fmt_real};
use crate::model::Mlp;
use crate::optim::{train, TrainConfig};
use crate::sampling::RngStream;
use crate::synthgen::{downsample_counts, generate_dataset, MeanFnParams, SamplingMode, SynthConfig};

const INIT_STREAM: u64 = 0;
const DOWNSAMPLE_STREAM: u64 = 20;

/// Published loss-comparison means (uniform, imbalanced), for reference
/// columns only.
pub const PAPER_TABLE1: [(LossKind, f64, f64); 7] = [
    (LossKind::Mse, 0.748, 0.583),
    (LossKind::Poisson, 0.777, 0.603),
    (LossKind::Nb, 0.788, 0.601),
    (LossKind::Rank, 0.835, 0.738),
    (LossKind::PairStrank, 0.907, 0.818),
    (LossKind::Pcc, 0.858, 0.560),
    (LossKind::ListStrank, 0.945, 0.828),
];

/// Published list-size sweep (N^k, uniform, imbalanced).
pub const PAPER_NK: [(usize, f64, f64); 8] = [
    (2, 0.907, 0.818),
    (4, 0.938, 0.837),
    (8, 0.958, 0.839),
    (16, 0.943, 0.833),
    (32, 0.938, 0.818),
    (64, 0.926, 0.827),
    (128, 0.941, 0.845),
    (256, 0.945, 0.828),
];

pub const DEFAULT_NK: [usize; 8] = [2, 4, 8, 16, 32, 64, 128, 256];
pub const DEFAULT_RATES: [f64; 7] = [0.01, 0.05, 0.1, 0.2, 0.5, 0.8, 1.0];
pub const DOWNSAMPLE_LOSSES: [LossKind; 4] =
    [LossKind::Rank, LossKind::PairStrank, LossKind::Pcc, LossKind::ListStrank];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Preset {
    /// Full-size protocol: 50,000 spots per tissue, 2000 epochs.
    Paper,
    /// Reduced protocol: 5,000 spots per tissue, 50 epochs.
    Desk,
    /// Tiny protocol for smoke tests.
    Smoke,
}

impl std::str::FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(Preset::Paper),
            "desk" => Ok(Preset::Desk),
            "smoke" => Ok(Preset::Smoke),
            other => Err(Error::config("preset", format!("unknown preset `{other}`"))),
        }
    }
}

/// Everything a benchmark grid needs besides the grid axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchSettings {
    /// Data template; `mean_fn`, `mode` and `seed` are overwritten per cell.
    pub synth: SynthConfig,
    /// Training template; `seed` is overwritten per cell.
    pub train: TrainConfig,
    /// Mean functions averaged over.
    pub functions: Vec<MeanFnParams>,
    pub seeds: usize,
    pub base_seed: u64,
    pub workers: usize,
}

impl Preset {
    pub fn settings(self) -> BenchSettings {
        let (n_train, n_eval, epochs, seeds) = match self {
            Preset::Paper => (50_000, 10_000, 2000, 3),
            Preset::Desk => (5_000, 10_000, 50, 3),
            Preset::Smoke => (200, 200, 3, 1),
        };
        BenchSettings {
            synth: SynthConfig {
                n_train_per_tissue: n_train,
                n_val: n_eval,
                n_test: n_eval,
                ..SynthConfig::default()
            },
            train: TrainConfig { epochs, ..TrainConfig::default() },
            functions: MeanFnParams::PRESETS.to_vec(),
            seeds,
            base_seed: 0,
            workers: 1,
        }
    }
}

impl BenchSettings {
    pub fn with_seeds(mut self, seeds: usize) -> Self {
        self.seeds = seeds;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.synth.validate()?;
        self.train.validate()?;
        if self.functions.is_empty() {
            return Err(Error::config("functions", "at least one mean function is required"));
        }
        for f in &self.functions {
            f.validate()?;
        }
        if self.seeds == 0 {
            return Err(Error::config("seeds", "must be at least 1"));
        }
        Ok(())
    }

    fn seed(&self, k: usize) -> u64 {
        self.base_seed + k as u64
    }
}

/// One training run of the benchmark.
#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub synth: SynthConfig,
    pub loss: LossSpec,
    pub train: TrainConfig,
    /// Binomial thinning applied to the training counts.
    pub downsample: Option<f64>,
}

impl Cell {
    /// Cell for mean function `function` and seed index `seed`. Data, model
    /// init and batch order depend only on `(seed, function)`, so every loss
    /// sees the same draws.
    pub fn new(
        settings: &BenchSettings,
        function: usize,
        mode: SamplingMode,
        seed: usize,
        loss: LossSpec,
    ) -> Self {
        let seed = settings.seed(seed);
        let mut synth = settings.synth.clone();
        synth.mean_fn = settings.functions[function];
        synth.mode = mode;
        synth.seed = seed * 1000 + function as u64;
        let train = TrainConfig { seed: synth.seed, ..settings.train.clone() };
        Self { synth, loss, train, downsample: None }
    }

    /// Train and return the mean test SCC.
    pub fn run(&self) -> Result<f64> {
        let splits = generate_dataset(&self.synth)?;
        let train_set = match self.downsample {
            Some(rate) => {
                let mut rng = RngStream::new(self.synth.seed, DOWNSAMPLE_STREAM);
                downsample_counts(&splits.train, rate, &mut rng)?
            }
            None => splits.train,
        };
        let mut init_rng = RngStream::new(self.train.seed, INIT_STREAM);
        let model = Mlp::init(
            train_set.dim(),
            self.train.hidden_dim,
            train_set.n_genes(),
            &mut init_rng,
        )?;
        let val = self.train.early_stop_patience.map(|_| &splits.val);
        let (model, _) = train(model, &train_set, &self.loss, &self.train, val)?;
        Ok(evaluate(&model, &splits.test)?.mean_scc)
    }
}

/// Run cells on `workers` threads, preserving input order.
pub fn run_cells(cells: &[Cell], workers: usize) -> Result<Vec<f64>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Argument(format!("thread pool: {e}")))?;
    pool.install(|| cells.par_iter().map(Cell::run).collect())
}

/// Mean and sample standard deviation (0 for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// A grid of `(mode, seed, function)` cells for one loss, averaged over
/// functions per seed. Returns the per-seed averages.
fn seed_scores(settings: &BenchSettings, scores: &[f64]) -> Vec<f64> {
    let nf = settings.functions.len();
    scores.chunks(nf).map(|c| c.iter().sum::<f64>() / nf as f64).collect()
}

/// Cells for `loss` in `mode`, ordered seed-major then function.
fn loss_cells(settings: &BenchSettings, mode: SamplingMode, loss: LossSpec) -> Vec<Cell> {
    let mut cells = Vec::new();
    for s in 0..settings.seeds {
        for f in 0..settings.functions.len() {
            cells.push(Cell::new(settings, f, mode, s, loss));
        }
    }
    cells
}

/// Mean and std over seeds of the function-averaged SCC, for each
/// `(mode, loss)` block, evaluated in a single pool.
fn score_blocks(
    settings: &BenchSettings,
    blocks: &[(SamplingMode, LossSpec, Option<f64>)],
) -> Result<Vec<Summary>> {
    settings.validate()?;
    let per_block = settings.seeds * settings.functions.len();
    let cells: Vec<Cell> = blocks
        .iter()
        .flat_map(|&(mode, loss, rate)| {
            loss_cells(settings, mode, loss).into_iter().map(move |mut c| {
                c.downsample = rate;
                c
            })
        })
        .collect();
    let scores = run_cells(&cells, settings.workers)?;
    Ok(scores
        .chunks(per_block)
        .map(|block| {
            let per_seed = seed_scores(settings, block);
            let (mean, std) = mean_std(&per_seed);
            Summary { mean, std, per_seed }
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub per_seed: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub loss: LossKind,
    pub uniform: Summary,
    pub imbalanced: Summary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table1 {
    pub rows: Vec<Table1Row>,
}

impl Table1 {
    pub fn row(&self, loss: LossKind) -> Option<&Table1Row> {
        self.rows.iter().find(|r| r.loss == loss)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "loss,uniform_scc,uniform_std,imbalanced_scc,imbalanced_std,paper_uniform,paper_imbalanced\n",
        );
        for r in &self.rows {
            let (pu, pi) = PAPER_TABLE1
                .iter()
                .find(|p| p.0 == r.loss)
                .map_or((f64::NAN, f64::NAN), |p| (p.1, p.2));
            out.push_str(&format!(
                "{},{},{},{},{},{:.3},{:.3}\n",
                r.loss.label(),
                fmt_real(r.uniform.mean),
                fmt_real(r.uniform.std),
                fmt_real(r.imbalanced.mean),
                fmt_real(r.imbalanced.std),
                pu,
                pi
            ));
        }
        out
    }
}

/// All seven losses in both sampling modes.
pub fn reproduce_table1(settings: &BenchSettings) -> Result<Table1> {
    reproduce_table1_with(settings, &LossKind::ALL.map(LossSpec::new))
}

/// Loss table for a custom list of loss specs.
pub fn reproduce_table1_with(settings: &BenchSettings, losses: &[LossSpec]) -> Result<Table1> {
    let blocks: Vec<_> = losses
        .iter()
        .flat_map(|&l| [(SamplingMode::Uniform, l, None), (SamplingMode::Imbalanced, l, None)])
        .collect();
    let summaries = score_blocks(settings, &blocks)?;
    let rows = losses
        .iter()
        .zip(summaries.chunks(2))
        .map(|(l, s)| Table1Row { loss: l.kind, uniform: s[0].clone(), imbalanced: s[1].clone() })
        .collect();
    Ok(Table1 { rows })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NkRow {
    pub list_size: usize,
    pub uniform: Option<Summary>,
    pub imbalanced: Option<Summary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NkTable {
    pub rows: Vec<NkRow>,
}

impl NkTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "nk,uniform_scc,uniform_std,imbalanced_scc,imbalanced_std,paper_uniform,paper_imbalanced\n",
        );
        let cell = |s: &Option<Summary>| match s {
            Some(s) => (fmt_real(s.mean), fmt_real(s.std)),
            None => (String::new(), String::new()),
        };
        for r in &self.rows {
            let (um, us) = cell(&r.uniform);
            let (im, is) = cell(&r.imbalanced);
            let (pu, pi) = PAPER_NK
                .iter()
                .find(|p| p.0 == r.list_size)
                .map_or((String::new(), String::new()), |p| {
                    (format!("{:.3}", p.1), format!("{:.3}", p.2))
                });
            out.push_str(&format!("{},{um},{us},{im},{is},{pu},{pi}\n", r.list_size));
        }
        out
    }
}

/// ListSTRank for each list size, in the requested modes.
pub fn sweep_nk(settings: &BenchSettings, values: &[usize], modes: &[SamplingMode]) -> Result<NkTable> {
    if let Some(v) = values.iter().find(|&&v| v < 2) {
        return Err(Error::config("nk", format!("list sizes must be at least 2, got {v}")));
    }
    let blocks: Vec<_> = values
        .iter()
        .flat_map(|&k| {
            let spec = LossSpec::new(LossKind::ListStrank).with_list_size(k);
            modes.iter().map(move |&m| (m, spec, None))
        })
        .collect();
    let summaries = score_blocks(settings, &blocks)?;
    let rows = values
        .iter()
        .zip(summaries.chunks(modes.len().max(1)))
        .map(|(&k, s)| {
            let pick = |mode| modes.iter().position(|&m| m == mode).map(|i| s[i].clone());
            NkRow {
                list_size: k,
                uniform: pick(SamplingMode::Uniform),
                imbalanced: pick(SamplingMode::Imbalanced),
            }
        })
        .collect();
    Ok(NkTable { rows })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DownsampleRow {
    pub rate: f64,
    pub loss: LossKind,
    pub summary: Summary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DownsampleTable {
    pub mode: SamplingMode,
    pub rows: Vec<DownsampleRow>,
}

impl DownsampleTable {
    pub fn get(&self, rate: f64, loss: LossKind) -> Option<&Summary> {
        self.rows
            .iter()
            .find(|r| r.rate == rate && r.loss == loss)
            .map(|r| &r.summary)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("setting,rate,loss,mean_scc,std_scc\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                mode_label(self.mode),
                r.rate,
                r.loss.label(),
                fmt_real(r.summary.mean),
                fmt_real(r.summary.std)
            ));
        }
        out
    }
}

/// Train each loss on binomially thinned training counts in one sampling
/// setting. Test targets stay noiseless.
pub fn sweep_downsample(
    settings: &BenchSettings,
    rates: &[f64],
    losses: &[LossKind],
    mode: SamplingMode,
) -> Result<DownsampleTable> {
    if let Some(r) = rates.iter().find(|r| !(0.0..=1.0).contains(*r)) {
        return Err(Error::config("rates", format!("rates must lie in [0, 1], got {r}")));
    }
    let mut keys = Vec::new();
    let mut blocks = Vec::new();
    for &rate in rates {
        for &loss in losses {
            keys.push((rate, loss));
            blocks.push((mode, LossSpec::new(loss), Some(rate)));
        }
    }
    let summaries = score_blocks(settings, &blocks)?;
    Ok(DownsampleTable {
        mode,
        rows: keys
            .into_iter()
            .zip(summaries)
            .map(|((rate, loss), summary)| DownsampleRow { rate, loss, summary })
            .collect(),
    })
}

/// Batch parameter varied by [`sweep_params`]; all but dispersion act on the
/// second tissue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Alpha2,
    Beta2,
    Dispersion,
}

impl SweepParam {
    pub fn label(self) -> &'static str {
        match self {
            SweepParam::Alpha2 => "alpha2",
            SweepParam::Beta2 => "beta2",
            SweepParam::Dispersion => "dispersion",
        }
    }

    fn apply(self, synth: &mut SynthConfig, value: f64) {
        match self {
            SweepParam::Alpha2 => synth.tissues[1].alpha = value,
            SweepParam::Beta2 => synth.tissues[1].beta = value,
            SweepParam::Dispersion => synth.dispersion = value,
        }
    }

    /// Default grid; each includes the value used by the loss table.
    pub fn default_values(self) -> Vec<f64> {
        match self {
            SweepParam::Alpha2 => vec![1.0, 2.0, 5.0, 10.0, 20.0],
            SweepParam::Beta2 => vec![0.0, 5.0, 10.0, 20.0],
            SweepParam::Dispersion => vec![0.5, 2.0, 10.0, 100.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamRow {
    pub param: SweepParam,
    pub value: f64,
    pub mode: SamplingMode,
    pub loss: LossKind,
    pub summary: Summary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamTable {
    pub rows: Vec<ParamRow>,
}

impl ParamTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("param,value,setting,loss,mean_scc,std_scc\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.param.label(),
                r.value,
                mode_label(r.mode),
                r.loss.label(),
                fmt_real(r.summary.mean),
                fmt_real(r.summary.std)
            ));
        }
        out
    }
}

/// Loss-table runs at each grid point of the batch parameters.
pub fn sweep_params(
    settings: &BenchSettings,
    grid: &[(SweepParam, Vec<f64>)],
    modes: &[SamplingMode],
    losses: &[LossKind],
) -> Result<ParamTable> {
    if settings.synth.tissues.len() < 2 {
        return Err(Error::config("synth.tissues", "parameter sweeps need two tissues"));
    }
    let mut rows = Vec::new();
    for (param, values) in grid {
        for &value in values {
            let positive = match param {
                SweepParam::Beta2 => value >= 0.0,
                _ => value > 0.0,
            };
            if !positive || !value.is_finite() {
                return Err(Error::config(param.label(), format!("invalid value {value}")));
            }
            let mut point = settings.clone();
            param.apply(&mut point.synth, value);
            let blocks: Vec<_> = losses
                .iter()
                .flat_map(|&l| modes.iter().map(move |&m| (m, LossSpec::new(l), None)))
                .collect();
            let summaries = score_blocks(&point, &blocks)?;
            let mut it = summaries.into_iter();
            for &loss in losses {
                for &mode in modes {
                    let summary = it.next().expect("one summary per block");
                    rows.push(ParamRow { param: *param, value, mode, loss, summary });
                }
            }
        }
    }
    Ok(ParamTable { rows })
}

pub fn mode_label(mode: SamplingMode) -> &'static str {
    match mode {
        SamplingMode::Uniform => "uniform",
        SamplingMode::Imbalanced => "imbalanced",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> BenchSettings {
        let mut s = Preset::Smoke.settings();
        s.functions.truncate(2);
        s.synth.n_train_per_tissue = 64;
        s.synth.n_test = 64;
        s.train.epochs = 2;
        s.train.batch_size = 32;
        s.train.hidden_dim = 8;
        s
    }

    #[test]
    fn table_schema_and_paper_columns() {
        let t = reproduce_table1(&tiny()).unwrap();
        let csv = t.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 8);
        assert!(lines[0].starts_with("loss,uniform_scc"));
        assert!(lines[7].starts_with("ListSTRank,") && lines[7].ends_with(",0.945,0.828"));
        assert!(lines[1].ends_with(",0.748,0.583"));
    }

    #[test]
    fn one_worker_equals_two() {
        let a = reproduce_table1_with(&tiny(), &[LossSpec::new(LossKind::PairStrank)]).unwrap();
        let b = reproduce_table1_with(&tiny().with_workers(2), &[LossSpec::new(LossKind::PairStrank)])
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn full_rate_equals_no_thinning() {
        let s = tiny();
        let base = Cell::new(&s, 0, SamplingMode::Uniform, 0, LossSpec::new(LossKind::Rank));
        let thinned = Cell { downsample: Some(1.0), ..base.clone() };
        assert_eq!(base.run().unwrap(), thinned.run().unwrap());
    }

    #[test]
    fn nk_rejects_small_lists() {
        assert!(sweep_nk(&tiny(), &[1], &[SamplingMode::Uniform]).is_err());
        assert!(sweep_downsample(&tiny(), &[1.5], &[LossKind::Rank], SamplingMode::Uniform).is_err());
    }

    #[test]
    fn mean_std_basics() {
        assert_eq!(mean_std(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - 2f64.sqrt()).abs() < 1e-15);
    }
}
