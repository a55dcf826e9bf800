use ndarray::Axis;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::losses::{compute_loss, Grouping, LossSpec, Relations};
use crate::metrics::{evaluate, EpochRecord};
use crate::model::Mlp;
use crate::sampling::RngStream;

use super::{adamw_step, cosine_lr, group_for_loss, make_minibatches, BatchStrategy, OptimState};

const BATCH_STREAM: u64 = 10;
const GROUP_STREAM: u64 = 11;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub adam_eps: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub lr_min: f64,
    pub batch_strategy: BatchStrategy,
    pub early_stop_patience: Option<usize>,
    /// Width of the two hidden layers; 0 trains a single linear map.
    pub hidden_dim: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            weight_decay: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            adam_eps: 1e-8,
            epochs: 2000,
            batch_size: 256,
            lr_min: 0.0,
            batch_strategy: BatchStrategy::Default,
            early_stop_patience: None,
            hidden_dim: 128,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::config("train.learning_rate", "must be positive"));
        }
        if !(self.lr_min >= 0.0 && self.lr_min <= self.learning_rate) {
            return Err(Error::config("train.lr_min", "must lie in [0, learning_rate]"));
        }
        if !(0.0..1.0).contains(&self.beta1) {
            return Err(Error::config("train.beta1", "must lie in [0, 1)"));
        }
        if !(0.0..1.0).contains(&self.beta2) {
            return Err(Error::config("train.beta2", "must lie in [0, 1)"));
        }
        if !(self.adam_eps > 0.0) {
            return Err(Error::config("train.adam_eps", "must be positive"));
        }
        if !(self.weight_decay >= 0.0) {
            return Err(Error::config("train.weight_decay", "must be non-negative"));
        }
        if self.batch_size < 2 {
            return Err(Error::config("train.batch_size", "must be at least 2"));
        }
        if self.early_stop_patience == Some(0) {
            return Err(Error::config("train.early_stop_patience", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub epochs: Vec<EpochRecord>,
    /// Epoch whose parameters were returned, when early stopping tracked it.
    pub best_epoch: Option<usize>,
}

/// Train `model` on `dataset` with `loss`.
///
/// With a validation set and a patience, the mean validation SCC is tracked
/// after every epoch; training stops after `patience` epochs without
/// improvement and the best parameters are returned.
pub fn train(
    mut model: Mlp,
    dataset: &Dataset,
    loss: &LossSpec,
    config: &TrainConfig,
    val: Option<&Dataset>,
) -> Result<(Mlp, History)> {
    config.validate()?;
    loss.validate()?;
    if dataset.dim() != model.input_dim() || dataset.n_genes() != model.output_dim() {
        return Err(Error::Argument(format!(
            "model maps {} -> {}, dataset has {} features and {} genes",
            model.input_dim(),
            model.output_dim(),
            dataset.dim(),
            dataset.n_genes()
        )));
    }
    let mut history = History::default();
    if config.epochs == 0 {
        return Ok((model, history));
    }
    let mut batch_rng = RngStream::new(config.seed, BATCH_STREAM);
    let mut group_rng = RngStream::new(config.seed, GROUP_STREAM);
    let mut state = OptimState::new(&model);
    let features = dataset.features();
    let counts = dataset.counts();
    let libs = dataset.library_sizes();
    let tracking = val.zip(config.early_stop_patience);
    let mut best: Option<(f64, usize, Mlp)> = None;

    for epoch in 0..config.epochs {
        let lr = cosine_lr(epoch, config.epochs, config.learning_rate, config.lr_min)?;
        let batches =
            make_minibatches(dataset.tissue_ids(), config.batch_size, config.batch_strategy, &mut batch_rng);
        let mut loss_sum = 0.0;
        let mut n_batches = 0usize;
        for batch in &batches {
            let relations = group_for_loss(batch, dataset.tissue_ids(), loss, &mut group_rng)?;
            let relational = loss.kind.grouping() != Grouping::Pointwise
                && loss.kind.grouping() != Grouping::WholeBatch;
            if relational && relations_empty(&relations) {
                continue;
            }
            let x = features.select(Axis(0), batch);
            let e = counts.select(Axis(0), batch).mapv(|c| c as f64);
            let l: Vec<f64> = batch.iter().map(|&r| libs[r] as f64).collect();
            let (preds, cache) = model.forward(x.view())?;
            let out = compute_loss(loss, e.view(), preds.view(), &relations, &l)?;
            if !out.value.is_finite() {
                return Err(Error::Domain(format!(
                    "{} loss became non-finite at epoch {epoch}",
                    loss.kind.label()
                )));
            }
            let grads = model.backward(&cache, out.grad.view())?;
            adamw_step(&mut model, &grads, &mut state, lr, config)?;
            loss_sum += out.value;
            n_batches += 1;
        }
        let train_loss = if n_batches > 0 { loss_sum / n_batches as f64 } else { f64::NAN };
        let mut record = EpochRecord { epoch, lr, train_loss, val_scc: None };

        if let Some((val, patience)) = tracking {
            let scc = evaluate(&model, val)?.mean_scc;
            record.val_scc = Some(scc);
            history.epochs.push(record);
            let improved = best.as_ref().is_none_or(|(b, _, _)| scc > *b);
            if improved {
                best = Some((scc, epoch, model.clone()));
            } else if epoch - best.as_ref().map_or(0, |b| b.1) >= patience {
                break;
            }
        } else {
            history.epochs.push(record);
        }
    }

    if let Some((_, epoch, params)) = best {
        history.best_epoch = Some(epoch);
        model = params;
    }
    Ok((model, history))
}

fn relations_empty(relations: &Relations) -> bool {
    match relations {
        Relations::None => true,
        Relations::Pairs(p) => p.is_empty(),
        Relations::Groups(g) => g.is_empty(),
    }
}
