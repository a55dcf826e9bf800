//! Spearman correlation and evaluation reports.

use std::fs;
use std::path::Path;

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::model::Mlp;

/// Ranks starting at 1; tied values share the mean of their rank range.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &k in &order[start..end] {
            ranks[k] = rank;
        }
        start = end;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        return f64::NAN;
    }
    (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)
}

/// Pearson correlation of average ranks. NaN when either input is constant.
pub fn spearman(pred: &[f64], target: &[f64]) -> Result<f64> {
    if pred.len() != target.len() {
        return Err(Error::Argument(format!(
            "spearman inputs differ in length: {} vs {}",
            pred.len(),
            target.len()
        )));
    }
    if pred.len() < 2 {
        return Err(Error::Argument("spearman needs at least 2 observations".into()));
    }
    Ok(pearson(&average_ranks(pred), &average_ranks(target)))
}

/// Per-gene Spearman between prediction and target columns.
pub fn per_gene_spearman(preds: ArrayView2<f64>, targets: ArrayView2<f64>) -> Result<Vec<f64>> {
    if preds.dim() != targets.dim() {
        return Err(Error::Argument(format!(
            "prediction shape {:?} differs from target shape {:?}",
            preds.dim(),
            targets.dim()
        )));
    }
    (0..preds.ncols())
        .map(|g| {
            let p: Vec<f64> = preds.column(g).to_vec();
            let t: Vec<f64> = targets.column(g).to_vec();
            spearman(&p, &t)
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub lr: f64,
    pub train_loss: f64,
    pub val_scc: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub per_gene_scc: Vec<f64>,
    pub mean_scc: f64,
    /// Genes whose SCC is undefined (a constant column).
    pub nan_count: usize,
    pub history: Vec<EpochRecord>,
    pub fingerprint: String,
}

impl Report {
    pub fn from_scores(per_gene_scc: Vec<f64>) -> Self {
        let finite: Vec<f64> = per_gene_scc.iter().copied().filter(|v| v.is_finite()).collect();
        let mean_scc = if finite.is_empty() {
            f64::NAN
        } else {
            finite.iter().sum::<f64>() / finite.len() as f64
        };
        Self {
            nan_count: per_gene_scc.len() - finite.len(),
            per_gene_scc,
            mean_scc,
            ..Self::default()
        }
    }

    /// `report.csv` body: header `gene,scc`, one row per gene.
    pub fn to_csv(&self, gene_names: Option<&[String]>) -> String {
        let mut out = String::from("gene,scc\n");
        for (g, v) in self.per_gene_scc.iter().enumerate() {
            let name = gene_names.map_or_else(|| format!("g{g}"), |n| n[g].clone());
            out.push_str(&format!("{name},{}\n", fmt_real(*v)));
        }
        out
    }

    pub fn summary_json(&self) -> String {
        let summary = serde_json::json!({
            "mean_scc": finite_or_null(self.mean_scc),
            "nan_count": self.nan_count,
            "config_fingerprint": self.fingerprint,
        });
        let mut s = serde_json::to_string_pretty(&summary).expect("json");
        s.push('\n');
        s
    }

    pub fn history_csv(&self) -> String {
        let mut out = String::from("epoch,lr,train_loss,val_scc\n");
        for h in &self.history {
            let val = h.val_scc.map(fmt_real).unwrap_or_default();
            out.push_str(&format!("{},{},{},{val}\n", h.epoch, fmt_real(h.lr), fmt_real(h.train_loss)));
        }
        out
    }

    /// Write `report.csv`, `summary.json` and `history.csv` into `dir`.
    pub fn write(&self, dir: &Path, gene_names: Option<&[String]>) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        for (name, body) in [
            ("report.csv", self.to_csv(gene_names)),
            ("summary.json", self.summary_json()),
            ("history.csv", self.history_csv()),
        ] {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        }
        Ok(())
    }
}

fn finite_or_null(v: f64) -> serde_json::Value {
    if v.is_finite() {
        serde_json::json!(v)
    } else {
        serde_json::Value::Null
    }
}

/// Fixed-precision formatting for report files.
pub fn fmt_real(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:.6}")
    }
}

/// Score a model on a dataset: against its noiseless truth if it has one,
/// otherwise against the observed counts.
pub fn evaluate(model: &Mlp, dataset: &Dataset) -> Result<Report> {
    let preds = model.predict(dataset.features().view())?;
    let targets = dataset.targets();
    if targets.ncols() != model.output_dim() {
        return Err(Error::Argument(format!(
            "model predicts {} genes, dataset has {}",
            model.output_dim(),
            targets.ncols()
        )));
    }
    Ok(Report::from_scores(per_gene_spearman(preds.view(), targets.view())?))
}
