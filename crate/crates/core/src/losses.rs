//! Loss functions over a batch of predictions, each returning its value and
//! the exact gradient with respect to the predictions.
//!
//! Shapes: `counts` and `preds` are `batch x n_genes`. Relational losses take
//! index pairs or groups into the batch rows.
//!
//! The two count-likelihood ranking losses share one idea. Given spots that
//! come from the same tissue, condition on their total count per gene; the
//! split of that total across the spots is binomial (two spots) or
//! multinomial (a list), with cell probabilities given by a softmax over the
//! predicted rank scores. The loss is the negative log-likelihood of the
//! observed split without the combinatorial constant, so for a single gene
//! and list
//!
//! ```text
//! L = -sum_i e_i log p_i,   p_i = exp(s_i) / sum_j exp(s_j)
//! dL/ds_i = -(e_i - T p_i),  T = sum_i e_i
//! ```
//!
//! Because only within-tissue ratios enter, a tissue-wide rescaling of the
//! counts (a batch effect) does not change which scores are optimal.

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};

/// Logits are clamped to this range before the exponential link.
pub const LINK_CLAMP: f64 = 30.0;

/// Variance below which a PCC column is treated as constant.
pub const PCC_MIN_VARIANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    Mse,
    Poisson,
    Nb,
    Rank,
    PairStrank,
    Pcc,
    ListStrank,
}

impl LossKind {
    pub const ALL: [LossKind; 7] = [
        LossKind::Mse,
        LossKind::Poisson,
        LossKind::Nb,
        LossKind::Rank,
        LossKind::PairStrank,
        LossKind::Pcc,
        LossKind::ListStrank,
    ];

    /// Short display label, as used in result tables.
    pub fn label(self) -> &'static str {
        match self {
            LossKind::Mse => "MSE",
            LossKind::Poisson => "Poisson",
            LossKind::Nb => "NB",
            LossKind::Rank => "Rank",
            LossKind::PairStrank => "PairSTRank",
            LossKind::Pcc => "PCC",
            LossKind::ListStrank => "ListSTRank",
        }
    }

    pub fn grouping(self) -> Grouping {
        match self {
            LossKind::Mse | LossKind::Poisson | LossKind::Nb => Grouping::Pointwise,
            LossKind::Rank | LossKind::PairStrank => Grouping::Pairs,
            LossKind::Pcc => Grouping::WholeBatch,
            LossKind::ListStrank => Grouping::Lists,
        }
    }
}

impl std::str::FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        LossKind::ALL
            .into_iter()
            .find(|k| k.label().eq_ignore_ascii_case(s) || serde_plain_name(*k) == s)
            .ok_or_else(|| Error::config("loss.kind", format!("unknown loss `{s}`")))
    }
}

fn serde_plain_name(kind: LossKind) -> String {
    serde_json::to_value(kind)
        .ok()
        .and_then(|v| v.as_str().map(str::to_owned))
        .unwrap_or_default()
}

/// How a loss consumes a batch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Grouping {
    Pointwise,
    Pairs,
    Lists,
    WholeBatch,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Link {
    #[default]
    Exp,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LossSpec {
    pub kind: LossKind,
    /// Hinge margin for `Rank`.
    #[serde(default = "defaults::margin")]
    pub margin: f64,
    /// Fixed NB dispersion for `Nb`.
    #[serde(default = "defaults::dispersion")]
    pub nb_dispersion: f64,
    /// List length for `ListStrank`.
    #[serde(default = "defaults::list_size")]
    pub list_size: usize,
    /// Weight each spot's softmax term by its library size (`ListStrank`).
    #[serde(default)]
    pub size_correction: bool,
    #[serde(default)]
    pub link: Link,
}

mod defaults {
    pub fn margin() -> f64 {
        1.0
    }
    pub fn dispersion() -> f64 {
        2.0
    }
    pub fn list_size() -> usize {
        256
    }
}

impl LossSpec {
    pub fn new(kind: LossKind) -> Self {
        Self {
            kind,
            margin: defaults::margin(),
            nb_dispersion: defaults::dispersion(),
            list_size: defaults::list_size(),
            size_correction: false,
            link: Link::Exp,
        }
    }

    pub fn with_list_size(mut self, list_size: usize) -> Self {
        self.list_size = list_size;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.margin >= 0.0 && self.margin.is_finite()) {
            return Err(Error::config("loss.margin", "must be a non-negative number"));
        }
        if !(self.nb_dispersion > 0.0 && self.nb_dispersion.is_finite()) {
            return Err(Error::config("loss.nb_dispersion", "must be positive"));
        }
        if self.list_size < 2 {
            return Err(Error::config("loss.list_size", "must be at least 2"));
        }
        Ok(())
    }
}

/// Index structure a relational loss is evaluated on.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum Relations {
    #[default]
    None,
    Pairs(Vec<(usize, usize)>),
    Groups(Vec<Vec<usize>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct LossOutput {
    pub value: f64,
    pub grad: Array2<f64>,
}

fn check_shapes(counts: &ArrayView2<f64>, preds: &ArrayView2<f64>) -> Result<()> {
    if counts.dim() != preds.dim() {
        return Err(Error::Argument(format!(
            "counts shape {:?} differs from predictions shape {:?}",
            counts.dim(),
            preds.dim()
        )));
    }
    Ok(())
}

fn check_index(i: usize, batch: usize) -> Result<()> {
    if i >= batch {
        return Err(Error::Argument(format!("index {i} outside batch of {batch}")));
    }
    Ok(())
}

/// Evaluate `spec` on a batch. `library_sizes` (one per batch row) is only
/// read by size-corrected ListSTRank.
pub fn compute_loss(
    spec: &LossSpec,
    counts: ArrayView2<f64>,
    preds: ArrayView2<f64>,
    relations: &Relations,
    library_sizes: &[f64],
) -> Result<LossOutput> {
    let empty = || LossOutput { value: 0.0, grad: Array2::zeros(preds.dim()) };
    match (spec.kind, relations) {
        (LossKind::Mse, _) => mse_loss(counts, preds),
        (LossKind::Poisson, _) => poisson_loss(counts, preds),
        (LossKind::Nb, _) => nb_loss(counts, preds, spec.nb_dispersion),
        (LossKind::Pcc, _) => pcc_loss(counts, preds),
        (LossKind::Rank, Relations::Pairs(p)) => rank_loss(counts, preds, p, spec.margin),
        (LossKind::PairStrank, Relations::Pairs(p)) => pair_strank_loss(counts, preds, p),
        (LossKind::ListStrank, Relations::Groups(g)) => {
            let sizes = spec.size_correction.then_some(library_sizes);
            list_strank_loss(counts, preds, g, sizes)
        }
        (LossKind::Rank | LossKind::PairStrank | LossKind::ListStrank, Relations::None) => {
            check_shapes(&counts, &preds)?;
            Ok(empty())
        }
        (kind, rel) => Err(Error::Argument(format!(
            "{} cannot be evaluated on {rel:?}",
            kind.label()
        ))),
    }
}

/// `mean_i (1/G) ||e_i - r_i||^2`.
pub fn mse_loss(counts: ArrayView2<f64>, preds: ArrayView2<f64>) -> Result<LossOutput> {
    check_shapes(&counts, &preds)?;
    let n = preds.len().max(1) as f64;
    let diff = &preds - &counts;
    let value = diff.iter().map(|d| d * d).sum::<f64>() / n;
    Ok(LossOutput { value, grad: diff * (2.0 / n) })
}

fn clamp_logit(r: f64) -> (f64, f64) {
    if r.abs() <= LINK_CLAMP {
        (r, 1.0)
    } else {
        (r.clamp(-LINK_CLAMP, LINK_CLAMP), 0.0)
    }
}

/// Poisson NLL with log link, `lambda - e log lambda`, averaged over entries.
pub fn poisson_loss(counts: ArrayView2<f64>, preds: ArrayView2<f64>) -> Result<LossOutput> {
    check_shapes(&counts, &preds)?;
    let n = preds.len().max(1) as f64;
    let mut grad = Array2::zeros(preds.dim());
    let mut value = 0.0;
    for ((g, &r), &e) in grad.iter_mut().zip(preds.iter()).zip(counts.iter()) {
        let (s, live) = clamp_logit(r);
        let lambda = s.exp();
        value += lambda - e * s;
        *g = live * (lambda - e) / n;
    }
    Ok(LossOutput { value: value / n, grad })
}

/// Negative binomial NLL with log link for the mean and fixed dispersion.
pub fn nb_loss(counts: ArrayView2<f64>, preds: ArrayView2<f64>, dispersion: f64) -> Result<LossOutput> {
    check_shapes(&counts, &preds)?;
    if !(dispersion > 0.0 && dispersion.is_finite()) {
        return Err(Error::Domain(format!("nb dispersion must be positive, got {dispersion}")));
    }
    let r = dispersion;
    let ln_r = r.ln();
    let n = preds.len().max(1) as f64;
    let mut grad = Array2::zeros(preds.dim());
    let mut value = 0.0;
    for ((g, &pred), &e) in grad.iter_mut().zip(preds.iter()).zip(counts.iter()) {
        let (s, live) = clamp_logit(pred);
        let mu = s.exp();
        let ln_r_mu = log_add_exp(ln_r, s);
        let ll = ln_gamma(e + r) - ln_gamma(r) - ln_gamma(e + 1.0)
            + r * (ln_r - ln_r_mu)
            + e * (s - ln_r_mu);
        value -= ll;
        *g = live * r * (mu - e) / (r + mu) / n;
    }
    Ok(LossOutput { value: value / n, grad })
}

fn log_add_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    m + (-(a - b).abs()).exp().ln_1p()
}

/// Pairwise hinge. Each pair and gene is oriented so the first spot has the
/// larger count, then charged `max(0, s_lo - s_hi + margin)`. Ties are
/// skipped; the value is the mean over oriented terms.
pub fn rank_loss(
    counts: ArrayView2<f64>,
    preds: ArrayView2<f64>,
    pairs: &[(usize, usize)],
    margin: f64,
) -> Result<LossOutput> {
    check_shapes(&counts, &preds)?;
    let (batch, genes) = preds.dim();
    let mut grad = Array2::zeros(preds.dim());
    let mut total = 0.0;
    let mut terms = 0usize;
    let mut active = Vec::new();
    for &(i, j) in pairs {
        check_index(i, batch)?;
        check_index(j, batch)?;
        for g in 0..genes {
            let (hi, lo) = match counts[[i, g]].partial_cmp(&counts[[j, g]]) {
                Some(std::cmp::Ordering::Greater) => (i, j),
                Some(std::cmp::Ordering::Less) => (j, i),
                _ => continue,
            };
            terms += 1;
            let h = preds[[lo, g]] - preds[[hi, g]] + margin;
            if h > 0.0 {
                total += h;
                active.push((hi, lo, g));
            }
        }
    }
    if terms == 0 {
        return Ok(LossOutput { value: 0.0, grad });
    }
    let w = 1.0 / terms as f64;
    for (hi, lo, g) in active {
        grad[[lo, g]] += w;
        grad[[hi, g]] -= w;
    }
    Ok(LossOutput { value: total * w, grad })
}

/// Binomial count-split loss over pairs, averaged over pairs.
pub fn pair_strank_loss(
    counts: ArrayView2<f64>,
    preds: ArrayView2<f64>,
    pairs: &[(usize, usize)],
) -> Result<LossOutput> {
    check_shapes(&counts, &preds)?;
    let (batch, genes) = preds.dim();
    let mut grad = Array2::zeros(preds.dim());
    if pairs.is_empty() {
        return Ok(LossOutput { value: 0.0, grad });
    }
    let norm = 1.0 / pairs.len() as f64;
    let mut value = 0.0;
    for &(i, j) in pairs {
        check_index(i, batch)?;
        check_index(j, batch)?;
        for g in 0..genes {
            let (ei, ej) = (counts[[i, g]], counts[[j, g]]);
            let t = ei + ej;
            if t == 0.0 {
                continue;
            }
            let (si, sj) = (preds[[i, g]], preds[[j, g]]);
            // -log p_i = softplus(s_j - s_i), written in its overflow-free form.
            let nll_i = softplus(sj - si);
            let nll_j = softplus(si - sj);
            value += ei * nll_i + ej * nll_j;
            let pi = sigmoid(si - sj);
            let pj = sigmoid(sj - si);
            grad[[i, g]] -= (ei - t * pi) * norm;
            grad[[j, g]] -= (ej - t * pj) * norm;
        }
    }
    Ok(LossOutput { value: value * norm, grad })
}

/// `log(1 + exp(x))` without overflow or cancellation.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `1 - Pearson(pred, target)` per gene over the whole batch, averaged over
/// genes. Constant columns contribute 1 with zero gradient.
pub fn pcc_loss(counts: ArrayView2<f64>, preds: ArrayView2<f64>) -> Result<LossOutput> {
    check_shapes(&counts, &preds)?;
    let (batch, genes) = preds.dim();
    if batch < 2 {
        return Err(Error::Argument(format!("PCC needs a batch of at least 2, got {batch}")));
    }
    let mut grad = Array2::zeros(preds.dim());
    let mut value = 0.0;
    let nb = batch as f64;
    let ng = genes.max(1) as f64;
    for g in 0..genes {
        let p = preds.column(g);
        let y = counts.column(g);
        let pm = p.sum() / nb;
        let ym = y.sum() / nb;
        let a: Vec<f64> = p.iter().map(|v| v - pm).collect();
        let b: Vec<f64> = y.iter().map(|v| v - ym).collect();
        let saa: f64 = a.iter().map(|v| v * v).sum();
        let sbb: f64 = b.iter().map(|v| v * v).sum();
        if saa / nb < PCC_MIN_VARIANCE || sbb / nb < PCC_MIN_VARIANCE {
            value += 1.0;
            continue;
        }
        let sab: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        let (na, nbb) = (saa.sqrt(), sbb.sqrt());
        let rho = sab / (na * nbb);
        value += 1.0 - rho;
        for k in 0..batch {
            let drho = b[k] / (na * nbb) - rho * a[k] / saa;
            grad[[k, g]] = -drho / ng;
        }
    }
    Ok(LossOutput { value: value / ng, grad })
}

/// Multinomial count-split loss over same-tissue lists, summed over genes
/// and lists and divided by the number of lists.
///
/// With `library_sizes`, member `i`'s softmax weight is `exp(s_i) l_i`; members
/// with `l_i = 0` are left out of the normalization.
pub fn list_strank_loss(
    counts: ArrayView2<f64>,
    preds: ArrayView2<f64>,
    groups: &[Vec<usize>],
    library_sizes: Option<&[f64]>,
) -> Result<LossOutput> {
    check_shapes(&counts, &preds)?;
    let (batch, genes) = preds.dim();
    if let Some(l) = library_sizes {
        if l.len() != batch {
            return Err(Error::Argument(format!(
                "{} library sizes for a batch of {batch}",
                l.len()
            )));
        }
    }
    let mut grad = Array2::zeros(preds.dim());
    if groups.is_empty() {
        return Ok(LossOutput { value: 0.0, grad });
    }
    let norm = 1.0 / groups.len() as f64;
    let mut value = 0.0;
    let mut logits = Vec::new();
    for group in groups {
        if group.len() < 2 {
            return Err(Error::Argument(format!(
                "list of size {} (lists need at least 2 members)",
                group.len()
            )));
        }
        for &i in group {
            check_index(i, batch)?;
        }
        let members: Vec<(usize, f64)> = match library_sizes {
            None => group.iter().map(|&i| (i, 0.0)).collect(),
            Some(l) => group
                .iter()
                .filter(|&&i| l[i] > 0.0)
                .map(|&i| (i, l[i].ln()))
                .collect(),
        };
        if members.is_empty() {
            continue;
        }
        for g in 0..genes {
            let total: f64 = members.iter().map(|&(i, _)| counts[[i, g]]).sum();
            if total == 0.0 {
                continue;
            }
            logits.clear();
            logits.extend(members.iter().map(|&(i, offset)| preds[[i, g]] + offset));
            let lse = log_sum_exp(&logits);
            for (&(i, _), &z) in members.iter().zip(&logits) {
                let e = counts[[i, g]];
                let log_p = z - lse;
                value -= e * log_p;
                grad[[i, g]] -= (e - total * log_p.exp()) * norm;
            }
        }
    }
    Ok(LossOutput { value: value * norm, grad })
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn mse_examples() {
        let e = array![[1.0, 0.0]];
        let out = mse_loss(e.view(), array![[0.0, 0.0]].view()).unwrap();
        assert_eq!(out.value, 0.5);
        let same = mse_loss(e.view(), e.view()).unwrap();
        assert_eq!(same.value, 0.0);
        assert!(same.grad.iter().all(|&g| g == 0.0));
        assert!(mse_loss(e.view(), array![[0.0]].view()).is_err());
    }

    #[test]
    fn poisson_examples() {
        let e = array![[3.0, 7.0], [1.0, 12.0]];
        let at_min = poisson_loss(e.view(), e.mapv(f64::ln).view()).unwrap();
        assert!(at_min.grad.iter().all(|g| g.abs() < 1e-15));
        let one = poisson_loss(array![[0.0]].view(), array![[0.0]].view()).unwrap();
        assert_eq!(one.value, 1.0);
    }

    #[test]
    fn nb_stationary_and_domain() {
        let e = array![[3.0, 7.0], [1.0, 12.0]];
        let out = nb_loss(e.view(), e.mapv(f64::ln).view(), 2.0).unwrap();
        assert!(out.grad.iter().all(|g| g.abs() < 1e-14));
        assert!(nb_loss(e.view(), e.view(), 0.0).is_err());
    }

    #[test]
    fn nb_approaches_poisson_gradient() {
        let e = array![[3.0, 0.0, 5.0], [1.0, 12.0, 2.0]];
        let r = array![[0.3, -1.0, 2.0], [1.1, 2.2, 0.0]];
        let nb = nb_loss(e.view(), r.view(), 1e6).unwrap();
        let po = poisson_loss(e.view(), r.view()).unwrap();
        for (a, b) in nb.grad.iter().zip(po.grad.iter()) {
            assert!(close(*a, *b, 1e-3));
        }
    }

    #[test]
    fn rank_examples() {
        let e = array![[5.0], [2.0]];
        let sep = rank_loss(e.view(), array![[3.0], [1.0]].view(), &[(0, 1)], 1.0).unwrap();
        assert_eq!(sep.value, 0.0);
        let flat = rank_loss(e.view(), array![[0.5], [0.5]].view(), &[(1, 0)], 0.7).unwrap();
        assert!(close(flat.value, 0.7, 1e-15));
        assert_eq!(flat.grad, array![[-1.0], [1.0]]);
        let ties = rank_loss(array![[4.0], [4.0]].view(), array![[0.0], [9.0]].view(), &[(0, 1)], 1.0)
            .unwrap();
        assert_eq!(ties.value, 0.0);
        assert!(ties.grad.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn pair_examples() {
        let sym = pair_strank_loss(array![[3.0], [1.0]].view(), array![[0.2], [0.2]].view(), &[(0, 1)])
            .unwrap();
        assert!(close(sym.value, 2.772_588_722_239_781, 1e-12));
        let zero = pair_strank_loss(array![[0.0], [0.0]].view(), array![[1.0], [-4.0]].view(), &[(0, 1)])
            .unwrap();
        assert_eq!(zero.value, 0.0);
        assert!(zero.grad.iter().all(|&g| g == 0.0));
        let out = pair_strank_loss(array![[5.0], [2.0]].view(), array![[1.0], [0.0]].view(), &[(0, 1)])
            .unwrap();
        assert!(close(out.value, 4.192_831_812_627_56, 1e-12));
    }

    #[test]
    fn pcc_examples() {
        let y = array![[1.0], [2.0], [4.0]];
        let same = pcc_loss(y.view(), y.view()).unwrap();
        assert!(close(same.value, 0.0, 1e-15));
        let neg = pcc_loss(y.view(), (-&y).view()).unwrap();
        assert!(close(neg.value, 2.0, 1e-15));
        let out = pcc_loss(y.view(), array![[1.0], [2.0], [3.0]].view()).unwrap();
        assert!(close(out.value, 0.018_019_493_938_034_28, 1e-12));
        let flat = pcc_loss(y.view(), array![[2.0], [2.0], [2.0]].view()).unwrap();
        assert_eq!(flat.value, 1.0);
        assert!(flat.grad.iter().all(|&g| g == 0.0));
        assert!(pcc_loss(array![[1.0]].view(), array![[1.0]].view()).is_err());
    }

    #[test]
    fn list_examples() {
        let e = array![[2.0], [3.0], [5.0]];
        let out = list_strank_loss(e.view(), array![[0.4], [0.4], [0.4]].view(), &[vec![0, 1, 2]], None)
            .unwrap();
        assert!(close(out.value, 10.986_122_886_681_097, 1e-12));

        let corr = list_strank_loss(
            array![[1.0], [3.0]].view(),
            array![[0.0], [0.0]].view(),
            &[vec![0, 1]],
            Some(&[10.0, 30.0]),
        )
        .unwrap();
        assert!(close(corr.value, 2.249_340_578_475_233, 1e-12));
        // p matches the observed split, so the gradient vanishes.
        assert!(corr.grad.iter().all(|g| g.abs() < 1e-15));

        let single = list_strank_loss(e.view(), e.view(), &[vec![1]], None);
        assert!(matches!(single, Err(Error::Argument(_))));
    }

    #[test]
    fn list_size_correction_skips_empty_spots() {
        let e = array![[0.0], [3.0], [1.0]];
        let r = array![[50.0], [0.0], [0.0]];
        let out = list_strank_loss(e.view(), r.view(), &[vec![0, 1, 2]], Some(&[0.0, 3.0, 1.0])).unwrap();
        assert_eq!(out.grad[[0, 0]], 0.0);
        assert!(out.value.is_finite());
        let plain = list_strank_loss(e.view(), array![[0.0], [0.0]].view().to_owned().view(), &[], None);
        assert!(plain.is_err());
    }

    #[test]
    fn dispatch_checks_relations() {
        let e = array![[1.0], [2.0]];
        let spec = LossSpec::new(LossKind::PairStrank);
        let bad = compute_loss(&spec, e.view(), e.view(), &Relations::Groups(vec![vec![0, 1]]), &[]);
        assert!(bad.is_err());
        let none = compute_loss(&spec, e.view(), e.view(), &Relations::None, &[]).unwrap();
        assert_eq!(none.value, 0.0);
        let oob = compute_loss(&spec, e.view(), e.view(), &Relations::Pairs(vec![(0, 5)]), &[]);
        assert!(oob.is_err());
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("pair_strank".parse::<LossKind>().unwrap(), LossKind::PairStrank);
        assert_eq!("ListSTRank".parse::<LossKind>().unwrap(), LossKind::ListStrank);
        let err = "hinge".parse::<LossKind>().unwrap_err();
        assert!(err.to_string().contains("loss.kind"));
    }
}
