#![allow(dead_code)]

use ndarray::Array2;
use rand::Rng;
use strank::losses::{compute_loss, LossKind, LossSpec, Relations};
use strank::sampling::RngStream;

/// A random loss instance: counts, scores, relations and library sizes.
pub struct Instance {
    pub spec: LossSpec,
    pub counts: Array2<f64>,
    pub preds: Array2<f64>,
    pub relations: Relations,
    pub libs: Vec<f64>,
}

impl Instance {
    pub fn value(&self, preds: &Array2<f64>) -> f64 {
        compute_loss(&self.spec, self.counts.view(), preds.view(), &self.relations, &self.libs)
            .unwrap()
            .value
    }

    pub fn grad(&self) -> Array2<f64> {
        compute_loss(&self.spec, self.counts.view(), self.preds.view(), &self.relations, &self.libs)
            .unwrap()
            .grad
    }
}

/// Disjoint random pairs over `0..batch`.
pub fn random_pairs(batch: usize, rng: &mut RngStream) -> Vec<(usize, usize)> {
    let mut idx: Vec<usize> = (0..batch).collect();
    rng.shuffle(&mut idx);
    idx.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

/// Random partition of `0..batch` into lists of at least two members.
pub fn random_groups(batch: usize, rng: &mut RngStream) -> Vec<Vec<usize>> {
    let mut idx: Vec<usize> = (0..batch).collect();
    rng.shuffle(&mut idx);
    let mut groups = Vec::new();
    let mut rest = &idx[..];
    while rest.len() >= 2 {
        let take = if rest.len() < 4 { rest.len() } else { rng.random_range(2..=rest.len().min(6)) };
        groups.push(rest[..take].to_vec());
        rest = &rest[take..];
    }
    groups
}

/// Random instance for `kind` with batch <= 16, at most 4 genes and counts
/// <= 20. Rank instances keep every hinge at least `1e-3` from its kink.
pub fn random_instance(kind: LossKind, rng: &mut RngStream) -> Instance {
    loop {
        let batch = rng.random_range(2..=16);
        let genes = rng.random_range(1..=4);
        let counts = Array2::from_shape_simple_fn((batch, genes), || rng.random_range(0..=20) as f64);
        let preds = Array2::from_shape_simple_fn((batch, genes), || rng.uniform(-3.0, 3.0));
        let mut spec = LossSpec::new(kind);
        let relations = match kind {
            LossKind::Rank | LossKind::PairStrank => Relations::Pairs(random_pairs(batch, rng)),
            LossKind::ListStrank => {
                spec.size_correction = rng.random_bool(0.5);
                Relations::Groups(random_groups(batch, rng))
            }
            _ => Relations::None,
        };
        let libs: Vec<f64> = counts.rows().into_iter().map(|r| r.sum()).collect();
        if kind == LossKind::Rank && near_kink(&counts, &preds, &relations, spec.margin) {
            continue;
        }
        return Instance { spec, counts, preds, relations, libs };
    }
}

fn near_kink(counts: &Array2<f64>, preds: &Array2<f64>, rel: &Relations, margin: f64) -> bool {
    let Relations::Pairs(pairs) = rel else { return false };
    pairs.iter().any(|&(i, j)| {
        (0..counts.ncols()).any(|g| {
            counts[[i, g]] != counts[[j, g]] && {
                let (hi, lo) = if counts[[i, g]] > counts[[j, g]] { (i, j) } else { (j, i) };
                (preds[[lo, g]] - preds[[hi, g]] + margin).abs() < 1e-3
            }
        })
    })
}

/// Central-difference gradient of `f` at `x`.
pub fn numeric_grad(x: &Array2<f64>, step: f64, f: impl Fn(&Array2<f64>) -> f64) -> Array2<f64> {
    let mut out = Array2::zeros(x.dim());
    let mut probe = x.clone();
    for idx in ndarray::indices(x.dim()) {
        let base = probe[idx];
        probe[idx] = base + step;
        let up = f(&probe);
        probe[idx] = base - step;
        let down = f(&probe);
        probe[idx] = base;
        out[idx] = (up - down) / (2.0 * step);
    }
    out
}

/// Largest coordinate-wise `|a - n| / max(|a|, |n|, floor)`.
pub fn max_rel_err(analytic: &Array2<f64>, numeric: &Array2<f64>, floor: f64) -> f64 {
    analytic
        .iter()
        .zip(numeric)
        .map(|(a, n)| (a - n).abs() / a.abs().max(n.abs()).max(floor))
        .fold(0.0, f64::max)
}
