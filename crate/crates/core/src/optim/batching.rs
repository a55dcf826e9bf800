use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::losses::{Grouping, LossSpec, Relations};
use crate::sampling::{grouped_derangement, RngStream};

/// How spots are assembled into mini-batches.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BatchStrategy {
    /// Global shuffle, tissues mixed at random.
    #[default]
    Default,
    /// Every batch holds a single tissue.
    IntraTissue,
    /// Tissues interleaved so each batch is as balanced as possible.
    InterTissue,
}

fn by_tissue(indices: impl IntoIterator<Item = (usize, usize)>) -> BTreeMap<usize, Vec<usize>> {
    let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (item, tissue) in indices {
        blocks.entry(tissue).or_default().push(item);
    }
    blocks
}

/// Cut `order` into batches; a final batch of fewer than two spots is dropped.
fn chunk(order: &[usize], batch_size: usize, out: &mut Vec<Vec<usize>>) {
    out.extend(
        order
            .chunks(batch_size)
            .filter(|c| c.len() >= 2)
            .map(<[usize]>::to_vec),
    );
}

/// One epoch of batches over all spots.
pub fn make_minibatches(
    tissue_ids: &[usize],
    batch_size: usize,
    strategy: BatchStrategy,
    rng: &mut RngStream,
) -> Vec<Vec<usize>> {
    let batch_size = batch_size.max(2);
    let mut batches = Vec::new();
    match strategy {
        BatchStrategy::Default => {
            let mut order: Vec<usize> = (0..tissue_ids.len()).collect();
            rng.shuffle(&mut order);
            chunk(&order, batch_size, &mut batches);
        }
        BatchStrategy::IntraTissue => {
            for (_, mut block) in by_tissue(tissue_ids.iter().copied().enumerate()) {
                rng.shuffle(&mut block);
                chunk(&block, batch_size, &mut batches);
            }
            rng.shuffle(&mut batches);
        }
        BatchStrategy::InterTissue => {
            let mut blocks: Vec<Vec<usize>> = by_tissue(tissue_ids.iter().copied().enumerate())
                .into_values()
                .collect();
            for block in &mut blocks {
                rng.shuffle(block);
            }
            let longest = blocks.iter().map(Vec::len).max().unwrap_or(0);
            let order: Vec<usize> = (0..longest)
                .flat_map(|k| blocks.iter().filter_map(move |b| b.get(k).copied()))
                .collect();
            chunk(&order, batch_size, &mut batches);
        }
    }
    batches
}

/// Build the pairs or lists a relational loss is evaluated on. Indices in the
/// result are positions within `batch`. Spots whose tissue occurs only once
/// in the batch have no partner and are left out.
pub fn group_for_loss(
    batch: &[usize],
    tissue_ids: &[usize],
    spec: &LossSpec,
    rng: &mut RngStream,
) -> Result<Relations> {
    let blocks = || {
        let mut b = by_tissue(batch.iter().enumerate().map(|(pos, &row)| (pos, tissue_ids[row])));
        b.retain(|_, members| members.len() >= 2);
        b
    };
    match spec.kind.grouping() {
        Grouping::Pointwise | Grouping::WholeBatch => Ok(Relations::None),
        Grouping::Pairs => {
            let blocks = blocks();
            let mut positions = Vec::new();
            let mut ids = Vec::new();
            for (tissue, members) in &blocks {
                positions.extend_from_slice(members);
                ids.extend(std::iter::repeat_n(*tissue, members.len()));
            }
            let perm = grouped_derangement(&ids, rng)?;
            Ok(Relations::Pairs(
                (0..positions.len())
                    .map(|k| (positions[k], positions[perm[k]]))
                    .collect(),
            ))
        }
        Grouping::Lists => {
            let mut groups = Vec::new();
            for (_, mut members) in blocks() {
                rng.shuffle(&mut members);
                groups.extend(
                    members
                        .chunks(spec.list_size)
                        .filter(|c| c.len() >= 2)
                        .map(<[usize]>::to_vec),
                );
            }
            Ok(Relations::Groups(groups))
        }
    }
}
