//! AdamW, cosine annealing, mini-batch construction and the training loop.

mod adamw;
mod batching;
mod schedule;
mod trainer;

pub use adamw::{adamw_step, adamw_update, OptimState};
pub use batching::{group_for_loss, make_minibatches, BatchStrategy};
pub use schedule::cosine_lr;
pub use trainer::{train, History, TrainConfig};
