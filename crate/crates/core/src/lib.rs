//! Count-aware ranking losses for spatial expression prediction.
//!
//! The crate trains a small rectifier MLP to output *rank scores*: per-gene
//! values whose ordering within a tissue should follow the ordering of the
//! observed expression counts. Two likelihood-based relational losses are
//! provided alongside five baselines:
//!
//! | Loss | Family | Signal used |
//! |------|--------|-------------|
//! | MSE, Poisson, NB | pointwise | absolute counts |
//! | Rank | pairwise | hinge on ordering only |
//! | PairSTRank | pairwise | binomial split of a pair's total count |
//! | PCC | listwise | Pearson correlation across the batch |
//! | ListSTRank | listwise | multinomial split of a list's total count |
//!
//! Everything needed to benchmark them is included: a negative-binomial
//! generator with per-tissue batch effects ([`synthgen`]), binomial
//! downsampling, an AdamW trainer with cosine annealing ([`optim`]),
//! Spearman evaluation ([`metrics`]) and sweep drivers ([`harness`]).
//!
//! ```no_run
//! use strank::harness::{reproduce_table1, Preset};
//!
//! let table = reproduce_table1(&Preset::Desk.settings().with_workers(1)).unwrap();
//! println!("{}", table.to_csv());
//! ```
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dataset;
pub mod error;
pub mod harness;
pub mod losses;
pub mod metrics;
pub mod model;
pub mod optim;
pub mod sampling;
pub mod synthgen;

pub use dataset::Dataset;
pub use error::{Error, Result};
pub use losses::{LossKind, LossSpec};
pub use metrics::{spearman, Report};
pub use model::Mlp;
pub use optim::{train, TrainConfig};
pub use sampling::RngStream;
pub use synthgen::SynthConfig;
