//! Experiment orchestration: config-driven runs and the synthetic benchmark
//! grids.

pub mod bench;
pub mod experiment;

pub use bench::{
    reproduce_table1, reproduce_table1_with, run_cells, sweep_downsample, sweep_nk, sweep_params,
    BenchSettings, Cell, DownsampleTable, NkTable, ParamTable, Preset, Summary, SweepParam, Table1,
};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentOutcome, IngestConfig};
