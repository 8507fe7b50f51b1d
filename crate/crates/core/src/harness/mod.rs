//! Monte Carlo experiments, dataset export and assignment scoring.

mod dataset;
mod experiment;
mod score;

pub use dataset::{dataset_header, export_dataset, DatasetOptions};
pub use experiment::{
    run_experiment, summarize, write_records, write_summaries, Cell, CellSpec, CellSummary, ExperimentResult,
    ExperimentSpec, OutputSpec, RunRecord, DEFAULT_MC_RUNS, WORKERS_ENV,
};
pub use score::{read_assignments, score_assignments, ScoreRecord};
