//! Dataset ingestion, end-to-end runs, experiment sweeps and result files.

mod config;
mod io;
mod pipeline;
mod sweep;

pub use self::config::{BlobSpec, DataSource, ExperimentConfig, SigmaMode};
pub use self::io::{
    emit_results, group_records, load_csv, mean_std, read_results, synth_blobs, write_assignments, write_csv,
    EmittedFiles, Group,
};
pub use self::pipeline::{fused_similarity, run_once, Method, RunOutput, Similarity};
pub use self::sweep::{load_data, run_pipeline, run_pipeline_with, search_sigma, variants, ResultRecord, Variant};
