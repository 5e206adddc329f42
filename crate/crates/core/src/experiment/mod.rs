//! Synthetic feature-selection experiments: data generation, algorithm sweeps, metrics and
//! CSV/plot output.

pub mod config;
pub mod metrics;
pub mod output;
pub mod run;
pub mod synth;

pub use config::{Algorithm, ExperimentConfig, Model, Sweep};
pub use metrics::{auroc, selection_scores, support_recovery};
pub use output::{emit_outputs, read_metrics, EmitSummary};
pub use run::{aggregate, run_experiment, run_records, MetricsRow, RunRecord};
pub use synth::{generate_logistic, generate_synthetic, SyntheticLogistic, SyntheticRegression};
