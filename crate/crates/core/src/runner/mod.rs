//! Experiment driver: configuration, dataset files, repeated runs and reports.

pub mod config;
pub mod csv_io;
pub mod experiment;
pub mod report;

pub use config::{DataMode, Estimator, ExperimentConfig};
pub use csv_io::{export_csv, load_csv};
pub use experiment::{run_experiment, synthetic_dataset, EvaluationRecord, ReportBundle};
pub use report::emit_report;
