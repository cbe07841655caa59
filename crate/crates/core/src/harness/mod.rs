//! Experiment runner: segmentation, per-method extraction, method
//! combinations, classifier training and accuracy reports.

mod cache;
mod config;
mod extract;
mod features_csv;
mod report;
mod run;

pub use cache::{segment_set_hash, FeatureCache};
pub use config::{Combinations, ExperimentConfig, DOCUMENTED_DEFAULTS};
pub use extract::{combine_features, extract_all, extract_method, Extraction, ExtractorConfigs};
pub use features_csv::{load_features, read_features, save_features, write_features};
pub use report::{
    parse_report_csv, percent, render_report, AccuracyReport, ReportFormat, ReportRow, RowOutcome, SplitScore,
};
pub use run::{build_segments, evaluate_combination, run_experiment, run_on_images};

use thiserror::Error;

use crate::bayes::BayesError;
use crate::features::Method;
use crate::imaging::ImagingError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config: {0}")]
    Config(String),
    #[error("{method} extraction failed on segment {segment}: {message}")]
    Extraction {
        method: Method,
        segment: usize,
        message: String,
    },
    #[error("malformed table: {0}")]
    Format(String),
    #[error(transparent)]
    Imaging(#[from] ImagingError),
    #[error(transparent)]
    Bayes(#[from] BayesError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;
