//! Gaussian maximum-likelihood classifier with equal priors.
//!
//! Each class gets a mean vector and a full (or diagonal) ML covariance;
//! a sample goes to the class with the highest Gaussian log-likelihood.

mod dataset;
mod model;
mod serialize;
mod standardize;

pub use dataset::LabeledDataset;
pub use model::{
    classify, evaluate, fit, log_likelihood, Classification, ClassModel, CovarianceMode, Evaluation, FitOptions,
    CONDITION_LIMIT, MAX_RIDGE_ATTEMPTS,
};
pub use serialize::{decode_models, encode_models, load_models, save_models, MODEL_MAGIC, MODEL_VERSION};
pub use standardize::{standardize, Standardizer};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BayesError {
    #[error("feature dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("class `{class}` has {count} training samples, need at least 2")]
    TooFewSamples { class: String, count: usize },
    #[error("no class models")]
    NoModels,
    #[error("no rows in the {0} split")]
    EmptySplit(&'static str),
    #[error("covariance of class `{class}` stays singular after ridge escalation")]
    RegularizationFailed { class: String },
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("model file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, BayesError>;
