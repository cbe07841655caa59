//! Texture classification from combined statistical and model-based features.
//!
//! Five extractors turn a gray-level segment into a fixed-length feature vector:
//!
//! | method | module | width |
//! |--------|--------|-------|
//! | GMRF (third-order Gaussian Markov random field, least squares) | [`gmrf`] | 7 |
//! | fBm (per-pixel fractal dimension image statistics) | [`fractal`] | 5 |
//! | GLCM (Haralick features, 4 directions) | [`statxture`] | 32 |
//! | RLM (run-length features, 4 directions) | [`statxture`] | 20 |
//! | ACF (exponential fits to autocovariance margins) | [`statxture`] | 4 |
//!
//! [`bayes`] holds the Gaussian maximum-likelihood classifier and [`harness`]
//! runs single-method and combined-method experiments end to end.

// `!(x > 0.0)` style checks are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bayes;
pub mod features;
pub mod fractal;
pub mod gmrf;
pub mod harness;
pub mod imaging;
mod spectral;
pub mod statxture;

pub use bayes::{ClassModel, CovarianceMode, LabeledDataset};
pub use features::{DegeneratePolicy, FeatureVector, Method};
pub use imaging::{GrayImage, RealImage, Segment, SegmentationConfig, Split};
