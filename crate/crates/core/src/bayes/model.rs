use nalgebra::{DMatrix, DVector};

use super::{BayesError, LabeledDataset, Result};
use crate::imaging::Split;

/// Covariances with a larger eigenvalue ratio get ridge regularization.
pub const CONDITION_LIMIT: f64 = 1e10;
/// Ridge escalation steps (×10 each) before giving up.
pub const MAX_RIDGE_ATTEMPTS: usize = 10;

const LN_2PI: f64 = 1.837_877_066_409_345_5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CovarianceMode {
    #[default]
    Full,
    /// Off-diagonal covariance entries are dropped.
    Diagonal,
}

impl CovarianceMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CovarianceMode::Full => "full_covariance",
            CovarianceMode::Diagonal => "diagonal",
        }
    }
}

impl std::str::FromStr for CovarianceMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "full" | "full_covariance" => Ok(CovarianceMode::Full),
            "diagonal" | "diag" => Ok(CovarianceMode::Diagonal),
            other => Err(format!("unknown classifier mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    /// Base ridge factor; the diagonal load is `ridge * trace / n`.
    pub ridge: f64,
    pub mode: CovarianceMode,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            ridge: 1e-6,
            mode: CovarianceMode::Full,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassModel {
    pub label: usize,
    pub name: String,
    pub mean: DVector<f64>,
    /// ML covariance (divided by the class count), before regularization.
    pub covariance: DMatrix<f64>,
    /// Inverse of `covariance + regularization_used * I`.
    pub precision: DMatrix<f64>,
    /// `ln |covariance + regularization_used * I|`.
    pub log_det: f64,
    pub regularization_used: f64,
}

impl ClassModel {
    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn regularized_covariance(&self) -> DMatrix<f64> {
        &self.covariance + DMatrix::identity(self.dim(), self.dim()) * self.regularization_used
    }

    /// Builds the derived quantities for a covariance and diagonal load.
    /// Returns `None` when the loaded matrix is not well conditioned.
    pub fn from_parts(
        label: usize,
        name: String,
        mean: DVector<f64>,
        covariance: DMatrix<f64>,
        regularization_used: f64,
    ) -> Option<Self> {
        let n = mean.len();
        let loaded = &covariance + DMatrix::identity(n, n) * regularization_used;
        let eig = loaded.clone().symmetric_eigenvalues();
        let (lo, hi) = (eig.min(), eig.max());
        if !(lo > 0.0) || !(hi / lo <= CONDITION_LIMIT) {
            return None;
        }
        let chol = loaded.cholesky()?;
        let log_det = 2.0 * chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>();
        let precision = chol.inverse();
        Some(Self {
            label,
            name,
            mean,
            covariance,
            precision,
            log_det,
            regularization_used,
        })
    }
}

/// Fits one Gaussian per class from the training rows.
pub fn fit(data: &LabeledDataset, opts: &FitOptions) -> Result<Vec<ClassModel>> {
    let n = data.n_features();
    if n == 0 {
        return Err(BayesError::InvalidDataset("no feature columns".into()));
    }
    let train = data.indices(Split::Train);
    let mut models = Vec::with_capacity(data.n_classes());
    for (label, name) in data.class_names.iter().enumerate() {
        let rows: Vec<&[f64]> = train
            .iter()
            .filter(|&&i| data.labels[i] == label)
            .map(|&i| data.row(i))
            .collect();
        let m = rows.len();
        if m < 2 {
            return Err(BayesError::TooFewSamples {
                class: name.clone(),
                count: m,
            });
        }
        let mut mean = DVector::<f64>::zeros(n);
        for r in &rows {
            for (acc, v) in mean.iter_mut().zip(r.iter()) {
                *acc += v;
            }
        }
        mean /= m as f64;
        let mut cov = DMatrix::<f64>::zeros(n, n);
        for r in &rows {
            let d = DVector::from_iterator(n, r.iter().zip(mean.iter()).map(|(v, mu)| v - mu));
            cov.ger(1.0, &d, &d, 1.0);
        }
        cov /= m as f64;
        if opts.mode == CovarianceMode::Diagonal {
            cov = DMatrix::from_diagonal(&cov.diagonal());
        }

        let model = ClassModel::from_parts(label, name.clone(), mean.clone(), cov.clone(), 0.0)
            .or_else(|| {
                let base = opts.ridge * cov.trace() / n as f64;
                (0..MAX_RIDGE_ATTEMPTS)
                    .map(|k| base * 10f64.powi(k as i32))
                    .filter(|&lambda| lambda > 0.0 && lambda.is_finite())
                    .find_map(|lambda| ClassModel::from_parts(label, name.clone(), mean.clone(), cov.clone(), lambda))
            })
            .ok_or_else(|| BayesError::RegularizationFailed { class: name.clone() })?;
        models.push(model);
    }
    Ok(models)
}

/// `ln p(x | class)` for the class's Gaussian, evaluated in the log domain.
pub fn log_likelihood(model: &ClassModel, x: &[f64]) -> Result<f64> {
    let n = model.dim();
    if x.len() != n {
        return Err(BayesError::DimensionMismatch {
            expected: n,
            found: x.len(),
        });
    }
    let d = DVector::from_iterator(n, x.iter().zip(model.mean.iter()).map(|(a, b)| a - b));
    let quad = d.dot(&(&model.precision * &d));
    Ok(-0.5 * n as f64 * LN_2PI - 0.5 * model.log_det - 0.5 * quad)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub label: usize,
    /// Log-likelihood per model, in model order.
    pub scores: Vec<f64>,
}

/// Arg-max of the class log-likelihoods; ties go to the earliest model.
pub fn classify(models: &[ClassModel], x: &[f64]) -> Result<Classification> {
    if models.is_empty() {
        return Err(BayesError::NoModels);
    }
    let scores = models
        .iter()
        .map(|m| log_likelihood(m, x))
        .collect::<Result<Vec<_>>>()?;
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    Ok(Classification {
        label: models[best].label,
        scores,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// `confusion[true][predicted]`.
    pub confusion: Vec<Vec<u64>>,
    pub per_class_accuracy: Vec<f64>,
    pub correct: u64,
    pub total: u64,
}

impl Evaluation {
    pub fn pooled_accuracy(&self) -> f64 {
        self.correct as f64 / self.total as f64
    }

    /// Mean over classes that have at least one sample.
    pub fn mean_class_accuracy(&self) -> f64 {
        let present: Vec<f64> = self
            .confusion
            .iter()
            .zip(&self.per_class_accuracy)
            .filter(|(row, _)| row.iter().sum::<u64>() > 0)
            .map(|(_, &a)| a)
            .collect();
        present.iter().sum::<f64>() / present.len() as f64
    }
}

/// Scores the rows of one split.
pub fn evaluate(models: &[ClassModel], data: &LabeledDataset, split: Split) -> Result<Evaluation> {
    let idx = data.indices(split);
    if idx.is_empty() {
        return Err(BayesError::EmptySplit(split.as_str()));
    }
    let k = data.n_classes();
    let mut confusion = vec![vec![0u64; k]; k];
    for &i in &idx {
        let pred = classify(models, data.row(i))?.label;
        confusion[data.labels[i]][pred] += 1;
    }
    let per_class_accuracy = confusion
        .iter()
        .enumerate()
        .map(|(c, row)| {
            let n: u64 = row.iter().sum();
            if n == 0 {
                0.0
            } else {
                row[c] as f64 / n as f64
            }
        })
        .collect();
    let correct = (0..k).map(|c| confusion[c][c]).sum();
    Ok(Evaluation {
        confusion,
        per_class_accuracy,
        correct,
        total: idx.len() as u64,
    })
}
