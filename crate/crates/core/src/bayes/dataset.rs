use super::{BayesError, Result};
use crate::features::Method;
use crate::imaging::Split;

/// Feature matrix with one row per segment, class labels and split marks.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    /// Extractors whose features fill the columns, in column order.
    pub methods: Vec<Method>,
    pub feature_names: Vec<String>,
    /// Indexed by label.
    pub class_names: Vec<String>,
    pub segment_ids: Vec<usize>,
    pub labels: Vec<usize>,
    pub splits: Vec<Split>,
    values: Vec<f64>,
}

impl LabeledDataset {
    pub fn new(
        methods: Vec<Method>,
        feature_names: Vec<String>,
        class_names: Vec<String>,
        segment_ids: Vec<usize>,
        rows: Vec<Vec<f64>>,
        labels: Vec<usize>,
        splits: Vec<Split>,
    ) -> Result<Self> {
        let n = rows.len();
        if labels.len() != n || splits.len() != n || segment_ids.len() != n {
            return Err(BayesError::InvalidDataset(format!(
                "{n} rows but {} labels, {} splits, {} ids",
                labels.len(),
                splits.len(),
                segment_ids.len()
            )));
        }
        let width = feature_names.len();
        let mut values = Vec::with_capacity(n * width);
        for (idx, row) in rows.into_iter().enumerate() {
            if row.len() != width {
                return Err(BayesError::DimensionMismatch {
                    expected: width,
                    found: row.len(),
                });
            }
            if let Some(col) = row.iter().position(|v| !v.is_finite()) {
                return Err(BayesError::InvalidDataset(format!(
                    "non-finite value in row {idx}, column `{}`",
                    feature_names[col]
                )));
            }
            values.extend(row);
        }
        if let Some(&bad) = labels.iter().find(|&&l| l >= class_names.len()) {
            return Err(BayesError::InvalidDataset(format!(
                "label {bad} has no class name ({} classes)",
                class_names.len()
            )));
        }
        Ok(Self {
            methods,
            feature_names,
            class_names,
            segment_ids,
            labels,
            splits,
            values,
        })
    }

    #[inline]
    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    #[inline]
    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    #[inline]
    pub fn row(&self, idx: usize) -> &[f64] {
        let w = self.n_features();
        &self.values[idx * w..(idx + 1) * w]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.n_rows()).map(move |i| self.row(i))
    }

    /// Row indices belonging to `split`, in order.
    pub fn indices(&self, split: Split) -> Vec<usize> {
        (0..self.n_rows()).filter(|&i| self.splits[i] == split).collect()
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Column-wise concatenation; rows must agree on id, label and split.
    pub fn hconcat(parts: &[&LabeledDataset]) -> Result<LabeledDataset> {
        let first = *parts
            .first()
            .ok_or_else(|| BayesError::InvalidDataset("nothing to concatenate".into()))?;
        for p in &parts[1..] {
            if p.n_rows() != first.n_rows()
                || p.labels != first.labels
                || p.splits != first.splits
                || p.segment_ids != first.segment_ids
                || p.class_names != first.class_names
            {
                return Err(BayesError::InvalidDataset(
                    "datasets disagree on rows, labels, splits or classes".into(),
                ));
            }
        }
        let methods = parts.iter().flat_map(|p| p.methods.iter().copied()).collect();
        let feature_names = parts.iter().flat_map(|p| p.feature_names.iter().cloned()).collect();
        let width: usize = parts.iter().map(|p| p.n_features()).sum();
        let mut values = Vec::with_capacity(first.n_rows() * width);
        for i in 0..first.n_rows() {
            for p in parts {
                values.extend_from_slice(p.row(i));
            }
        }
        Ok(LabeledDataset {
            methods,
            feature_names,
            class_names: first.class_names.clone(),
            segment_ids: first.segment_ids.clone(),
            labels: first.labels.clone(),
            splits: first.splits.clone(),
            values,
        })
    }
}
