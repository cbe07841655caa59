use rayon::prelude::*;

use super::cache::{segment_set_hash, FeatureCache};
use super::config::ExperimentConfig;
use super::extract::combine_features;
use super::report::{AccuracyReport, ReportRow, RowOutcome};
use super::{HarnessError, Result};
use crate::bayes::{evaluate, fit, standardize, FitOptions, LabeledDataset};
use crate::features::Method;
use crate::imaging::{load_pgm, segment_image, split_assignment, GrayImage, Segment, Split};

/// Segments every class image (label = position in `images`) and draws the split.
pub fn build_segments(
    images: &[(String, GrayImage)],
    cfg: &ExperimentConfig,
) -> Result<(Vec<Segment>, Vec<Split>, Vec<String>)> {
    if images.is_empty() {
        return Err(HarnessError::Config("no class images".into()));
    }
    let mut segments = Vec::new();
    for (label, (_, img)) in images.iter().enumerate() {
        segments.extend(segment_image(img, &cfg.segmentation, label)?);
    }
    let labels: Vec<usize> = segments.iter().map(|s| s.label).collect();
    let splits = split_assignment(&labels, cfg.train_count, cfg.seed)?;
    let names = images.iter().map(|(n, _)| n.clone()).collect();
    Ok((segments, splits, names))
}

/// Fits on the train rows of the combined matrix and scores both splits.
pub fn evaluate_combination(data: &LabeledDataset, opts: &FitOptions, zscore: bool) -> Result<RowOutcome> {
    let standardized;
    let data = if zscore {
        standardized = standardize(data).0;
        &standardized
    } else {
        data
    };
    let models = fit(data, opts)?;
    let train = evaluate(&models, data, Split::Train)?;
    let test = evaluate(&models, data, Split::Test)?;
    Ok(RowOutcome::Scored {
        train: train.into(),
        test: test.into(),
        ridge: models.iter().map(|m| m.regularization_used).collect(),
    })
}

/// Runs every selected combination on in-memory class images.
pub fn run_on_images(
    images: &[(String, GrayImage)],
    cfg: &ExperimentConfig,
    cache: &FeatureCache,
) -> Result<AccuracyReport> {
    cfg.validate()?;
    let (segments, splits, class_names) = build_segments(images, cfg)?;
    let combos = cfg.combinations.enumerate(&cfg.methods);
    let mut needed: Vec<Method> = combos.iter().flatten().copied().collect();
    needed.sort();
    needed.dedup();

    let set_hash = segment_set_hash(&segments, &splits, &class_names);
    let mut per_method = Vec::with_capacity(needed.len());
    for &m in &needed {
        let (data, degenerate) =
            cache.get_or_extract(&set_hash, &segments, &splits, &class_names, m, &cfg.extractors)?;
        if degenerate > 0 {
            log::warn!("{m}: {degenerate} of {} segments were degenerate", segments.len());
        }
        per_method.push((m, data));
    }
    let lookup = |m: Method| &*per_method.iter().find(|(k, _)| *k == m).expect("extracted above").1;

    let rows: Vec<ReportRow> = combos
        .par_iter()
        .map(|combo| {
            let parts: Vec<&LabeledDataset> = combo.iter().map(|&m| lookup(m)).collect();
            let feature_count = parts.iter().map(|d| d.n_features()).sum();
            let outcome = combine_features(&parts)
                .and_then(|data| evaluate_combination(&data, &cfg.fit, cfg.standardize))
                .unwrap_or_else(|e| {
                    let label = combo.iter().map(|m| m.label()).collect::<Vec<_>>().join(" & ");
                    log::warn!("{label}: {e}");
                    RowOutcome::Failed(e.to_string())
                });
            ReportRow {
                methods: combo.clone(),
                feature_count,
                outcome,
            }
        })
        .collect();
    let mut report = AccuracyReport { class_names, rows };
    report.sort_rows();
    Ok(report)
}

/// Loads the configured images and runs the experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<AccuracyReport> {
    cfg.validate()?;
    let images = cfg
        .images
        .iter()
        .map(|(path, class)| {
            load_pgm(path)
                .map(|img| (class.clone(), img))
                .map_err(|e| HarnessError::Config(format!("image for class `{class}` ({}): {e}", path.display())))
        })
        .collect::<Result<Vec<_>>>()?;
    let cache = match &cfg.cache_dir {
        Some(dir) => FeatureCache::persistent(dir)?,
        None => FeatureCache::in_memory(),
    };
    run_on_images(&images, cfg, &cache)
}
