//! Fixtures shared by the benchmarks.

use texfuse::gmrf::{synthesize_gmrf, GmrfParams};
use texfuse::harness::{build_segments, combine_features, extract_all, ExperimentConfig, ExtractorConfigs};
use texfuse::{GrayImage, LabeledDataset, Method};

/// A 32x32 GMRF texture segment.
pub fn segment() -> GrayImage {
    let p = GmrfParams::new([0.2, 0.15, -0.03, 0.02, 0.04, 0.01], 1.0).unwrap();
    synthesize_gmrf(&p, 32, 9, 0).unwrap()
}

/// GLCM + RLM features (52 columns) for four synthetic classes, 64 train rows each.
pub fn dataset() -> LabeledDataset {
    let images: Vec<(String, GrayImage)> = (0..4)
        .map(|i| {
            let a = 0.05 * i as f64;
            let p = GmrfParams::new([0.2 - a, 0.05 + a, 0.0, 0.0, 0.02, 0.0], 1.0).unwrap();
            (format!("c{i}"), synthesize_gmrf(&p, 256, 30 + i, 0).unwrap())
        })
        .collect();
    let cfg = ExperimentConfig::default();
    let (segments, splits, names) = build_segments(&images, &cfg).unwrap();
    let ex = extract_all(&segments, &splits, &names, &[Method::Glcm, Method::Rlm], &ExtractorConfigs::default())
        .unwrap();
    combine_features(&[&ex.datasets[0], &ex.datasets[1]]).unwrap()
}
