use rayon::prelude::*;

use super::{HarnessError, Result};
use crate::bayes::LabeledDataset;
use crate::features::{DegeneratePolicy, FeatureVector, Method};
use crate::fractal::{fbm_features, FbmConfig};
use crate::gmrf::{gmrf_features, GmrfConfig};
use crate::imaging::{Segment, Split};
use crate::statxture::{
    acf_features, glcm_feature_vector, rlm_feature_vector, AcfConfig, DEFAULT_GLCM_LEVELS, DEFAULT_RLM_LEVELS,
};

/// Settings for all five extractors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExtractorConfigs {
    pub gmrf: GmrfConfig,
    pub fbm: FbmConfig,
    pub glcm_levels: usize,
    pub rlm_levels: usize,
    pub acf: AcfConfig,
}

impl Default for ExtractorConfigs {
    fn default() -> Self {
        Self {
            gmrf: GmrfConfig::default(),
            fbm: FbmConfig::default(),
            glcm_levels: DEFAULT_GLCM_LEVELS,
            rlm_levels: DEFAULT_RLM_LEVELS,
            acf: AcfConfig::default(),
        }
    }
}

impl ExtractorConfigs {
    /// Applies one degenerate-segment policy to every extractor that has one.
    pub fn with_degenerate(mut self, policy: DegeneratePolicy) -> Self {
        self.gmrf.degenerate = policy;
        self.acf.degenerate = policy;
        self
    }

    /// Stable text form of the settings that affect `method`, used for cache keys.
    pub fn fingerprint(&self, method: Method) -> String {
        match method {
            Method::Gmrf => format!("{:?}", self.gmrf),
            Method::Fbm => format!("{:?}", self.fbm),
            Method::Glcm => format!("glcm levels={}", self.glcm_levels),
            Method::Rlm => format!("rlm levels={}", self.rlm_levels),
            Method::Acf => format!("{:?}", self.acf),
        }
    }

    pub fn extract(&self, method: Method, seg: &crate::GrayImage) -> std::result::Result<FeatureVector, String> {
        let out = match method {
            Method::Gmrf => gmrf_features(seg, &self.gmrf).map_err(|e| e.to_string()),
            Method::Fbm => fbm_features(seg, &self.fbm).map_err(|e| e.to_string()),
            Method::Glcm => glcm_feature_vector(seg, self.glcm_levels).map_err(|e| e.to_string()),
            Method::Rlm => rlm_feature_vector(seg, self.rlm_levels).map_err(|e| e.to_string()),
            Method::Acf => acf_features(seg, &self.acf).map_err(|e| e.to_string()),
        }?;
        debug_assert_eq!(out.len(), method.width());
        Ok(out)
    }
}

/// One dataset per requested method, plus how many segments fell back to a
/// degenerate vector for each.
#[derive(Debug, Clone, PartialEq)]
pub struct Extraction {
    pub datasets: Vec<LabeledDataset>,
    pub degenerate_counts: Vec<(Method, usize)>,
}

/// Runs `method` over every segment in parallel; row `k` is segment `k`.
pub fn extract_method(
    segments: &[Segment],
    splits: &[Split],
    class_names: &[String],
    method: Method,
    cfg: &ExtractorConfigs,
) -> Result<(LabeledDataset, usize)> {
    if segments.len() != splits.len() {
        return Err(HarnessError::Config(format!(
            "{} segments but {} split marks",
            segments.len(),
            splits.len()
        )));
    }
    let results: Vec<_> = segments.par_iter().map(|s| cfg.extract(method, &s.pixels)).collect();
    let mut rows = Vec::with_capacity(results.len());
    let mut degenerate = 0;
    for (idx, r) in results.into_iter().enumerate() {
        let fv = r.map_err(|message| HarnessError::Extraction {
            method,
            segment: idx,
            message,
        })?;
        degenerate += fv.degenerate as usize;
        rows.push(fv.values);
    }
    if degenerate > 0 {
        log::warn!("{method}: {degenerate} degenerate segment(s) mapped to designated vectors");
    }
    let data = LabeledDataset::new(
        vec![method],
        method.feature_names(),
        class_names.to_vec(),
        (0..segments.len()).collect(),
        rows,
        segments.iter().map(|s| s.label).collect(),
        splits.to_vec(),
    )?;
    Ok((data, degenerate))
}

/// Feature matrices for each method, rows aligned by segment index.
pub fn extract_all(
    segments: &[Segment],
    splits: &[Split],
    class_names: &[String],
    methods: &[Method],
    cfg: &ExtractorConfigs,
) -> Result<Extraction> {
    if methods.is_empty() {
        return Err(HarnessError::Config("no methods selected".into()));
    }
    let mut datasets = Vec::with_capacity(methods.len());
    let mut degenerate_counts = Vec::with_capacity(methods.len());
    for &m in methods {
        let (d, n) = extract_method(segments, splits, class_names, m, cfg)?;
        datasets.push(d);
        degenerate_counts.push((m, n));
    }
    Ok(Extraction {
        datasets,
        degenerate_counts,
    })
}

/// Concatenates columns in the canonical method order (GMRF, fBm, GLCM, RLM, ACF).
pub fn combine_features(datasets: &[&LabeledDataset]) -> Result<LabeledDataset> {
    if datasets.is_empty() {
        return Err(HarnessError::Config("nothing to combine".into()));
    }
    if datasets.len() == 1 {
        return Ok(datasets[0].clone());
    }
    let mut ordered = datasets.to_vec();
    ordered.sort_by_key(|d| d.methods.first().copied());
    Ok(LabeledDataset::hconcat(&ordered)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::{segment_image, split_assignment, SegmentationConfig};
    use crate::GrayImage;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn segments() -> (Vec<Segment>, Vec<Split>, Vec<String>) {
        let mut segs = Vec::new();
        for label in 0..2 {
            let mut rng = ChaCha8Rng::seed_from_u64(label as u64);
            let img = GrayImage::from_fn(64, 64, |r, c| {
                let base = if label == 0 { (r * 3 + c) % 200 } else { (c * 5) % 120 };
                base as u8 + rng.random_range(0..40)
            })
            .unwrap();
            segs.extend(segment_image(&img, &SegmentationConfig::default(), label).unwrap());
        }
        let labels: Vec<usize> = segs.iter().map(|s| s.label).collect();
        let splits = split_assignment(&labels, 6, 3).unwrap();
        (segs, splits, vec!["a".into(), "b".into()])
    }

    #[test]
    fn widths_and_alignment() {
        let (segs, splits, names) = segments();
        let ex = extract_all(&segs, &splits, &names, &Method::ALL, &ExtractorConfigs::default()).unwrap();
        let widths: Vec<usize> = ex.datasets.iter().map(|d| d.n_features()).collect();
        assert_eq!(widths, vec![7, 5, 32, 20, 4]);
        for d in &ex.datasets {
            assert_eq!(d.labels, ex.datasets[0].labels);
            assert_eq!(d.splits, splits);
            assert_eq!(d.n_rows(), segs.len());
        }
        assert!(ex.degenerate_counts.iter().all(|&(_, n)| n == 0));
    }

    #[test]
    fn empty_method_list_fails() {
        let (segs, splits, names) = segments();
        assert!(matches!(
            extract_all(&segs, &splits, &names, &[], &ExtractorConfigs::default()),
            Err(HarnessError::Config(_))
        ));
    }

    #[test]
    fn flat_segment_needs_designated_policy() {
        let flat = GrayImage::filled(32, 32, 90).unwrap();
        let segs = vec![
            Segment {
                pixels: flat.clone(),
                origin: (0, 0),
                label: 0,
            };
            3
        ];
        let splits = vec![Split::Train, Split::Train, Split::Test];
        let names = vec!["flat".to_string()];
        let strict = ExtractorConfigs::default();
        assert!(matches!(
            extract_method(&segs, &splits, &names, Method::Gmrf, &strict),
            Err(HarnessError::Extraction { segment: 0, .. })
        ));
        let lenient = strict.with_degenerate(DegeneratePolicy::Designated);
        let (d, n) = extract_method(&segs, &splits, &names, Method::Gmrf, &lenient).unwrap();
        assert_eq!(n, 3);
        assert!(d.row(1).iter().all(|&v| v == 0.0));
        let (_, n) = extract_method(&segs, &splits, &names, Method::Acf, &lenient).unwrap();
        assert_eq!(n, 3);
    }

    #[test]
    fn combination_uses_canonical_order() {
        let (segs, splits, names) = segments();
        let ex = extract_all(&segs, &splits, &names, &[Method::Rlm, Method::Gmrf], &ExtractorConfigs::default())
            .unwrap();
        let c = combine_features(&[&ex.datasets[0], &ex.datasets[1]]).unwrap();
        assert_eq!(c.methods, vec![Method::Gmrf, Method::Rlm]);
        assert_eq!(c.n_features(), 27);
        assert_eq!(c.feature_names[0], "gmrf.alpha1");
        assert_eq!(&c.row(4)[..7], ex.datasets[1].row(4));
        let single = combine_features(&[&ex.datasets[0]]).unwrap();
        assert_eq!(single, ex.datasets[0]);
    }

    #[test]
    fn misaligned_rows_rejected() {
        let (segs, splits, names) = segments();
        let cfg = ExtractorConfigs::default();
        let (a, _) = extract_method(&segs, &splits, &names, Method::Acf, &cfg).unwrap();
        let (b, _) = extract_method(&segs[1..], &splits[1..], &names, Method::Fbm, &cfg).unwrap();
        assert!(combine_features(&[&a, &b]).is_err());
    }
}
