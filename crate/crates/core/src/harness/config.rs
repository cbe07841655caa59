//! Flat `key = value` experiment configuration.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use super::extract::ExtractorConfigs;
use super::{HarnessError, Result};
use crate::bayes::{CovarianceMode, FitOptions};
use crate::features::{DegeneratePolicy, Method};
use crate::gmrf::VarianceDenominator;
use crate::imaging::{Boundary, SegmentationConfig};

/// Which method subsets to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Combinations {
    pub single: bool,
    pub pairs: bool,
    pub triples: bool,
}

impl Default for Combinations {
    fn default() -> Self {
        Self {
            single: true,
            pairs: true,
            triples: false,
        }
    }
}

impl Combinations {
    /// Method subsets in canonical order: sizes ascending, then lexicographic.
    pub fn enumerate(&self, methods: &[Method]) -> Vec<Vec<Method>> {
        let mut ms = methods.to_vec();
        ms.sort();
        ms.dedup();
        let mut out = Vec::new();
        for (k, on) in [(1, self.single), (2, self.pairs), (3, self.triples)] {
            if on {
                subsets(&ms, k, 0, &mut Vec::new(), &mut out);
            }
        }
        out
    }
}

fn subsets(ms: &[Method], k: usize, start: usize, cur: &mut Vec<Method>, out: &mut Vec<Vec<Method>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..ms.len() {
        cur.push(ms[i]);
        subsets(ms, k, i + 1, cur, out);
        cur.pop();
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// `(path, class name)`, one image per class.
    pub images: Vec<(PathBuf, String)>,
    pub segmentation: SegmentationConfig,
    /// Training segments per class.
    pub train_count: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub combinations: Combinations,
    pub extractors: ExtractorConfigs,
    pub fit: FitOptions,
    /// Z-score features with training statistics before fitting.
    pub standardize: bool,
    pub cache_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            images: Vec::new(),
            segmentation: SegmentationConfig::default(),
            train_count: 64,
            seed: 0,
            methods: Method::ALL.to_vec(),
            combinations: Combinations::default(),
            extractors: ExtractorConfigs::default(),
            fit: FitOptions::default(),
            standardize: false,
            cache_dir: None,
        }
    }
}

/// Every recognised key with its default value.
pub const DOCUMENTED_DEFAULTS: &str = "\
# one line per class: image.<class name> = <path to binary PGM>
# image.D16 = textures/D16.pgm

# segmentation
segment_size = 32
stride = 16
# wrap | clip
boundary = wrap

# split: training segments per class, the rest are test
train_count = 64
seed = 0

# extractors, any of gmrf fbm glcm rlm acf
methods = gmrf,fbm,glcm,rlm,acf
# any of single pairs triples
combinations = single,pairs

glcm_levels = 32
rlm_levels = 16
# printed: (M-2)(N-2) | interior: (M-4)(N-4)
gmrf_denominator = printed
fbm_window_radius = 8
fbm_max_distance = 4
fbm_distance_bins = 4
fbm_flat_as_plane = true
acf_max_shift = 16
acf_normalize = true
# error | designated (flat segments map to zero vectors)
degenerate = error

# full | diagonal
classifier = full
ridge = 1e-6
standardize = false

# directory for cached feature tables; empty disables
cache_dir =
";

fn parse_bool(key: &str, v: &str) -> Result<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(bad(key, v, "expected true or false")),
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| bad(key, v, "not a number"))
}

fn bad(key: &str, value: &str, why: &str) -> HarnessError {
    HarnessError::Config(format!("`{key} = {value}`: {why}"))
}

impl ExperimentConfig {
    /// Parses config text; relative image and cache paths resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg = Self::default();
        let mut seen = HashSet::new();
        let mut degenerate = DegeneratePolicy::Error;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(HarnessError::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
            if let Some(class) = key.strip_prefix("image.") {
                if class.is_empty() || value.is_empty() {
                    return Err(bad(key, value, "needs a class name and a path"));
                }
                cfg.images.push((base_dir.join(value), class.to_string()));
                continue;
            }
            let ex = &mut cfg.extractors;
            match key {
                "segment_size" => cfg.segmentation.segment_size = parse_num(key, value)?,
                "stride" => cfg.segmentation.stride = parse_num(key, value)?,
                "boundary" => {
                    cfg.segmentation.boundary = value.parse::<Boundary>().map_err(|e| bad(key, value, &e))?
                }
                "train_count" => cfg.train_count = parse_num(key, value)?,
                "seed" => cfg.seed = parse_num(key, value)?,
                "methods" => {
                    cfg.methods = value
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(|s| s.parse::<Method>().map_err(|e| bad(key, value, &e)))
                        .collect::<Result<_>>()?
                }
                "combinations" => {
                    let mut c = Combinations {
                        single: false,
                        pairs: false,
                        triples: false,
                    };
                    for part in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                        match part {
                            "single" | "singles" => c.single = true,
                            "pairs" => c.pairs = true,
                            "triples" => c.triples = true,
                            _ => return Err(bad(key, value, "expected single, pairs or triples")),
                        }
                    }
                    cfg.combinations = c;
                }
                "glcm_levels" => ex.glcm_levels = parse_num(key, value)?,
                "rlm_levels" => ex.rlm_levels = parse_num(key, value)?,
                "gmrf_denominator" => {
                    ex.gmrf.denominator = match value {
                        "printed" => VarianceDenominator::Printed,
                        "interior" => VarianceDenominator::Interior,
                        _ => return Err(bad(key, value, "expected printed or interior")),
                    }
                }
                "fbm_window_radius" => ex.fbm.window_radius = parse_num(key, value)?,
                "fbm_max_distance" => ex.fbm.max_distance = parse_num(key, value)?,
                "fbm_distance_bins" => ex.fbm.distance_bins = parse_num(key, value)?,
                "fbm_flat_as_plane" => ex.fbm.flat_as_plane = parse_bool(key, value)?,
                "acf_max_shift" => ex.acf.max_shift = parse_num(key, value)?,
                "acf_normalize" => ex.acf.normalize = parse_bool(key, value)?,
                "degenerate" => {
                    degenerate = match value {
                        "error" => DegeneratePolicy::Error,
                        "designated" => DegeneratePolicy::Designated,
                        _ => return Err(bad(key, value, "expected error or designated")),
                    }
                }
                "classifier" => {
                    cfg.fit.mode = value.parse::<CovarianceMode>().map_err(|e| bad(key, value, &e.to_string()))?
                }
                "ridge" => cfg.fit.ridge = parse_num(key, value)?,
                "standardize" => cfg.standardize = parse_bool(key, value)?,
                "cache_dir" => cfg.cache_dir = (!value.is_empty()).then(|| base_dir.join(value)),
                _ => return Err(HarnessError::Config(format!("line {}: unknown key `{key}`", lineno + 1))),
            }
        }
        cfg.extractors = cfg.extractors.with_degenerate(degenerate);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    /// Checks everything that does not need the image files.
    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(HarnessError::Config("methods must not be empty".into()));
        }
        let mut names = HashSet::new();
        for (_, class) in &self.images {
            if !names.insert(class) {
                return Err(HarnessError::Config(format!("class `{class}` listed twice")));
            }
        }
        if self.train_count == 0 {
            return Err(HarnessError::Config("train_count must be positive".into()));
        }
        if !(self.fit.ridge >= 0.0 && self.fit.ridge.is_finite()) {
            return Err(HarnessError::Config(format!("ridge {} must be finite and >= 0", self.fit.ridge)));
        }
        if self.combinations.enumerate(&self.methods).is_empty() {
            return Err(HarnessError::Config("no method combination selected".into()));
        }
        self.segmentation.validate()?;
        self.extractors
            .fbm
            .validate()
            .map_err(|e| HarnessError::Config(e.to_string()))?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documented_defaults_match_default() {
        let cfg = ExperimentConfig::parse(DOCUMENTED_DEFAULTS, Path::new("/x")).unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
    }

    #[test]
    fn full_config() {
        let text = "\
            image.D16 = a/D16.pgm\n\
            image.D20 = /abs/D20.pgm\n\
            # comment\n\
            methods = fbm, gmrf\n\
            combinations = pairs,triples\n\
            classifier = diagonal\n\
            degenerate = designated\n\
            boundary = clip\n\
            ridge = 0.001\n\
            cache_dir = cache\n";
        let cfg = ExperimentConfig::parse(text, Path::new("/base")).unwrap();
        assert_eq!(
            cfg.images,
            vec![
                (PathBuf::from("/base/a/D16.pgm"), "D16".to_string()),
                (PathBuf::from("/abs/D20.pgm"), "D20".to_string())
            ]
        );
        assert_eq!(cfg.methods, vec![Method::Fbm, Method::Gmrf]);
        assert!(!cfg.combinations.single && cfg.combinations.triples);
        assert_eq!(cfg.fit.mode, CovarianceMode::Diagonal);
        assert_eq!(cfg.extractors.gmrf.degenerate, DegeneratePolicy::Designated);
        assert_eq!(cfg.extractors.acf.degenerate, DegeneratePolicy::Designated);
        assert_eq!(cfg.segmentation.boundary, Boundary::Clip);
        assert_eq!(cfg.cache_dir, Some(PathBuf::from("/base/cache")));
    }

    #[test]
    fn rejects_bad_input() {
        let base = Path::new(".");
        for text in [
            "methods =\n",
            "methods = gmrf,lbp\n",
            "image.a = x\nimage.a = y\n",
            "seed = 1\nseed = 2\n",
            "colour = red\n",
            "stride = 0\n",
            "train_count = 0\n",
            "ridge = -1\n",
            "no equals sign\n",
            "combinations = pairs\nmethods = gmrf\n",
        ] {
            assert!(ExperimentConfig::parse(text, base).is_err(), "{text:?}");
        }
    }

    #[test]
    fn combination_counts() {
        let all = Combinations {
            single: true,
            pairs: true,
            triples: true,
        };
        let c = all.enumerate(&Method::ALL);
        assert_eq!(c.len(), 5 + 10 + 10);
        assert!(c.contains(&vec![Method::Gmrf, Method::Fbm, Method::Rlm]));
        let pairs = Combinations {
            single: false,
            pairs: true,
            triples: false,
        };
        assert_eq!(pairs.enumerate(&[Method::Acf, Method::Gmrf]), vec![vec![Method::Gmrf, Method::Acf]]);
    }
}
