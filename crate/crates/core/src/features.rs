//! Extractor identities and the feature-vector ordering contract.

use std::fmt;
use std::str::FromStr;

use crate::statxture::Direction;

/// The five extractors, in canonical concatenation order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Gmrf,
    Fbm,
    Glcm,
    Rlm,
    Acf,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Gmrf, Method::Fbm, Method::Glcm, Method::Rlm, Method::Acf];

    pub fn name(self) -> &'static str {
        match self {
            Method::Gmrf => "gmrf",
            Method::Fbm => "fbm",
            Method::Glcm => "glcm",
            Method::Rlm => "rlm",
            Method::Acf => "acf",
        }
    }

    /// Display label used in report tables.
    pub fn label(self) -> &'static str {
        match self {
            Method::Gmrf => "GMRF",
            Method::Fbm => "fBm",
            Method::Glcm => "GLCM",
            Method::Rlm => "RLM",
            Method::Acf => "ACF",
        }
    }

    /// Number of features the extractor emits per segment.
    pub fn width(self) -> usize {
        self.feature_names().len()
    }

    /// Column names `<method>.<feature>[.<direction>]` in output order.
    pub fn feature_names(self) -> Vec<String> {
        let prefix = self.name();
        let plain = |names: &[&str]| -> Vec<String> {
            names.iter().map(|n| format!("{prefix}.{n}")).collect()
        };
        let directional = |names: &[&str]| -> Vec<String> {
            Direction::ALL
                .iter()
                .flat_map(|d| names.iter().map(move |n| format!("{prefix}.{n}.{}", d.degrees())))
                .collect()
        };
        match self {
            Method::Gmrf => plain(&["alpha1", "alpha2", "alpha3", "alpha4", "alpha5", "alpha6", "sigma2"]),
            Method::Fbm => plain(&["mean", "variance", "lacunarity", "skewness", "kurtosis"]),
            Method::Glcm => directional(&crate::statxture::HARALICK_NAMES),
            Method::Rlm => directional(&crate::statxture::RLM_NAMES),
            Method::Acf => plain(&["amplitude.h", "decay.h", "amplitude.v", "decay.v"]),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        Method::ALL
            .into_iter()
            .find(|m| m.name() == lower)
            .ok_or_else(|| format!("unknown method `{s}` (expected gmrf, fbm, glcm, rlm or acf)"))
    }
}

/// What an extractor does when a segment is degenerate (flat patches, zero variance).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DegeneratePolicy {
    /// Fail with the extractor's error.
    #[default]
    Error,
    /// Emit the extractor's designated degenerate vector and flag it.
    Designated,
}

/// Ordered features of one segment, tagged with the extractor(s) that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub methods: Vec<Method>,
    pub values: Vec<f64>,
    /// Set when a degenerate mapping replaced the regular computation.
    pub degenerate: bool,
}

impl FeatureVector {
    pub fn new(method: Method, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), method.width());
        Self {
            methods: vec![method],
            values,
            degenerate: false,
        }
    }

    pub fn degenerate(method: Method, values: Vec<f64>) -> Self {
        Self {
            degenerate: true,
            ..Self::new(method, values)
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.methods.iter().flat_map(|m| m.feature_names()).collect()
    }
}
