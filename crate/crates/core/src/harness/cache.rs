//! Write-once store of per-method feature matrices keyed by a hash of the
//! segment set and the extractor settings.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use sha2::{Digest, Sha256};

use super::extract::{extract_method, ExtractorConfigs};
use super::features_csv::{load_features, save_features};
use super::Result;
use crate::bayes::LabeledDataset;
use crate::features::Method;
use crate::imaging::{Segment, Split};

/// Hash of everything that determines the rows of a feature matrix.
pub fn segment_set_hash(segments: &[Segment], splits: &[Split], class_names: &[String]) -> String {
    let mut h = Sha256::new();
    h.update((class_names.len() as u64).to_le_bytes());
    for c in class_names {
        h.update((c.len() as u64).to_le_bytes());
        h.update(c.as_bytes());
    }
    h.update((segments.len() as u64).to_le_bytes());
    for (s, split) in segments.iter().zip(splits) {
        for v in [s.pixels.width(), s.pixels.height(), s.origin.0, s.origin.1, s.label] {
            h.update((v as u64).to_le_bytes());
        }
        h.update([*split as u8]);
        h.update(s.pixels.pixels());
    }
    hex(&h.finalize())
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone)]
struct Entry {
    data: Arc<LabeledDataset>,
    degenerate: usize,
}

/// In-memory cache, optionally backed by a directory of feature CSVs.
/// Entries are never replaced once written.
#[derive(Debug, Default)]
pub struct FeatureCache {
    dir: Option<PathBuf>,
    memory: Mutex<HashMap<String, Entry>>,
}

impl FeatureCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn persistent(dir: impl AsRef<Path>) -> Result<Self> {
        std::fs::create_dir_all(dir.as_ref())?;
        Ok(Self {
            dir: Some(dir.as_ref().to_path_buf()),
            memory: Mutex::default(),
        })
    }

    pub fn key(set_hash: &str, method: Method, cfg: &ExtractorConfigs) -> String {
        let mut h = Sha256::new();
        h.update(set_hash.as_bytes());
        h.update(method.name().as_bytes());
        h.update(cfg.fingerprint(method).as_bytes());
        format!("{}-{}", method.name(), &hex(&h.finalize())[..32])
    }

    /// Feature matrix for `method`, extracted at most once per key. Returns the
    /// number of degenerate segments recorded at extraction time.
    pub fn get_or_extract(
        &self,
        set_hash: &str,
        segments: &[Segment],
        splits: &[Split],
        class_names: &[String],
        method: Method,
        cfg: &ExtractorConfigs,
    ) -> Result<(Arc<LabeledDataset>, usize)> {
        let key = Self::key(set_hash, method, cfg);
        if let Some(e) = self.memory.lock().unwrap().get(&key) {
            return Ok((e.data.clone(), e.degenerate));
        }
        let entry = match self.load(&key, class_names)? {
            Some(e) => e,
            None => {
                let (data, degenerate) = extract_method(segments, splits, class_names, method, cfg)?;
                let e = Entry {
                    data: Arc::new(data),
                    degenerate,
                };
                self.store(&key, &e)?;
                e
            }
        };
        let mut mem = self.memory.lock().unwrap();
        let e = mem.entry(key).or_insert(entry);
        Ok((e.data.clone(), e.degenerate))
    }

    fn paths(&self, key: &str) -> Option<(PathBuf, PathBuf)> {
        self.dir
            .as_ref()
            .map(|d| (d.join(format!("{key}.csv")), d.join(format!("{key}.degenerate"))))
    }

    fn load(&self, key: &str, class_names: &[String]) -> Result<Option<Entry>> {
        let Some((csv_path, meta_path)) = self.paths(key) else {
            return Ok(None);
        };
        if !csv_path.exists() || !meta_path.exists() {
            return Ok(None);
        }
        let data = load_features(&csv_path, Some(class_names))?;
        let degenerate = std::fs::read_to_string(&meta_path)?.trim().parse().unwrap_or(0);
        log::debug!("feature cache hit {key}");
        Ok(Some(Entry {
            data: Arc::new(data),
            degenerate,
        }))
    }

    fn store(&self, key: &str, e: &Entry) -> Result<()> {
        let Some((csv_path, meta_path)) = self.paths(key) else {
            return Ok(());
        };
        if csv_path.exists() {
            return Ok(());
        }
        let tmp = csv_path.with_extension(format!("csv.tmp{}", std::process::id()));
        save_features(&tmp, &e.data)?;
        std::fs::write(&meta_path, e.degenerate.to_string())?;
        std::fs::rename(&tmp, &csv_path)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::{segment_image, SegmentationConfig};
    use crate::GrayImage;

    fn setup() -> (Vec<Segment>, Vec<Split>, Vec<String>) {
        let img = GrayImage::from_fn(64, 64, |r, c| ((r * r + 3 * c) % 251) as u8).unwrap();
        let segs = segment_image(&img, &SegmentationConfig::default(), 0).unwrap();
        let splits = (0..segs.len()).map(|i| if i < 4 { Split::Train } else { Split::Test }).collect();
        (segs, splits, vec!["only".into()])
    }

    #[test]
    fn hash_tracks_pixels_and_splits() {
        let (segs, splits, names) = setup();
        let base = segment_set_hash(&segs, &splits, &names);
        assert_eq!(base, segment_set_hash(&segs, &splits, &names));
        let mut flipped = splits.clone();
        flipped[0] = Split::Test;
        assert_ne!(base, segment_set_hash(&segs, &flipped, &names));
        let mut touched = segs.clone();
        touched[2].pixels = GrayImage::filled(32, 32, 0).unwrap();
        assert_ne!(base, segment_set_hash(&touched, &splits, &names));
    }

    #[test]
    fn keys_differ_by_method_and_config() {
        let cfg = ExtractorConfigs::default();
        let k = FeatureCache::key("abc", Method::Glcm, &cfg);
        assert_ne!(k, FeatureCache::key("abc", Method::Rlm, &cfg));
        let other = ExtractorConfigs { glcm_levels: 8, ..cfg };
        assert_ne!(k, FeatureCache::key("abc", Method::Glcm, &other));
        let back = ExtractorConfigs { glcm_levels: 32, ..other };
        assert_eq!(k, FeatureCache::key("abc", Method::Glcm, &back));
    }

    #[test]
    fn persistent_cache_reloads_identical_matrix() {
        let dir = tempfile::tempdir().unwrap();
        let (segs, splits, names) = setup();
        let hash = segment_set_hash(&segs, &splits, &names);
        let cfg = ExtractorConfigs::default();
        let first = FeatureCache::persistent(dir.path()).unwrap();
        let (a, _) = first.get_or_extract(&hash, &segs, &splits, &names, Method::Acf, &cfg).unwrap();
        let files = std::fs::read_dir(dir.path()).unwrap().count();
        assert_eq!(files, 2);
        let second = FeatureCache::persistent(dir.path()).unwrap();
        // a hit must not look at the segments at all
        let (b, n) = second.get_or_extract(&hash, &[], &[], &names, Method::Acf, &cfg).unwrap();
        assert_eq!(*a, *b);
        assert_eq!(n, 0);
    }
}
