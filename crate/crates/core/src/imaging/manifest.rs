//! Segment lists on disk: one PGM per segment plus `manifest.csv`
//! with columns `path,class,origin_row,origin_col,split`.

use std::fs;
use std::path::{Path, PathBuf};

use super::{load_pgm, save_pgm, ImagingError, Result, Segment, Split};

pub const MANIFEST_FILE: &str = "manifest.csv";

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    /// PGM path relative to the manifest's directory.
    pub path: String,
    pub class: String,
    pub segment: Segment,
    pub split: Split,
}

fn manifest_err(e: impl std::fmt::Display) -> ImagingError {
    ImagingError::Manifest(e.to_string())
}

/// Writes every segment as `seg_<index>.pgm` under `dir` and returns the manifest path.
pub fn write_segment_manifest(
    dir: impl AsRef<Path>,
    segments: &[Segment],
    splits: &[Split],
    class_names: &[String],
) -> Result<PathBuf> {
    let dir = dir.as_ref();
    if segments.len() != splits.len() {
        return Err(manifest_err(format!(
            "{} segments but {} split marks",
            segments.len(),
            splits.len()
        )));
    }
    fs::create_dir_all(dir)?;
    let manifest_path = dir.join(MANIFEST_FILE);
    let mut writer = csv::Writer::from_path(&manifest_path).map_err(manifest_err)?;
    writer
        .write_record(["path", "class", "origin_row", "origin_col", "split"])
        .map_err(manifest_err)?;
    for (idx, (seg, split)) in segments.iter().zip(splits).enumerate() {
        let class = class_names
            .get(seg.label)
            .ok_or_else(|| manifest_err(format!("no class name for label {}", seg.label)))?;
        let file = format!("seg_{idx:05}.pgm");
        save_pgm(dir.join(&file), &seg.pixels)?;
        writer
            .write_record([
                file.as_str(),
                class.as_str(),
                &seg.origin.0.to_string(),
                &seg.origin.1.to_string(),
                split.as_str(),
            ])
            .map_err(manifest_err)?;
    }
    writer.flush()?;
    Ok(manifest_path)
}

/// Loads a manifest and its segments. Class labels are assigned in order of
/// first appearance; the returned names are indexed by label.
pub fn read_segment_manifest(path: impl AsRef<Path>) -> Result<(Vec<ManifestEntry>, Vec<String>)> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or(Path::new("."));
    let mut reader = csv::Reader::from_path(path).map_err(manifest_err)?;
    let headers = reader.headers().map_err(manifest_err)?.clone();
    let expected = ["path", "class", "origin_row", "origin_col", "split"];
    if headers.iter().ne(expected.iter().copied()) {
        return Err(manifest_err(format!("unexpected header {:?}", headers)));
    }
    let mut class_names: Vec<String> = Vec::new();
    let mut entries = Vec::new();
    for record in reader.records() {
        let record = record.map_err(manifest_err)?;
        let file = record[0].to_string();
        let class = record[1].to_string();
        let row: usize = record[2].parse().map_err(manifest_err)?;
        let col: usize = record[3].parse().map_err(manifest_err)?;
        let split: Split = record[4].parse().map_err(manifest_err)?;
        let label = match class_names.iter().position(|c| *c == class) {
            Some(i) => i,
            None => {
                class_names.push(class.clone());
                class_names.len() - 1
            }
        };
        let pixels = load_pgm(base.join(&file))?;
        entries.push(ManifestEntry {
            path: file,
            class,
            segment: Segment {
                pixels,
                origin: (row, col),
                label,
            },
            split,
        });
    }
    Ok((entries, class_names))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::{segment_image, split_assignment, GrayImage, SegmentationConfig};

    #[test]
    fn manifest_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let a = GrayImage::from_fn(64, 64, |r, c| (r * 3 + c) as u8).unwrap();
        let b = GrayImage::from_fn(64, 64, |r, c| (r ^ c) as u8).unwrap();
        let cfg = SegmentationConfig::default();
        let mut segs = segment_image(&a, &cfg, 0).unwrap();
        segs.extend(segment_image(&b, &cfg, 1).unwrap());
        let labels: Vec<_> = segs.iter().map(|s| s.label).collect();
        let splits = split_assignment(&labels, 4, 9).unwrap();
        let names = vec!["D16".to_string(), "D20".to_string()];
        let path = write_segment_manifest(dir.path(), &segs, &splits, &names).unwrap();

        let (entries, classes) = read_segment_manifest(&path).unwrap();
        assert_eq!(classes, names);
        assert_eq!(entries.len(), segs.len());
        for ((e, s), sp) in entries.iter().zip(&segs).zip(&splits) {
            assert_eq!(&e.segment, s);
            assert_eq!(e.split, *sp);
        }
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("path,class,origin_row,origin_col,split\n"));
    }
}
