use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{GrayImage, ImagingError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    /// Windows past the right or bottom edge wrap toroidally.
    Wrap,
    /// Only windows fully inside the image are emitted.
    Clip,
}

impl Boundary {
    pub fn as_str(self) -> &'static str {
        match self {
            Boundary::Wrap => "wrap",
            Boundary::Clip => "clip",
        }
    }
}

impl std::str::FromStr for Boundary {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "wrap" => Ok(Boundary::Wrap),
            "clip" => Ok(Boundary::Clip),
            other => Err(format!("unknown boundary mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SegmentationConfig {
    pub segment_size: usize,
    pub stride: usize,
    pub boundary: Boundary,
}

impl Default for SegmentationConfig {
    /// 32x32 windows with 50% overlap, wrapped at the border.
    fn default() -> Self {
        Self {
            segment_size: 32,
            stride: 16,
            boundary: Boundary::Wrap,
        }
    }
}

impl SegmentationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.segment_size == 0 {
            return Err(ImagingError::InvalidSegmentation(
                "segment_size must be positive".into(),
            ));
        }
        if self.stride == 0 || self.stride > self.segment_size {
            return Err(ImagingError::InvalidSegmentation(format!(
                "stride {} must lie in [1, {}]",
                self.stride, self.segment_size
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub pixels: GrayImage,
    /// (row, col) of the window's top-left corner in the source image.
    pub origin: (usize, usize),
    pub label: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

impl std::str::FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            other => Err(format!("unknown split `{other}`")),
        }
    }
}

/// Cuts `img` into square windows at every stride multiple, row-major by origin.
pub fn segment_image(img: &GrayImage, cfg: &SegmentationConfig, label: usize) -> Result<Vec<Segment>> {
    cfg.validate()?;
    let (w, h, size) = (img.width(), img.height(), cfg.segment_size);
    if size > w.min(h) {
        return Err(ImagingError::SegmentTooLarge {
            size,
            width: w,
            height: h,
        });
    }
    let (row_limit, col_limit) = match cfg.boundary {
        Boundary::Wrap => (h, w),
        Boundary::Clip => (h - size + 1, w - size + 1),
    };
    let mut out = Vec::new();
    for r0 in (0..row_limit).step_by(cfg.stride) {
        for c0 in (0..col_limit).step_by(cfg.stride) {
            let pixels = GrayImage::from_fn(size, size, |r, c| img.get((r0 + r) % h, (c0 + c) % w))?;
            out.push(Segment {
                pixels,
                origin: (r0, c0),
                label,
            });
        }
    }
    Ok(out)
}

/// Assigns each item to train or test so that every label gets exactly
/// `train_count` training items, chosen by a seeded permutation per label.
pub fn split_assignment(labels: &[usize], train_count: usize, seed: u64) -> Result<Vec<Split>> {
    if train_count == 0 {
        return Err(ImagingError::EmptyTrainSplit);
    }
    let mut by_label: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for (idx, &label) in labels.iter().enumerate() {
        by_label.entry(label).or_default().push(idx);
    }
    let mut splits = vec![Split::Test; labels.len()];
    for (label, mut members) in by_label {
        if train_count >= members.len() {
            return Err(ImagingError::NotEnoughSegments {
                label,
                available: members.len(),
                requested: train_count,
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(label as u64);
        members.shuffle(&mut rng);
        for &idx in &members[..train_count] {
            splits[idx] = Split::Train;
        }
    }
    Ok(splits)
}

/// Partitions segments per class; both outputs keep the input order.
pub fn split_train_test(
    segments: &[Segment],
    train_count: usize,
    seed: u64,
) -> Result<(Vec<Segment>, Vec<Segment>)> {
    let labels: Vec<usize> = segments.iter().map(|s| s.label).collect();
    let splits = split_assignment(&labels, train_count, seed)?;
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (seg, split) in segments.iter().zip(splits) {
        match split {
            Split::Train => train.push(seg.clone()),
            Split::Test => test.push(seg.clone()),
        }
    }
    Ok((train, test))
}
