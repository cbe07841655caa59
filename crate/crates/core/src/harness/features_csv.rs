//! Feature tables on disk: `segment_id,class,split,<method>.<feature>[.<direction>]...`.
//!
//! Values are written with the shortest representation that parses back to
//! the same `f64`, so a write/read cycle is exact.

use std::io::{Read, Write};
use std::path::Path;

use super::{HarnessError, Result};
use crate::bayes::LabeledDataset;
use crate::features::Method;
use crate::imaging::Split;

const FIXED_COLUMNS: [&str; 3] = ["segment_id", "class", "split"];

pub fn write_features<W: Write>(out: W, data: &LabeledDataset) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(FIXED_COLUMNS.iter().copied().chain(data.feature_names.iter().map(String::as_str)))?;
    for i in 0..data.n_rows() {
        let mut rec = vec![
            data.segment_ids[i].to_string(),
            data.class_names[data.labels[i]].clone(),
            data.splits[i].as_str().to_string(),
        ];
        rec.extend(data.row(i).iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_features(path: impl AsRef<Path>, data: &LabeledDataset) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_features(std::io::BufWriter::new(file), data)
}

/// Parses a feature table. Class indices follow `class_names` when given,
/// otherwise the order in which classes first appear.
pub fn read_features<R: Read>(input: R, class_names: Option<&[String]>) -> Result<LabeledDataset> {
    let mut rd = csv::Reader::from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header.len() < FIXED_COLUMNS.len() || header[..3] != FIXED_COLUMNS {
        return Err(HarnessError::Format(format!(
            "feature table must start with {}",
            FIXED_COLUMNS.join(",")
        )));
    }
    let feature_names = header[3..].to_vec();
    let mut methods: Vec<Method> = Vec::new();
    for name in &feature_names {
        let prefix = name.split('.').next().unwrap_or_default();
        let m: Method = prefix
            .parse()
            .map_err(|e: String| HarnessError::Format(format!("column `{name}`: {e}")))?;
        if methods.last() != Some(&m) {
            methods.push(m);
        }
    }
    let mut classes: Vec<String> = class_names.map(<[String]>::to_vec).unwrap_or_default();
    let fixed_classes = class_names.is_some();
    let (mut ids, mut labels, mut splits, mut rows) = (vec![], vec![], vec![], vec![]);
    for (line, rec) in rd.records().enumerate() {
        let rec = rec?;
        let bad = |what: &str| HarnessError::Format(format!("row {}: bad {what}", line + 1));
        ids.push(rec[0].parse::<usize>().map_err(|_| bad("segment_id"))?);
        let class = &rec[1];
        let label = match classes.iter().position(|c| c == class) {
            Some(l) => l,
            None if !fixed_classes => {
                classes.push(class.to_string());
                classes.len() - 1
            }
            None => return Err(bad("class")),
        };
        labels.push(label);
        splits.push(rec[2].parse::<Split>().map_err(|_| bad("split"))?);
        let row = rec
            .iter()
            .skip(3)
            .map(|v| v.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| bad("feature value"))?;
        rows.push(row);
    }
    Ok(LabeledDataset::new(methods, feature_names, classes, ids, rows, labels, splits)?)
}

pub fn load_features(path: impl AsRef<Path>, class_names: Option<&[String]>) -> Result<LabeledDataset> {
    let file = std::fs::File::open(path)?;
    read_features(std::io::BufReader::new(file), class_names)
}
