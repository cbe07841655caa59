//! Versioned little-endian model file.
//!
//! ```text
//! magic     8 bytes  "TXFSGBM\0"
//! version   u32      1
//! endian    u8       b'L'
//! mode      u8       0 = full covariance, 1 = diagonal
//! classes   u32
//! features  u32
//! per class:
//!   label   u32
//!   name    u32 length + UTF-8 bytes
//!   mean    features x f64
//!   cov     features² x f64, row-major, before regularization
//!   ridge   f64 (regularization_used)
//! ```
//!
//! Precision and log-determinant are rebuilt on load by the same code path
//! as fitting, so a round trip is bit-exact.

use std::path::Path;

use nalgebra::{DMatrix, DVector};

use super::{BayesError, ClassModel, CovarianceMode, Result};

pub const MODEL_MAGIC: &[u8; 8] = b"TXFSGBM\0";
pub const MODEL_VERSION: u32 = 1;

pub fn encode_models(models: &[ClassModel], mode: CovarianceMode) -> Vec<u8> {
    let n = models.first().map_or(0, |m| m.dim());
    let mut out = Vec::new();
    out.extend_from_slice(MODEL_MAGIC);
    out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    out.push(b'L');
    out.push(match mode {
        CovarianceMode::Full => 0,
        CovarianceMode::Diagonal => 1,
    });
    out.extend_from_slice(&(models.len() as u32).to_le_bytes());
    out.extend_from_slice(&(n as u32).to_le_bytes());
    for m in models {
        out.extend_from_slice(&(m.label as u32).to_le_bytes());
        out.extend_from_slice(&(m.name.len() as u32).to_le_bytes());
        out.extend_from_slice(m.name.as_bytes());
        for v in m.mean.iter() {
            out.extend_from_slice(&v.to_le_bytes());
        }
        for r in 0..n {
            for c in 0..n {
                out.extend_from_slice(&m.covariance[(r, c)].to_le_bytes());
            }
        }
        out.extend_from_slice(&m.regularization_used.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| BayesError::Format(format!("truncated at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

pub fn decode_models(bytes: &[u8]) -> Result<(Vec<ClassModel>, CovarianceMode)> {
    let mut rd = Reader { buf: bytes, pos: 0 };
    if rd.take(8)? != MODEL_MAGIC {
        return Err(BayesError::Format("bad magic".into()));
    }
    let version = rd.u32()?;
    if version != MODEL_VERSION {
        return Err(BayesError::Format(format!("unsupported version {version}")));
    }
    if rd.u8()? != b'L' {
        return Err(BayesError::Format("unsupported endianness marker".into()));
    }
    let mode = match rd.u8()? {
        0 => CovarianceMode::Full,
        1 => CovarianceMode::Diagonal,
        other => return Err(BayesError::Format(format!("unknown mode {other}"))),
    };
    let classes = rd.u32()? as usize;
    let n = rd.u32()? as usize;
    let mut models = Vec::with_capacity(classes);
    for _ in 0..classes {
        let label = rd.u32()? as usize;
        let len = rd.u32()? as usize;
        let name = String::from_utf8(rd.take(len)?.to_vec())
            .map_err(|_| BayesError::Format("class name is not UTF-8".into()))?;
        let mean = (0..n).map(|_| rd.f64()).collect::<Result<Vec<_>>>()?;
        let cov = (0..n * n).map(|_| rd.f64()).collect::<Result<Vec<_>>>()?;
        let ridge = rd.f64()?;
        let model = ClassModel::from_parts(
            label,
            name.clone(),
            DVector::from_vec(mean),
            DMatrix::from_row_slice(n, n, &cov),
            ridge,
        )
        .ok_or_else(|| BayesError::Format(format!("class `{name}` has an ill-conditioned covariance")))?;
        models.push(model);
    }
    if rd.pos != bytes.len() {
        return Err(BayesError::Format(format!("{} trailing bytes", bytes.len() - rd.pos)));
    }
    Ok((models, mode))
}

pub fn save_models(path: impl AsRef<Path>, models: &[ClassModel], mode: CovarianceMode) -> Result<()> {
    std::fs::write(path, encode_models(models, mode))?;
    Ok(())
}

pub fn load_models(path: impl AsRef<Path>) -> Result<(Vec<ClassModel>, CovarianceMode)> {
    decode_models(&std::fs::read(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::{fit, FitOptions, LabeledDataset};
    use crate::imaging::Split;
    use proptest::prelude::*;

    fn models_from(seed_rows: &[Vec<f64>]) -> Vec<ClassModel> {
        let n = seed_rows.len();
        let w = seed_rows[0].len();
        let d = LabeledDataset::new(
            vec![],
            (0..w).map(|i| format!("f{i}")).collect(),
            vec!["D16".into(), "D20 canvas".into()],
            (0..n).collect(),
            seed_rows.to_vec(),
            (0..n).map(|i| i % 2).collect(),
            vec![Split::Train; n],
        )
        .unwrap();
        fit(&d, &FitOptions::default()).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn roundtrip_is_bit_exact(rows in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 3), 4..12)) {
            let models = models_from(&rows);
            let bytes = encode_models(&models, CovarianceMode::Full);
            let (back, mode) = decode_models(&bytes).unwrap();
            prop_assert_eq!(mode, CovarianceMode::Full);
            prop_assert_eq!(&back, &models);
            prop_assert_eq!(encode_models(&back, mode), bytes);
        }
    }

    #[test]
    fn rejects_corruption() {
        let models = models_from(&[vec![1.0, 2.0], vec![0.0, 1.0], vec![3.0, -1.0], vec![2.0, 2.0], vec![0.5, 0.1], vec![1.5, 0.2]]);
        let bytes = encode_models(&models, CovarianceMode::Diagonal);
        assert!(decode_models(&bytes[..bytes.len() - 3]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(decode_models(&bad).is_err());
        let mut bad = bytes.clone();
        bad[12] = b'B';
        assert!(decode_models(&bad).is_err());
        let mut long = bytes.clone();
        long.push(0);
        assert!(decode_models(&long).is_err());
    }
}
