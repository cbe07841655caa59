use super::LabeledDataset;
use crate::imaging::Split;

/// Per-feature affine transform `(x - mean) / scale` fitted on training rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub mean: Vec<f64>,
    pub scale: Vec<f64>,
}

impl Standardizer {
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.mean.iter().zip(&self.scale))
            .map(|(v, (m, s))| (v - m) / s)
            .collect()
    }
}

/// Z-scores every row with train-split statistics. Constant columns are left
/// unchanged (offset 0, scale 1).
pub fn standardize(data: &LabeledDataset) -> (LabeledDataset, Standardizer) {
    let w = data.n_features();
    let train = data.indices(Split::Train);
    let m = train.len() as f64;
    let mut mean = vec![0.0; w];
    let mut scale = vec![1.0; w];
    if !train.is_empty() {
        for &i in &train {
            for (acc, v) in mean.iter_mut().zip(data.row(i)) {
                *acc += v;
            }
        }
        mean.iter_mut().for_each(|v| *v /= m);
        for (j, (mu, sc)) in mean.iter_mut().zip(scale.iter_mut()).enumerate() {
            let var = train.iter().map(|&i| (data.row(i)[j] - *mu).powi(2)).sum::<f64>() / m;
            if var > 0.0 {
                *sc = var.sqrt();
            } else {
                *mu = 0.0;
            }
        }
    }
    let t = Standardizer { mean, scale };
    let mut out = data.clone();
    for row in out.values_mut().chunks_mut(w.max(1)) {
        let z = t.apply(row);
        row.copy_from_slice(&z);
    }
    (out, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayes::{classify, fit, FitOptions};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn data(rows: Vec<Vec<f64>>, labels: Vec<usize>) -> LabeledDataset {
        let n = rows.len();
        let w = rows[0].len();
        let k = labels.iter().max().unwrap() + 1;
        LabeledDataset::new(
            vec![],
            (0..w).map(|i| format!("f{i}")).collect(),
            (0..k).map(|c| format!("c{c}")).collect(),
            (0..n).collect(),
            rows,
            labels,
            vec![Split::Train; n],
        )
        .unwrap()
    }

    #[test]
    fn constant_column_untouched() {
        let d = data(vec![vec![4.0, 1.0], vec![4.0, 3.0]], vec![0, 0]);
        let (z, t) = standardize(&d);
        assert_eq!(t.scale[0], 1.0);
        assert_eq!(z.row(0)[0], 4.0);
        assert_eq!(z.row(1)[0], 4.0);
    }

    #[test]
    fn train_columns_become_unit() {
        let rows: Vec<Vec<f64>> = (0..50).map(|i| vec![i as f64 * 3.0 + 7.0, (i * i) as f64]).collect();
        let (z, _) = standardize(&data(rows, vec![0; 50]));
        for j in 0..2 {
            let col: Vec<f64> = z.rows().map(|r| r[j]).collect();
            let mean = col.iter().sum::<f64>() / 50.0;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 50.0;
            assert!(mean.abs() < 1e-9);
            assert!((var - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn argmax_unchanged_on_equal_covariance_data() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let noise = Normal::new(0.0, 1.0).unwrap();
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for c in 0..3 {
            for _ in 0..60 {
                rows.push(vec![c as f64 * 2.0 + noise.sample(&mut rng), 50.0 * noise.sample(&mut rng) + c as f64 * 40.0]);
                labels.push(c);
            }
        }
        let raw = data(rows, labels);
        let (z, t) = standardize(&raw);
        let opts = FitOptions::default();
        let m_raw = fit(&raw, &opts).unwrap();
        let m_z = fit(&z, &opts).unwrap();
        for i in 0..raw.n_rows() {
            let a = classify(&m_raw, raw.row(i)).unwrap().label;
            let b = classify(&m_z, &t.apply(raw.row(i))).unwrap().label;
            assert_eq!(a, b, "row {i}");
        }
    }
}
