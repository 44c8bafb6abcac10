use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};

// Features whose training standard deviation is below this are treated as constant.
const STD_FLOOR: f64 = 1e-12;

/// Z-score standardization fitted on a training fold. Missing values are
/// imputed with the training mean, which standardizes to 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Transformer {
    means: Vec<f64>,
    /// `None` marks a constant feature, mapped to 0.
    scales: Vec<Option<f64>>,
}

impl Transformer {
    pub fn fit(data: &Dataset, rows: &[usize]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::Empty("training fold"));
        }
        let x = data.features();
        let mut means = Vec::with_capacity(x.ncols());
        let mut scales = Vec::with_capacity(x.ncols());
        for col in x.columns() {
            let seen: Vec<f64> = rows.iter().map(|&i| col[i]).filter(|v| !v.is_nan()).collect();
            if seen.is_empty() {
                means.push(0.0);
                scales.push(None);
                continue;
            }
            let n = seen.len() as f64;
            let mean = seen.iter().sum::<f64>() / n;
            let var = seen.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            means.push(mean);
            scales.push((var.sqrt() > STD_FLOOR).then(|| var.sqrt()));
        }
        Ok(Transformer { means, scales })
    }

    pub fn num_features(&self) -> usize {
        self.means.len()
    }

    pub fn apply_row(&self, x: &[f64]) -> Result<Vec<f64>> {
        Error::check_len(self.means.len(), x.len())?;
        Ok(x.iter()
            .zip(self.means.iter().zip(&self.scales))
            .map(|(&v, (&mean, scale))| match scale {
                Some(s) if !v.is_nan() => (v - mean) / s,
                _ => 0.0,
            })
            .collect())
    }

    pub fn apply(&self, data: &Dataset) -> Result<Dataset> {
        Error::check_len(self.means.len(), data.num_features())?;
        let x = data.features();
        let mut out = Array2::<f64>::zeros(x.dim());
        for (i, row) in x.rows().into_iter().enumerate() {
            let t = self.apply_row(&row.to_vec())?;
            out.row_mut(i).assign(&ndarray::Array1::from(t));
        }
        Ok(data
            .with_features(out, data.feature_names().to_vec())?
            .with_provenance("zscore"))
    }
}

/// Fits a [`Transformer`] on `train_rows` and returns the transformed training rows with it.
pub fn preprocess(data: &Dataset, train_rows: &[usize]) -> Result<(Dataset, Transformer)> {
    let t = Transformer::fit(data, train_rows)?;
    let train = t.apply(&data.select(train_rows)?)?;
    Ok((train, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::labels::LabelVector;
    use ndarray::array;

    fn data(x: Array2<f64>) -> Dataset {
        let n = x.nrows();
        Dataset::from_parts(x, vec![LabelVector::zeros(1); n]).unwrap()
    }

    #[test]
    fn standardizes_with_training_statistics() {
        // Training values 3 and 7: mean 5, standard deviation 2.
        let d = data(array![[3.0, 1.0], [7.0, 1.0], [100.0, 9.0]]);
        let (train, t) = preprocess(&d, &[0, 1]).unwrap();
        assert_eq!(train.features(), array![[-1.0, 0.0], [1.0, 0.0]]);
        assert_eq!(t.apply_row(&[7.0, 5.0]).unwrap(), vec![1.0, 0.0]);
        assert_eq!(t.apply_row(&[100.0, 9.0]).unwrap()[0], 47.5);
    }

    #[test]
    fn missing_values_become_the_training_mean() {
        let d = data(array![[1.0], [f64::NAN], [3.0]]);
        let (train, t) = preprocess(&d, &[0, 1, 2]).unwrap();
        assert_eq!(train.features()[[1, 0]], 0.0);
        assert!(!train.has_missing());
        assert_eq!(t.apply_row(&[f64::NAN]).unwrap(), vec![0.0]);
    }

    #[test]
    fn single_application_only() {
        let d = data(array![[0.0], [10.0]]);
        let (train, t) = preprocess(&d, &[0, 1]).unwrap();
        assert_eq!(train.features(), array![[-1.0], [1.0]]);
        // Applying again standardizes with the original statistics (mean 5, std 5).
        let twice = t.apply(&train).unwrap();
        assert_eq!(twice.features(), array![[-1.2], [-0.8]]);
        assert!(preprocess(&d, &[]).is_err());
    }
}
