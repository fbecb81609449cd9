use ndarray::{Array1, Array2, ArrayView2, Axis};
use serde::{Deserialize, Serialize};

use super::ModelError;

/// Columns whose training spread is below this are left unscaled.
pub const MIN_STD: f64 = 1e-12;

/// Per-column `(x - mean) / std` fitted on training rows only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Array1<f64>,
    pub stds: Array1<f64>,
}

impl Standardizer {
    pub fn fit(x: ArrayView2<f64>) -> Result<Self, ModelError> {
        if x.nrows() == 0 {
            return Err(ModelError::EmptyTrainingSet);
        }
        let means = x.mean_axis(Axis(0)).expect("non-empty");
        let stds = x.std_axis(Axis(0), 0.0).mapv(|s| if s > MIN_STD { s } else { 1.0 });
        Ok(Self { means, stds })
    }

    pub fn n_features(&self) -> usize {
        self.means.len()
    }

    pub fn transform(&self, x: ArrayView2<f64>) -> Result<Array2<f64>, ModelError> {
        if x.ncols() != self.n_features() {
            return Err(ModelError::DimensionMismatch { expected: self.n_features(), got: x.ncols() });
        }
        let mut out = x.to_owned();
        for mut row in out.rows_mut() {
            row -= &self.means;
            row /= &self.stds;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use proptest::prelude::*;

    #[test]
    fn two_point_column() {
        let x = array![[0.0, 5.0], [2.0, 5.0]];
        let s = Standardizer::fit(x.view()).unwrap();
        let z = s.transform(x.view()).unwrap();
        assert_eq!(z, array![[-1.0, 0.0], [1.0, 0.0]]);
    }

    #[test]
    fn second_application_is_not_identity() {
        let x = array![[0.0], [4.0]];
        let s = Standardizer::fit(x.view()).unwrap();
        let once = s.transform(x.view()).unwrap();
        let twice = s.transform(once.view()).unwrap();
        assert_ne!(once, twice);
    }

    #[test]
    fn empty_and_mismatched_inputs() {
        let empty = Array2::<f64>::zeros((0, 3));
        assert!(matches!(Standardizer::fit(empty.view()), Err(ModelError::EmptyTrainingSet)));
        let s = Standardizer::fit(array![[1.0, 2.0]].view()).unwrap();
        assert!(matches!(s.transform(array![[1.0]].view()), Err(ModelError::DimensionMismatch { .. })));
    }

    proptest! {
        #[test]
        fn training_columns_are_centred_and_scaled(v in proptest::collection::vec(-100.0f64..100.0, 30)) {
            let x = Array2::from_shape_vec((10, 3), v).unwrap();
            let s = Standardizer::fit(x.view()).unwrap();
            let z = s.transform(x.view()).unwrap();
            for (j, col) in z.columns().into_iter().enumerate() {
                prop_assert!(col.mean().unwrap().abs() < 1e-9);
                if x.column(j).std(0.0) > MIN_STD {
                    prop_assert!((col.std(0.0) - 1.0).abs() < 1e-9);
                }
            }
        }
    }
}
