use serde::{Deserialize, Serialize};

use super::metrics::{metrics, MetricsReport};
use crate::arima::{self, ArimaOrder};
use crate::series::TimeSeries;
use crate::{Error, Result};

pub const MIN_TRAIN_LEN: usize = 50;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub folds: Vec<MetricsReport>,
    pub mean_mae: f64,
    pub mean_rmse: f64,
    /// `(train_end, test_end)`: fold `i` trains on `[0, train_end)` and tests
    /// on `[train_end, test_end)`.
    pub fold_boundaries: Vec<(usize, usize)>,
}

/// Expanding-origin cut points `T_i = n - (folds - i + 1) * horizon`,
/// `i = 1..=folds`, so the last test window ends at the last observation.
pub fn cv_boundaries(n: usize, folds: usize, horizon: usize) -> Result<Vec<(usize, usize)>> {
    if folds < 2 {
        return Err(Error::InvalidArgument(format!("folds must be >= 2, got {folds}")));
    }
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be >= 1".into()));
    }
    let needed = folds * horizon + MIN_TRAIN_LEN;
    if n < needed {
        return Err(Error::InsufficientLength { needed, got: n });
    }
    Ok((1..=folds)
        .map(|i| {
            let cut = n - (folds - i + 1) * horizon;
            (cut, cut + horizon)
        })
        .collect())
}

/// Rolling-origin evaluation of a fixed order: refit on each expanding
/// training window and score the next `horizon` points.
pub fn rolling_origin_cv(series: &TimeSeries, folds: usize, horizon: usize, order: ArimaOrder) -> Result<CvReport> {
    let y = series.observed()?;
    let fold_boundaries = cv_boundaries(y.len(), folds, horizon)?;
    let mut reports = Vec::with_capacity(folds);
    for &(train_end, test_end) in &fold_boundaries {
        let train = TimeSeries::from_values(&y[..train_end])?;
        let (model, _) = arima::fit(&train, order)?;
        let predicted = arima::forecast(&model, horizon);
        reports.push(metrics(&y[train_end..test_end], &predicted)?);
    }
    let k = reports.len() as f64;
    Ok(CvReport {
        mean_mae: reports.iter().map(|r| r.mae).sum::<f64>() / k,
        mean_rmse: reports.iter().map(|r| r.rmse).sum::<f64>() / k,
        folds: reports,
        fold_boundaries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn boundary_example() {
        assert_eq!(cv_boundaries(102, 2, 1).unwrap(), vec![(100, 101), (101, 102)]);
        assert!(matches!(cv_boundaries(51, 2, 1), Err(Error::InsufficientLength { .. })));
        assert!(cv_boundaries(200, 1, 1).is_err());
        assert!(cv_boundaries(200, 2, 0).is_err());
    }

    #[test]
    fn constant_series_is_predicted_exactly() {
        let s = TimeSeries::from_values(&[3.5; 120]).unwrap();
        for order in ["0,0,0", "1,0,0", "1,0,1", "2,0,1"] {
            let r = rolling_origin_cv(&s, 3, 5, order.parse().unwrap()).unwrap();
            for f in &r.folds {
                assert!(f.mae < 1e-6, "{order}: {}", f.mae);
            }
        }
    }

    #[test]
    fn report_shape() {
        let y: Vec<f64> = (0..150).map(|t| (t as f64 * 0.3).sin() * 4.0 + t as f64 * 0.05).collect();
        let s = TimeSeries::from_values(&y).unwrap();
        let r = rolling_origin_cv(&s, 4, 6, "1,1,0".parse().unwrap()).unwrap();
        assert_eq!(r.folds.len(), 4);
        assert_eq!(r.fold_boundaries.last().unwrap().1, 150);
        assert!(r.folds.iter().all(|f| f.n == 6));
    }

    proptest! {
        #[test]
        fn no_leakage(n in 60usize..5000, folds in 2usize..12, horizon in 1usize..40) {
            prop_assume!(n >= folds * horizon + MIN_TRAIN_LEN);
            let b = cv_boundaries(n, folds, horizon).unwrap();
            let mut prev_train = 0;
            for &(train_end, test_end) in &b {
                prop_assert!(train_end > prev_train);
                prop_assert!(train_end >= MIN_TRAIN_LEN);
                prop_assert!(test_end == train_end + horizon && test_end <= n);
                prev_train = train_end;
            }
        }
    }
}
