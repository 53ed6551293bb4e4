use crate::arima::{self, ArimaModel, ArimaOrder};
use crate::series::TimeSeries;
use crate::{Error, Result};

use super::pool::run_pool;

pub const MIN_SEGMENT_LEN: usize = 50;

/// Splits a series into `segments` contiguous blocks whose sizes differ by
/// at most one; earlier blocks take the remainder.
pub fn segment_series(series: &TimeSeries, segments: usize) -> Result<Vec<TimeSeries>> {
    let len = series.len();
    if segments == 0 || segments * MIN_SEGMENT_LEN > len {
        return Err(Error::TooManySegments {
            len,
            segments,
            min: MIN_SEGMENT_LEN,
        });
    }
    let base = len / segments;
    let extra = len % segments;
    let mut out = Vec::with_capacity(segments);
    let mut from = 0;
    for i in 0..segments {
        let to = from + base + usize::from(i < extra);
        out.push(series.slice(from, to)?);
        from = to;
    }
    Ok(out)
}

/// Fits `order` to each segment independently on a pool of `workers`.
/// Element `i` is the result for segment `i`; failures stay in place.
pub fn fit_segments_parallel(
    segments: &[TimeSeries],
    order: ArimaOrder,
    workers: usize,
) -> Result<Vec<Result<ArimaModel>>> {
    let outcomes = run_pool(segments, workers, |s| arima::fit(s, order).map(|(m, _)| m))?;
    Ok(outcomes
        .into_iter()
        .map(|o| o.unwrap_or_else(|msg| Err(Error::WorkerFailure(msg))))
        .collect())
}

/// Fit-then-forecast for every segment, in input order.
pub fn forecast_segments_parallel(
    segments: &[TimeSeries],
    order: ArimaOrder,
    horizon: usize,
    workers: usize,
) -> Result<Vec<Result<Vec<f64>>>> {
    let outcomes = run_pool(segments, workers, |s| {
        arima::fit(s, order).map(|(m, _)| arima::forecast(&m, horizon))
    })?;
    Ok(outcomes
        .into_iter()
        .map(|o| o.unwrap_or_else(|msg| Err(Error::WorkerFailure(msg))))
        .collect())
}
