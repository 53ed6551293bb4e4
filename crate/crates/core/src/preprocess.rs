//! Transforms applied before modeling: differencing and its inverse, min-max
//! scaling, moving-median gap filling, MAD outlier masking and classical
//! additive decomposition.

use serde::{Deserialize, Serialize};

use crate::series::TimeSeries;
use crate::{Error, Result};

pub const DEFAULT_MEDIAN_WINDOW: usize = 5;

/// Applies `(1 - B)^d` to a fully observed series.
pub fn difference(series: &TimeSeries, d: usize) -> Result<TimeSeries> {
    let values = series.observed()?;
    if d >= values.len() {
        return Err(Error::InsufficientLength {
            needed: d + 1,
            got: values.len(),
        });
    }
    let out = difference_slice(&values, d);
    let mut ts = TimeSeries::from_values(&out)?.with_start_index(series.start_index() + d as i64);
    if let Some(p) = series.period() {
        ts = ts.clone().with_period(p).unwrap_or(ts);
    }
    Ok(ts)
}

/// `(1 - B)^d` on raw values; the result has `len - d` entries.
pub fn difference_slice(values: &[f64], d: usize) -> Vec<f64> {
    let mut cur = values.to_vec();
    for _ in 0..d {
        cur = cur.windows(2).map(|w| w[1] - w[0]).collect();
    }
    cur
}

/// Inverts [`difference`]. `heads` are the last `d` values that precede the
/// differenced block, oldest first. The output is aligned right after them.
pub fn integrate(diffed: &TimeSeries, d: usize, heads: &[f64]) -> Result<TimeSeries> {
    let values = diffed.observed()?;
    let out = integrate_slice(&values, d, heads)?;
    Ok(TimeSeries::from_values(&out)?.with_start_index(diffed.start_index()))
}

pub fn integrate_slice(diffed: &[f64], d: usize, heads: &[f64]) -> Result<Vec<f64>> {
    if heads.len() != d {
        return Err(Error::ArityMismatch {
            expected: d,
            got: heads.len(),
        });
    }
    // last value of the k-th difference of the heads, k = 0..d
    let mut anchors = Vec::with_capacity(d);
    let mut cur = heads.to_vec();
    for _ in 0..d {
        anchors.push(*cur.last().expect("non-empty by construction"));
        cur = difference_slice(&cur, 1);
    }
    let mut out = diffed.to_vec();
    for &anchor in anchors.iter().rev() {
        let mut acc = anchor;
        for v in out.iter_mut() {
            acc += *v;
            *v = acc;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalizationParams {
    min: f64,
    max: f64,
}

impl NormalizationParams {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(max > min) || !min.is_finite() || !max.is_finite() {
            return Err(Error::DegenerateRange);
        }
        Ok(Self { min, max })
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn scale(&self, v: f64) -> f64 {
        (v - self.min) / (self.max - self.min)
    }

    pub fn unscale(&self, v: f64) -> f64 {
        v * (self.max - self.min) + self.min
    }
}

/// Maps observed values onto `[0, 1]`. Missing values stay missing.
pub fn normalize_min_max(series: &TimeSeries) -> Result<(TimeSeries, NormalizationParams)> {
    let (lo, hi) = series
        .values()
        .iter()
        .flatten()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    let params = NormalizationParams::new(lo, hi)?;
    let values = series
        .values()
        .iter()
        .map(|v| v.map(|x| params.scale(x).clamp(0.0, 1.0)))
        .collect();
    Ok((series.replace_values(values), params))
}

pub fn denormalize(series: &TimeSeries, params: &NormalizationParams) -> TimeSeries {
    let values = series
        .values()
        .iter()
        .map(|v| v.map(|x| params.unscale(x)))
        .collect();
    series.replace_values(values)
}

fn median_of(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Fills each gap with the median of the observed values in a centered
/// window of width `window`, truncated at the series edges. Observed values
/// pass through untouched and filled values never feed other gaps.
pub fn impute_moving_median(series: &TimeSeries, window: usize) -> Result<TimeSeries> {
    if window < 3 || window % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "median window must be odd and >= 3, got {window}"
        )));
    }
    let half = window / 2;
    let src = series.values();
    let n = src.len();
    let mut buf = Vec::with_capacity(window);
    let mut out = Vec::with_capacity(n);
    for (i, v) in src.iter().enumerate() {
        if v.is_some() {
            out.push(*v);
            continue;
        }
        buf.clear();
        let lo = i.saturating_sub(half);
        let hi = (i + half).min(n - 1);
        buf.extend(src[lo..=hi].iter().flatten());
        if buf.is_empty() {
            return Err(Error::UnfillableGap { index: i });
        }
        out.push(Some(median_of(&mut buf)));
    }
    Ok(series.replace_values(out))
}

/// Marks observations farther than `k` scaled MADs from the median as missing.
/// A zero MAD marks nothing.
pub fn mask_outliers_mad(series: &TimeSeries, k: f64) -> TimeSeries {
    const NORMAL_CONSISTENCY: f64 = 1.4826;
    let mut observed: Vec<f64> = series.values().iter().flatten().copied().collect();
    if observed.is_empty() {
        return series.clone();
    }
    let med = median_of(&mut observed);
    let mut dev: Vec<f64> = observed.iter().map(|v| (v - med).abs()).collect();
    let mad = NORMAL_CONSISTENCY * median_of(&mut dev);
    if mad == 0.0 {
        return series.clone();
    }
    let values = series
        .values()
        .iter()
        .map(|v| v.filter(|x| (x - med).abs() <= k * mad))
        .collect();
    series.replace_values(values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionResult {
    /// Centered moving average; missing near the edges.
    pub trend: Vec<Option<f64>>,
    pub seasonal: Vec<f64>,
    pub residual: Vec<Option<f64>>,
    pub period: usize,
}

/// Classical additive decomposition: centered moving-average trend (2×m
/// average for even periods), per-phase mean seasonal re-centered to zero,
/// and the remainder as residual.
pub fn decompose_additive(series: &TimeSeries, period: usize) -> Result<DecompositionResult> {
    let y = series.observed()?;
    let n = y.len();
    if period < 2 {
        return Err(Error::PeriodOutOfRange { period, len: n });
    }
    if n < 2 * period {
        return Err(Error::InsufficientLength {
            needed: 2 * period,
            got: n,
        });
    }

    let half = period / 2;
    let mut trend = vec![None; n];
    for t in half..n - half {
        let v = if period % 2 == 1 {
            y[t - half..=t + half].iter().sum::<f64>() / period as f64
        } else {
            let inner: f64 = y[t - half + 1..t + half].iter().sum();
            (0.5 * y[t - half] + inner + 0.5 * y[t + half]) / period as f64
        };
        trend[t] = Some(v);
    }

    let mut sums = vec![0.0; period];
    let mut counts = vec![0usize; period];
    for (t, tr) in trend.iter().enumerate() {
        if let Some(tr) = tr {
            sums[t % period] += y[t] - tr;
            counts[t % period] += 1;
        }
    }
    let mut phase: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| s / c as f64)
        .collect();
    let centre = phase.iter().sum::<f64>() / period as f64;
    phase.iter_mut().for_each(|s| *s -= centre);

    let seasonal: Vec<f64> = (0..n).map(|t| phase[t % period]).collect();
    let residual = trend
        .iter()
        .enumerate()
        .map(|(t, tr)| tr.map(|tr| y[t] - tr - seasonal[t]))
        .collect();
    Ok(DecompositionResult {
        trend,
        seasonal,
        residual,
        period,
    })
}
