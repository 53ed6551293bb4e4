//! Index-based time-series container with explicit missing observations.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// An ordered sequence of observations. A `None` entry is a missing value;
/// gaps are always stored explicitly so indices stay contiguous.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    values: Vec<Option<f64>>,
    start_index: i64,
    period: Option<usize>,
}

impl TimeSeries {
    pub fn new(values: Vec<Option<f64>>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        Ok(Self {
            values,
            start_index: 0,
            period: None,
        })
    }

    /// Builds a fully observed series.
    pub fn from_values(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().copied().map(Some).collect())
    }

    pub fn with_start_index(mut self, start_index: i64) -> Self {
        self.start_index = start_index;
        self
    }

    /// Attaches seasonal period metadata; requires `2 <= period <= len/2`.
    pub fn with_period(mut self, period: usize) -> Result<Self> {
        if period < 2 || period > self.len() / 2 {
            return Err(Error::PeriodOutOfRange {
                period,
                len: self.len(),
            });
        }
        self.period = Some(period);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn start_index(&self) -> i64 {
        self.start_index
    }

    pub fn period(&self) -> Option<usize> {
        self.period
    }

    pub fn values(&self) -> &[Option<f64>] {
        &self.values
    }

    pub fn missing_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }

    pub fn has_missing(&self) -> bool {
        self.values.iter().any(Option::is_none)
    }

    /// Returns the observations as plain floats, failing on any gap.
    pub fn observed(&self) -> Result<Vec<f64>> {
        self.values
            .iter()
            .map(|v| v.ok_or(Error::MissingData))
            .collect()
    }

    /// Contiguous sub-series `[from, to)`; period metadata is dropped if it no
    /// longer fits.
    pub fn slice(&self, from: usize, to: usize) -> Result<Self> {
        if from >= to || to > self.len() {
            return Err(Error::InvalidArgument(format!(
                "slice {from}..{to} out of bounds for length {}",
                self.len()
            )));
        }
        let period = self.period.filter(|&p| p <= (to - from) / 2);
        Ok(Self {
            values: self.values[from..to].to_vec(),
            start_index: self.start_index + from as i64,
            period,
        })
    }

    /// Same index origin and period, new values of the same length.
    pub(crate) fn replace_values(&self, values: Vec<Option<f64>>) -> Self {
        debug_assert_eq!(values.len(), self.values.len());
        Self {
            values,
            start_index: self.start_index,
            period: self.period,
        }
    }
}
