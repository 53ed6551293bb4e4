//! ARIMA forecasting with a parallel AIC grid search.
//!
//! The crate is split the same way the processing pipeline is:
//!
//! - [`series`] and [`preprocess`]: the time-series container, differencing,
//!   min-max scaling, moving-median imputation and additive decomposition.
//! - [`arima`]: simulation, conditional-sum-of-squares estimation, AIC and
//!   forecasting for ARIMA(p,d,q).
//! - [`search`]: sequential and worker-pool grid search over (p,d,q) plus
//!   segment-wise batched forecasting.
//! - [`eval`]: MAE/RMSE, rolling-origin cross-validation and residual tests.
//! - [`bench`]: speedup/efficiency bookkeeping and the scaling experiments.

pub mod arima;
pub mod bench;
mod error;
pub mod eval;
pub mod preprocess;
pub mod search;
pub mod series;
pub mod synth;

pub use error::{Error, ErrorClass, Result};
pub use series::TimeSeries;
