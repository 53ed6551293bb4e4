//! Forecast accuracy, time-series cross-validation and residual diagnostics.

mod cv;
mod metrics;
mod hypothesis;

pub use cv::{cv_boundaries, rolling_origin_cv, CvReport, MIN_TRAIN_LEN};
pub use metrics::{mae, metrics, rmse, MetricsReport};
pub use hypothesis::{
    breusch_pagan, durbin_watson, paired_t_test, residual_diagnostics, shapiro_wilk, DiagnosticsReport,
    TTest, TestStatistic, SHAPIRO_MAX_N,
};
