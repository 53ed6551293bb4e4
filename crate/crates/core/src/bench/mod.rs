//! Speedup and efficiency bookkeeping plus the four scaling experiments:
//! data-size sweep, strong scaling, weak scaling and model-order sweep.

mod experiments;
mod output;
mod timing;

use serde::{Deserialize, Serialize};

use crate::arima::ArimaOrder;
use crate::{Error, Result};

pub use experiments::{
    run_order_sweep, run_size_sweep, run_strong_scaling, run_weak_scaling, ExperimentOptions, HOLDOUT,
};
pub use output::{CSV_HEADER, ORDER_CSV_HEADER};
pub use timing::{median, time_median};

/// `S_p = T_1 / T_p`.
pub fn speedup(t1: f64, tp: f64) -> Result<f64> {
    for t in [t1, tp] {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::NonPositiveTime(t));
        }
    }
    Ok(t1 / tp)
}

/// `E_p = S_p / p`.
pub fn efficiency(speedup: f64, workers: usize) -> f64 {
    speedup / workers as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRecord {
    /// Set only for order-sweep rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<ArimaOrder>,
    pub data_size: usize,
    pub workers: usize,
    pub t_sequential: f64,
    pub t_parallel: f64,
    pub speedup: f64,
    pub efficiency: f64,
    pub mae_sequential: f64,
    pub mae_parallel: f64,
    pub repeats: usize,
}

impl BenchmarkRecord {
    /// Derives speedup and efficiency from the two median times.
    pub fn new(
        data_size: usize,
        workers: usize,
        t_sequential: f64,
        t_parallel: f64,
        maes: (f64, f64),
        repeats: usize,
    ) -> Result<Self> {
        let s = speedup(t_sequential, t_parallel)?;
        Ok(Self {
            order: None,
            data_size,
            workers,
            t_sequential,
            t_parallel,
            speedup: s,
            efficiency: efficiency(s, workers),
            mae_sequential: maes.0,
            mae_parallel: maes.1,
            repeats,
        })
    }

    /// Whether the stored speedup and efficiency agree with the stored times.
    pub fn identities_hold(&self, tol: f64) -> bool {
        let s = self.t_sequential / self.t_parallel;
        (self.speedup - s).abs() <= tol * s.abs().max(1.0)
            && (self.efficiency * self.workers as f64 - self.speedup).abs() <= tol * self.speedup.abs().max(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScalingKind {
    SizeSweep,
    Strong,
    Weak,
    OrderSweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub cores: usize,
    pub timestamp: u64,
    pub version: String,
}

impl Environment {
    pub fn capture() -> Self {
        Self {
            cores: available_cores(),
            timestamp: std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

pub fn available_cores() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub kind: ScalingKind,
    pub records: Vec<BenchmarkRecord>,
    pub environment: Environment,
    /// Set when an experiment stopped early; `records` then holds the rows
    /// completed before the failure.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub incomplete: Option<String>,
}

impl ScalingReport {
    /// Checks the structural invariants of the report.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        if self.records.is_empty() {
            return bad("report has no records".into());
        }
        for r in &self.records {
            if !r.identities_hold(1e-12) {
                return bad(format!("speedup/efficiency identities violated: {r:?}"));
            }
        }
        match self.kind {
            ScalingKind::Strong => {
                let size = self.records[0].data_size;
                if self.records.iter().any(|r| r.data_size != size) {
                    return bad("strong-scaling records must share data_size".into());
                }
            }
            ScalingKind::Weak => {
                let ratio = self.records[0].data_size / self.records[0].workers;
                if self.records.iter().any(|r| r.data_size != ratio * r.workers) {
                    return bad("weak-scaling records must share data_size / workers".into());
                }
            }
            ScalingKind::OrderSweep => {
                if self.records.iter().any(|r| r.order.is_none()) {
                    return bad("order-sweep records need an order".into());
                }
            }
            ScalingKind::SizeSweep => {}
        }
        Ok(())
    }
}
