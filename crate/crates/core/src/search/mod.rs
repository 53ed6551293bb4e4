//! AIC grid search over (p,d,q), sequentially or on a worker pool, and
//! segment-wise batched forecasting.
//!
//! Parallelism is at the granularity of whole fits. Each fit is a pure
//! function of its inputs, so the parallel engine reproduces the sequential
//! report exactly; only the timing fields differ.

mod pool;
mod segments;

use std::fmt;
use std::io;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::arima::{self, ArimaOrder};
use crate::series::TimeSeries;
use crate::{Error, Result};

pub use pool::{run_pool, TaskOutcome};
pub use segments::{fit_segments_parallel, forecast_segments_parallel, segment_series, MIN_SEGMENT_LEN};

/// AIC values closer than this are treated as tied.
pub const AIC_TIE_TOLERANCE: f64 = 1e-12;

/// Inclusive integer range such as `0..4`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntRange {
    pub lo: usize,
    pub hi: usize,
}

impl IntRange {
    pub fn new(lo: usize, hi: usize) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidArgument(format!("empty range {lo}..{hi}")));
        }
        Ok(Self { lo, hi })
    }

    pub fn single(v: usize) -> Self {
        Self { lo: v, hi: v }
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> {
        self.lo..=self.hi
    }
}

impl fmt::Display for IntRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

impl FromStr for IntRange {
    type Err = Error;

    /// `3`, `0..4` or `0-4`, bounds inclusive.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad range {s:?}"));
        let s = s.trim();
        let (lo, hi) = match s.split_once("..").or_else(|| s.split_once('-')) {
            Some((a, b)) => (a.trim(), b.trim().trim_start_matches('=')),
            None => (s, s),
        };
        let lo = lo.parse().map_err(|_| bad())?;
        let hi = hi.parse().map_err(|_| bad())?;
        Self::new(lo, hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GridSpec {
    pub p_range: IntRange,
    pub d_range: IntRange,
    pub q_range: IntRange,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            p_range: IntRange { lo: 0, hi: 4 },
            d_range: IntRange { lo: 0, hi: 2 },
            q_range: IntRange { lo: 0, hi: 4 },
        }
    }
}

impl GridSpec {
    pub fn new(p_range: IntRange, d_range: IntRange, q_range: IntRange) -> Result<Self> {
        let grid = Self { p_range, d_range, q_range };
        // every order in the grid must respect the model caps
        ArimaOrder::new(p_range.hi, d_range.hi, q_range.hi)?;
        Ok(grid)
    }

    pub fn size(&self) -> usize {
        self.p_range.len() * self.d_range.len() * self.q_range.len()
    }

    /// All orders in canonical lexicographic (p, d, q) order.
    pub fn orders(&self) -> Vec<ArimaOrder> {
        let mut out = Vec::with_capacity(self.size());
        for p in self.p_range.iter() {
            for d in self.d_range.iter() {
                for q in self.q_range.iter() {
                    out.push(ArimaOrder { p, d, q });
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateResult {
    pub order: ArimaOrder,
    /// Present iff the fit succeeded.
    pub aic: Option<f64>,
    pub converged: bool,
    /// Seconds spent fitting this candidate.
    pub fit_time: f64,
    pub error_label: Option<String>,
}

impl CandidateResult {
    fn failure(order: ArimaOrder, fit_time: f64, label: String) -> Self {
        Self {
            order,
            aic: None,
            converged: false,
            fit_time,
            error_label: Some(label),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub candidates: Vec<CandidateResult>,
    pub best: ArimaOrder,
    pub wall_time: f64,
    pub workers: usize,
}

impl SearchReport {
    pub fn best_candidate(&self) -> &CandidateResult {
        self.candidates
            .iter()
            .find(|c| c.order == self.best)
            .expect("best is always one of the candidates")
    }

    pub fn total_fit_time(&self) -> f64 {
        self.candidates.iter().map(|c| c.fit_time).sum()
    }

    /// One row per candidate: `p,d,q,aic,converged,fit_time`. A failed fit
    /// leaves the `aic` cell empty. AIC uses the shortest round-trip decimal
    /// form so equal values print identically.
    pub fn write_csv<W: io::Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "p,d,q,aic,converged,fit_time")?;
        for c in &self.candidates {
            let aic = c.aic.map(|a| a.to_string()).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{}",
                c.order.p, c.order.d, c.order.q, aic, c.converged, c.fit_time
            )?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}

fn tie_key(o: &ArimaOrder) -> (usize, usize, usize, usize, usize) {
    (o.p + o.q, o.d, o.p, o.d, o.q)
}

/// Lowest AIC among successful candidates; near-ties go to the smaller
/// `p + q`, then smaller `d`, then lexicographic order.
pub fn select_best(candidates: &[CandidateResult]) -> Option<ArimaOrder> {
    let mut best: Option<(f64, ArimaOrder)> = None;
    for c in candidates {
        let Some(aic) = c.aic else { continue };
        best = match best {
            None => Some((aic, c.order)),
            Some((b_aic, b_order)) => {
                let replace = if (aic - b_aic).abs() <= AIC_TIE_TOLERANCE {
                    tie_key(&c.order) < tie_key(&b_order)
                } else {
                    aic < b_aic
                };
                if replace {
                    Some((aic, c.order))
                } else {
                    Some((b_aic, b_order))
                }
            }
        };
    }
    best.map(|(_, o)| o)
}

/// Fits one grid cell. Series too short for the order are recorded as
/// failures rather than aborting the search.
pub fn evaluate_candidate(series: &TimeSeries, order: ArimaOrder) -> CandidateResult {
    let start = Instant::now();
    match arima::fit(series, order) {
        Ok((model, diag)) => CandidateResult {
            order,
            aic: Some(model.aic()).filter(|a| a.is_finite()),
            converged: diag.converged,
            fit_time: start.elapsed().as_secs_f64(),
            error_label: None,
        },
        Err(e) => CandidateResult::failure(order, start.elapsed().as_secs_f64(), e.to_string()),
    }
}

fn finish(candidates: Vec<CandidateResult>, wall_time: f64, workers: usize) -> Result<SearchReport> {
    let best = select_best(&candidates).ok_or(Error::AllCandidatesFailed)?;
    Ok(SearchReport {
        candidates,
        best,
        wall_time,
        workers,
    })
}

/// Fits every candidate in canonical order on the calling thread.
pub fn grid_search_sequential(series: &TimeSeries, grid: &GridSpec) -> Result<SearchReport> {
    let start = Instant::now();
    let candidates = grid
        .orders()
        .into_iter()
        .map(|o| evaluate_candidate(series, o))
        .collect();
    finish(candidates, start.elapsed().as_secs_f64(), 1)
}

/// Distributes candidates over a pool of `workers` threads. The report is
/// identical to [`grid_search_sequential`] apart from timings and `workers`.
pub fn grid_search_parallel(series: &TimeSeries, grid: &GridSpec, workers: usize) -> Result<SearchReport> {
    search_on_pool(series, grid, workers, evaluate_candidate)
}

pub(crate) fn search_on_pool<F>(series: &TimeSeries, grid: &GridSpec, workers: usize, eval: F) -> Result<SearchReport>
where
    F: Fn(&TimeSeries, ArimaOrder) -> CandidateResult + Sync,
{
    let start = Instant::now();
    let orders = grid.orders();
    let outcomes = run_pool(&orders, workers, |&o| eval(series, o))?;
    let candidates = outcomes
        .into_iter()
        .zip(&orders)
        .map(|(out, &order)| {
            out.unwrap_or_else(|msg| CandidateResult::failure(order, 0.0, format!("worker failure: {msg}")))
        })
        .collect();
    finish(candidates, start.elapsed().as_secs_f64(), workers)
}
