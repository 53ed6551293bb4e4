use crate::arima::{self, ArimaOrder};
use crate::eval::mae;
use crate::search::{grid_search_parallel, grid_search_sequential, segment_series, forecast_segments_parallel, GridSpec, SearchReport};
use crate::series::TimeSeries;
use crate::synth::benchmark_series;
use crate::{Error, Result};

use super::timing::{check_repeats, time_median, time_median_pair};
use super::{available_cores, BenchmarkRecord, Environment, ScalingKind, ScalingReport};

/// Points held out at the end of every benchmark series for the MAE columns.
pub const HOLDOUT: usize = 12;

/// Segments per worker in the order sweep, so each worker gets more than one
/// task from the queue.
const SEGMENTS_PER_WORKER: usize = 2;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOptions {
    pub grid: GridSpec,
    pub repeats: usize,
    pub seed: u64,
    /// Permit worker counts above the number of available cores. Timings
    /// are then meaningless for scaling, but the table shape is preserved.
    pub allow_oversubscribe: bool,
}

impl Default for ExperimentOptions {
    fn default() -> Self {
        Self {
            grid: GridSpec::default(),
            repeats: 3,
            seed: 0,
            allow_oversubscribe: false,
        }
    }
}

impl ExperimentOptions {
    fn check_workers(&self, workers: usize) -> Result<()> {
        if workers == 0 {
            return Err(Error::InvalidArgument("workers must be >= 1".into()));
        }
        let available = available_cores();
        if workers > available && !self.allow_oversubscribe {
            return Err(Error::Oversubscribed {
                requested: workers,
                available,
            });
        }
        Ok(())
    }
}

fn check_ascending(name: &str, v: &[usize]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::InvalidArgument(format!("{name} must not be empty")));
    }
    if v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(format!("{name} must be strictly ascending")));
    }
    Ok(())
}

struct Workload {
    train: TimeSeries,
    test: Vec<f64>,
}

fn workload(size: usize, seed: u64) -> Result<Workload> {
    if size <= HOLDOUT {
        return Err(Error::InsufficientLength {
            needed: HOLDOUT + 1,
            got: size,
        });
    }
    let series = benchmark_series(size, seed.wrapping_add(size as u64))?;
    let cut = size - HOLDOUT;
    Ok(Workload {
        train: series.slice(0, cut)?,
        test: series.slice(cut, size)?.observed()?,
    })
}

impl Workload {
    /// Holdout MAE of the model a search selected.
    fn holdout_mae(&self, report: &SearchReport) -> Result<f64> {
        let (model, _) = arima::fit(&self.train, report.best)?;
        mae(&self.test, &arima::forecast(&model, HOLDOUT))
    }

    fn time_parallel(&self, grid: &GridSpec, workers: usize, repeats: usize) -> Result<(f64, f64)> {
        let (t, report) = time_median(repeats, || grid_search_parallel(&self.train, grid, workers))?;
        Ok((t, self.holdout_mae(&report)?))
    }

    /// Sequential and pooled search timed with interleaved runs.
    fn time_both(&self, grid: &GridSpec, workers: usize, repeats: usize) -> Result<((f64, f64), (f64, f64))> {
        let ((ts, seq), (tp, par)) = time_median_pair(
            repeats,
            || grid_search_sequential(&self.train, grid),
            || grid_search_parallel(&self.train, grid, workers),
        )?;
        Ok(((ts, self.holdout_mae(&seq)?), (tp, self.holdout_mae(&par)?)))
    }
}

/// Collects rows until one fails. A failure after the first row yields a
/// partial report flagged `incomplete`; a failure on the first row is
/// returned as the error.
fn collect<I>(kind: ScalingKind, rows: I) -> Result<ScalingReport>
where
    I: IntoIterator<Item = Result<BenchmarkRecord>>,
{
    let mut records = Vec::new();
    let mut incomplete = None;
    for row in rows {
        match row {
            Ok(r) => records.push(r),
            Err(e) if records.is_empty() => return Err(e),
            Err(e) => {
                incomplete = Some(e.to_string());
                break;
            }
        }
    }
    Ok(ScalingReport {
        kind,
        records,
        environment: Environment::capture(),
        incomplete,
    })
}

/// One row per size: sequential grid search against the pool with
/// `workers` threads on the same series.
pub fn run_size_sweep(sizes: &[usize], workers: usize, opts: &ExperimentOptions) -> Result<ScalingReport> {
    check_ascending("sizes", sizes)?;
    check_repeats(opts.repeats)?;
    opts.check_workers(workers)?;
    collect(
        ScalingKind::SizeSweep,
        sizes.iter().map(|&size| {
            let w = workload(size, opts.seed)?;
            let ((t_seq, mae_seq), (t_par, mae_par)) = w.time_both(&opts.grid, workers, opts.repeats)?;
            BenchmarkRecord::new(size, workers, t_seq, t_par, (mae_seq, mae_par), opts.repeats)
        }),
    )
}

/// Fixed problem size, varying worker count. The one-worker pool run is the
/// baseline `T_1` for every row, so the first row has `S_1 = E_1 = 1`.
pub fn run_strong_scaling(size: usize, worker_counts: &[usize], opts: &ExperimentOptions) -> Result<ScalingReport> {
    check_ascending("worker counts", worker_counts)?;
    check_repeats(opts.repeats)?;
    for &p in worker_counts {
        opts.check_workers(p)?;
    }
    let w = workload(size, opts.seed)?;
    let (t1, mae1) = w.time_parallel(&opts.grid, 1, opts.repeats)?;
    collect(
        ScalingKind::Strong,
        worker_counts.iter().map(|&p| {
            let (tp, mae_p) = if p == 1 {
                (t1, mae1)
            } else {
                w.time_parallel(&opts.grid, p, opts.repeats)?
            };
            BenchmarkRecord::new(size, p, t1, tp, (mae1, mae_p), opts.repeats)
        }),
    )
}

/// Problem size grows with the worker count (`base_size * p`). Row `p`
/// stores `t_sequential = p * T(1, base)` and `t_parallel = T(p, base * p)`,
/// so its efficiency is `T(1, base) / T(p, base * p)` and the speedup and
/// efficiency identities still hold on the stored fields.
pub fn run_weak_scaling(base_size: usize, worker_counts: &[usize], opts: &ExperimentOptions) -> Result<ScalingReport> {
    check_ascending("worker counts", worker_counts)?;
    check_repeats(opts.repeats)?;
    for &p in worker_counts {
        opts.check_workers(p)?;
    }
    let base = workload(base_size, opts.seed)?;
    let (t_base, _) = base.time_parallel(&opts.grid, 1, opts.repeats)?;
    collect(
        ScalingKind::Weak,
        worker_counts.iter().map(|&p| {
            let size = base_size * p;
            let w = workload(size, opts.seed)?;
            let (tp, mae_par) = w.time_parallel(&opts.grid, p, opts.repeats)?;
            // untimed reference search for the sequential MAE column
            let mae_seq = w.holdout_mae(&grid_search_sequential(&w.train, &opts.grid)?)?;
            BenchmarkRecord::new(size, p, p as f64 * t_base, tp, (mae_seq, mae_par), opts.repeats)
        }),
    )
}

struct SegmentBatch {
    train: Vec<TimeSeries>,
    test: Vec<f64>,
}

fn segment_batch(size: usize, segments: usize, seed: u64) -> Result<SegmentBatch> {
    let series = benchmark_series(size, seed.wrapping_add(size as u64))?;
    let mut train = Vec::with_capacity(segments);
    let mut test = Vec::with_capacity(segments * HOLDOUT);
    for seg in segment_series(&series, segments)? {
        let cut = seg.len() - HOLDOUT;
        train.push(seg.slice(0, cut)?);
        test.extend(seg.slice(cut, seg.len())?.observed()?);
    }
    Ok(SegmentBatch { train, test })
}

fn pooled_mae(test: &[f64], forecasts: Vec<Result<Vec<f64>>>) -> Result<f64> {
    let mut predicted = Vec::with_capacity(test.len());
    for f in forecasts {
        predicted.extend(f?);
    }
    mae(test, &predicted)
}

/// For each order, fits and forecasts `2 * workers` independent segments of
/// one series, first in a loop on the calling thread and then on the pool.
/// MAE is pooled over every segment's holdout.
pub fn run_order_sweep(orders: &[ArimaOrder], size: usize, workers: usize, opts: &ExperimentOptions) -> Result<ScalingReport> {
    if orders.is_empty() {
        return Err(Error::InvalidArgument("orders must not be empty".into()));
    }
    check_repeats(opts.repeats)?;
    opts.check_workers(workers)?;
    let batch = segment_batch(size, SEGMENTS_PER_WORKER * workers, opts.seed)?;
    collect(
        ScalingKind::OrderSweep,
        orders.iter().map(|&order| {
            let ((t_seq, seq), (t_par, par)) = time_median_pair(
                opts.repeats,
                || {
                    Ok(batch
                        .train
                        .iter()
                        .map(|s| arima::fit(s, order).map(|(m, _)| arima::forecast(&m, HOLDOUT)))
                        .collect::<Vec<_>>())
                },
                || forecast_segments_parallel(&batch.train, order, HOLDOUT, workers),
            )?;
            let maes = (pooled_mae(&batch.test, seq)?, pooled_mae(&batch.test, par)?);
            let mut record = BenchmarkRecord::new(size, workers, t_seq, t_par, maes, opts.repeats)?;
            record.order = Some(order);
            Ok(record)
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::search::IntRange;

    fn small_opts() -> ExperimentOptions {
        ExperimentOptions {
            grid: GridSpec::new(IntRange::new(0, 1).unwrap(), IntRange::single(1), IntRange::new(0, 1).unwrap()).unwrap(),
            repeats: 3,
            seed: 3,
            allow_oversubscribe: true,
        }
    }

    #[test]
    fn size_sweep_rows_and_determinism() {
        let opts = small_opts();
        let a = run_size_sweep(&[200, 400], 2, &opts).unwrap();
        assert_eq!(a.records.iter().map(|r| r.data_size).collect::<Vec<_>>(), vec![200, 400]);
        a.validate().unwrap();
        for r in &a.records {
            assert_eq!(r.mae_sequential, r.mae_parallel);
        }
        let b = run_size_sweep(&[200, 400], 2, &opts).unwrap();
        let maes = |r: &ScalingReport| r.records.iter().map(|x| x.mae_parallel).collect::<Vec<_>>();
        assert_eq!(maes(&a), maes(&b));
    }

    #[test]
    fn strong_scaling_baseline_row() {
        let r = run_strong_scaling(300, &[1, 2, 4], &small_opts()).unwrap();
        r.validate().unwrap();
        assert_eq!(r.records[0].speedup, 1.0);
        assert_eq!(r.records[0].efficiency, 1.0);
        assert!(r.records.iter().all(|x| x.data_size == 300));
    }

    #[test]
    fn weak_scaling_pairs() {
        let r = run_weak_scaling(150, &[1, 2, 4], &small_opts()).unwrap();
        r.validate().unwrap();
        assert_eq!(r.records.iter().map(|x| (x.workers, x.data_size)).collect::<Vec<_>>(), vec![(1, 150), (2, 300), (4, 600)]);
        for x in &r.records {
            assert_eq!(x.mae_sequential, x.mae_parallel);
        }
    }

    #[test]
    fn order_sweep_rows() {
        let orders: Vec<ArimaOrder> = ["1,1,1", "2,1,2"].iter().map(|s| s.parse().unwrap()).collect();
        let r = run_order_sweep(&orders, 1000, 2, &small_opts()).unwrap();
        r.validate().unwrap();
        assert_eq!(r.records.iter().map(|x| x.order.unwrap()).collect::<Vec<_>>(), orders);
        for x in &r.records {
            assert_eq!(x.mae_sequential, x.mae_parallel);
        }
    }

    #[test]
    fn argument_checks() {
        let opts = small_opts();
        assert!(run_size_sweep(&[400, 200], 1, &opts).is_err());
        assert!(run_size_sweep(&[200], 1, &ExperimentOptions { repeats: 4, ..opts.clone() }).is_err());
        let strict = ExperimentOptions { allow_oversubscribe: false, ..opts };
        let too_many = available_cores() + 1;
        assert!(matches!(
            run_strong_scaling(300, &[1, too_many], &strict),
            Err(Error::Oversubscribed { .. })
        ));
    }

    #[test]
    fn failure_after_first_row_is_partial() {
        // the second workload is too short for any candidate, so every fit fails
        let opts = ExperimentOptions {
            grid: GridSpec::new(IntRange::single(3), IntRange::single(1), IntRange::single(3)).unwrap(),
            ..small_opts()
        };
        let r = collect(
            ScalingKind::SizeSweep,
            [
                BenchmarkRecord::new(10, 1, 1.0, 1.0, (0.0, 0.0), 3),
                Err(Error::AllCandidatesFailed),
            ],
        )
        .unwrap();
        assert_eq!(r.records.len(), 1);
        assert!(r.incomplete.is_some());
        assert!(matches!(run_size_sweep(&[20], 1, &opts), Err(Error::AllCandidatesFailed)));
    }
}
