use parima::arima::ArimaOrder;
use parima::bench::{run_order_sweep, run_size_sweep, ExperimentOptions};
use parima::search::{GridSpec, IntRange};
use std::sync::Mutex;

// timing runs must not overlap each other
static TIMING: Mutex<()> = Mutex::new(());

fn orders() -> Vec<ArimaOrder> {
    ["1,1,1", "2,1,2", "3,1,3", "4,1,4"].iter().map(|s| s.parse().unwrap()).collect()
}

#[test]
fn fit_time_grows_with_model_order() {
    let _guard = TIMING.lock().unwrap();
    let opts = ExperimentOptions { repeats: 5, seed: 1, ..Default::default() };
    let r = run_order_sweep(&orders(), 4000, 1, &opts).unwrap();
    r.validate().unwrap();
    let times: Vec<f64> = r.records.iter().map(|x| x.t_sequential).collect();
    assert!(times.windows(2).all(|w| w[0] < w[1]), "{times:?}");
    for x in &r.records {
        assert_eq!(x.mae_sequential, x.mae_parallel);
    }
}

#[test]
fn one_worker_pool_tracks_sequential() {
    let _guard = TIMING.lock().unwrap();
    let opts = ExperimentOptions {
        grid: GridSpec::new(IntRange::new(0, 2).unwrap(), IntRange::single(1), IntRange::new(0, 2).unwrap()).unwrap(),
        // short runs on a shared host need the extra repeats to stay inside the band
        repeats: 9,
        seed: 0,
        allow_oversubscribe: false,
    };
    let r = run_size_sweep(&[5000], 1, &opts).unwrap();
    for x in &r.records {
        assert!((0.9..=1.1).contains(&x.speedup), "speedup {}", x.speedup);
    }
}
