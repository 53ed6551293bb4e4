//! Median-of-repeats wall-clock timing on a monotonic clock.

use std::time::Instant;

use crate::{Error, Result};

/// Median of an odd-length sample.
pub fn median(samples: &[f64]) -> f64 {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn check_repeats(repeats: usize) -> Result<()> {
    if repeats < 3 || repeats % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "repeats must be odd and >= 3, got {repeats}"
        )));
    }
    Ok(())
}

/// Runs `f` once untimed, then `repeats` timed runs. Returns the median time
/// in seconds and the output of the last run.
pub fn time_median<T, F>(repeats: usize, mut f: F) -> Result<(f64, T)>
where
    F: FnMut() -> Result<T>,
{
    f()?;
    let mut samples = Vec::with_capacity(repeats);
    let mut last = None;
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        let out = f()?;
        samples.push(start.elapsed().as_secs_f64());
        last = Some(out);
    }
    let t = median(&samples).max(f64::MIN_POSITIVE);
    Ok((t, last.expect("at least one timed run")))
}

/// Times two workloads with their runs interleaved (`a b a b ...`) after one
/// warmup of each, so slow phases of the machine hit both medians alike.
pub fn time_median_pair<A, B, FA, FB>(repeats: usize, mut fa: FA, mut fb: FB) -> Result<((f64, A), (f64, B))>
where
    FA: FnMut() -> Result<A>,
    FB: FnMut() -> Result<B>,
{
    fa()?;
    fb()?;
    let (mut sa, mut sb) = (Vec::with_capacity(repeats), Vec::with_capacity(repeats));
    let (mut last_a, mut last_b) = (None, None);
    for _ in 0..repeats.max(1) {
        let start = Instant::now();
        last_a = Some(fa()?);
        sa.push(start.elapsed().as_secs_f64());
        let start = Instant::now();
        last_b = Some(fb()?);
        sb.push(start.elapsed().as_secs_f64());
    }
    let ta = median(&sa).max(f64::MIN_POSITIVE);
    let tb = median(&sb).max(f64::MIN_POSITIVE);
    Ok(((ta, last_a.expect("timed run")), (tb, last_b.expect("timed run"))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_ignores_one_outlier() {
        let base = [1.0, 1.1, 0.9, 1.05, 0.95];
        let mut spiked = base;
        spiked[2] = 500.0;
        assert_eq!(median(&base), 1.0);
        assert_eq!(median(&spiked), 1.05);
    }

    #[test]
    fn injected_slow_repeat_does_not_move_median() {
        let mut calls = 0;
        let (t, out) = time_median(5, || {
            calls += 1;
            // call 3 is the second timed run
            if calls == 3 {
                std::thread::sleep(std::time::Duration::from_millis(200));
            } else {
                std::thread::sleep(std::time::Duration::from_millis(2));
            }
            Ok(calls)
        })
        .unwrap();
        assert_eq!(calls, 6);
        assert_eq!(out, 6);
        assert!(t < 0.1, "median {t}");
    }

    #[test]
    fn pair_alternates_runs() {
        let log = std::cell::RefCell::new(String::new());
        let ((_, a), (_, b)) = time_median_pair(
            3,
            || {
                log.borrow_mut().push('a');
                Ok(1)
            },
            || {
                log.borrow_mut().push('b');
                Ok(2)
            },
        )
        .unwrap();
        assert_eq!((a, b), (1, 2));
        assert_eq!(log.into_inner(), "abababab");
    }

    #[test]
    fn repeats_validation() {
        assert!(check_repeats(3).is_ok());
        assert!(check_repeats(4).is_err());
        assert!(check_repeats(1).is_err());
    }
}
