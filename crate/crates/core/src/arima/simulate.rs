use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{roots, ArimaOrder};
use crate::preprocess::integrate_slice;
use crate::series::TimeSeries;
use crate::{Error, Result};

const BURN_IN: usize = 200;

/// Reference coefficients used when a caller only names an order
/// (CLI `simulate`, benchmark workloads). Orders above 4 need explicit values.
pub fn default_coefficients(order: ArimaOrder) -> Result<(Vec<f64>, Vec<f64>)> {
    const AR: [&[f64]; 5] = [&[], &[0.7], &[0.6, -0.3], &[0.5, -0.3, 0.2], &[0.4, -0.3, 0.2, -0.1]];
    const MA: [&[f64]; 5] = [&[], &[0.5], &[0.4, 0.3], &[0.4, 0.3, 0.2], &[0.4, 0.3, 0.2, 0.1]];
    if order.p >= AR.len() || order.q >= MA.len() {
        return Err(Error::InvalidArgument(format!(
            "no default coefficients for order {order}; pass them explicitly"
        )));
    }
    Ok((AR[order.p].to_vec(), MA[order.q].to_vec()))
}

/// Draws a seeded ARIMA path of length `n`. The stationary ARMA part is run
/// for a discarded burn-in first, shifted by `intercept`, then integrated `d`
/// times from zero.
pub fn simulate_arima(
    order: ArimaOrder,
    ar: &[f64],
    ma: &[f64],
    intercept: f64,
    sigma: f64,
    n: usize,
    seed: u64,
) -> Result<TimeSeries> {
    if ar.len() != order.p {
        return Err(Error::ArityMismatch { expected: order.p, got: ar.len() });
    }
    if ma.len() != order.q {
        return Err(Error::ArityMismatch { expected: order.q, got: ma.len() });
    }
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidArgument(format!("sigma must be non-negative, got {sigma}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    if !roots::is_stationary(ar) || !roots::is_invertible(ma) {
        return Err(Error::NonStationaryParams);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = n + BURN_IN;
    let mut z = vec![0.0; total];
    let mut e = vec![0.0; total];
    for t in 0..total {
        let eps: f64 = StandardNormal.sample(&mut rng);
        e[t] = sigma * eps;
        let mut v = e[t];
        for (i, phi) in ar.iter().enumerate() {
            if t > i {
                v += phi * z[t - 1 - i];
            }
        }
        for (j, theta) in ma.iter().enumerate() {
            if t > j {
                v += theta * e[t - 1 - j];
            }
        }
        z[t] = v;
    }
    let w: Vec<f64> = z[BURN_IN..].iter().map(|v| v + intercept).collect();
    let y = integrate_slice(&w, order.d, &vec![0.0; order.d])?;
    TimeSeries::from_values(&y)
}
