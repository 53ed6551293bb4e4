//! Seeded benchmark workload: an ARIMA(2,1,2) path plus a fixed seasonal
//! cycle around a positive level, loosely shaped like monthly consumption.

use std::f64::consts::PI;

use crate::arima::{default_coefficients, simulate_arima, ArimaOrder};
use crate::series::TimeSeries;
use crate::Result;

pub const WORKLOAD_ORDER: ArimaOrder = ArimaOrder { p: 2, d: 1, q: 2 };
pub const WORKLOAD_PERIOD: usize = 12;
const LEVEL: f64 = 500.0;
const SEASONAL_AMPLITUDE: f64 = 3.0;

pub fn benchmark_series(n: usize, seed: u64) -> Result<TimeSeries> {
    let (ar, ma) = default_coefficients(WORKLOAD_ORDER)?;
    let base = simulate_arima(WORKLOAD_ORDER, &ar, &ma, 0.0, 1.0, n, seed)?;
    let values: Vec<f64> = base
        .observed()?
        .iter()
        .enumerate()
        .map(|(t, v)| LEVEL + v + SEASONAL_AMPLITUDE * (2.0 * PI * t as f64 / WORKLOAD_PERIOD as f64).sin())
        .collect();
    TimeSeries::from_values(&values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_sized() {
        let a = benchmark_series(300, 1).unwrap();
        assert_eq!(a.len(), 300);
        assert_eq!(a, benchmark_series(300, 1).unwrap());
        assert_ne!(a, benchmark_series(300, 2).unwrap());
    }
}
