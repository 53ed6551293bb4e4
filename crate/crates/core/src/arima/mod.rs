//! ARIMA(p,d,q) models: `phi(B) (1-B)^d y_t = theta(B) e_t`.
//!
//! Coefficients follow the sign convention
//! `phi(B) = 1 - phi_1 B - ... - phi_p B^p` and
//! `theta(B) = 1 + theta_1 B + ... + theta_q B^q`.

mod estimate;
mod forecast;
pub mod optim;
pub mod roots;
mod simulate;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use estimate::{conditional_sum_of_squares, fit, fit_from, yule_walker, FitDiagnostics};
pub use forecast::forecast;
pub use simulate::{default_coefficients, simulate_arima};

pub const MAX_P: usize = 10;
pub const MAX_D: usize = 2;
pub const MAX_Q: usize = 10;

/// Roots of phi(B) and theta(B) must lie strictly outside the unit circle;
/// equivalently companion eigenvalues must have modulus below this bound.
pub const ROOT_BOUND: f64 = 1.0 - 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ArimaOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
}

impl ArimaOrder {
    pub fn new(p: usize, d: usize, q: usize) -> Result<Self> {
        if p > MAX_P || d > MAX_D || q > MAX_Q {
            return Err(Error::InvalidArgument(format!(
                "order ({p},{d},{q}) exceeds caps ({MAX_P},{MAX_D},{MAX_Q})"
            )));
        }
        Ok(Self { p, d, q })
    }

    /// Number of free parameters counted by AIC: AR + MA terms plus the
    /// intercept and innovation variance.
    pub fn aic_params(&self) -> usize {
        self.p + self.q + 2
    }

    /// Minimum series length accepted by [`fit`].
    pub fn min_length(&self) -> usize {
        self.d + self.p.max(self.q) + 20
    }
}

impl fmt::Display for ArimaOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.p, self.d, self.q)
    }
}

impl FromStr for ArimaOrder {
    type Err = Error;

    /// Accepts `p,d,q` with optional surrounding parentheses.
    fn from_str(s: &str) -> Result<Self> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<&str> = trimmed.split(',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(Error::InvalidArgument(format!("expected p,d,q but got {s:?}")));
        }
        let parse = |x: &str| {
            x.parse::<usize>()
                .map_err(|_| Error::InvalidArgument(format!("bad order component {x:?}")))
        };
        Self::new(parse(parts[0])?, parse(parts[1])?, parse(parts[2])?)
    }
}

/// A fitted model with everything needed to forecast from the end of the
/// estimation sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArimaModel {
    pub order: ArimaOrder,
    pub ar_coeffs: Vec<f64>,
    pub ma_coeffs: Vec<f64>,
    /// Mean of the differenced series. Only estimated when `d == 0`; with
    /// differencing the model carries no drift and this is zero.
    pub intercept: f64,
    pub sigma2: f64,
    pub log_likelihood: f64,
    pub n_obs: usize,
    /// Last `max(p,q,d) + d` observations on the original scale.
    pub tail: Vec<f64>,
    /// Last `q` one-step residuals, oldest first.
    #[serde(default)]
    pub tail_residuals: Vec<f64>,
}

impl ArimaModel {
    pub fn aic(&self) -> f64 {
        aic(self)
    }

    pub fn tail_len(order: &ArimaOrder) -> usize {
        order.p.max(order.q).max(order.d) + order.d
    }

    /// Checks the structural invariants, e.g. after loading from JSON.
    pub fn validate(&self) -> Result<()> {
        let o = self.order;
        ArimaOrder::new(o.p, o.d, o.q)?;
        if self.ar_coeffs.len() != o.p {
            return Err(Error::ArityMismatch { expected: o.p, got: self.ar_coeffs.len() });
        }
        if self.ma_coeffs.len() != o.q {
            return Err(Error::ArityMismatch { expected: o.q, got: self.ma_coeffs.len() });
        }
        if self.tail.len() != Self::tail_len(&o) {
            return Err(Error::ArityMismatch { expected: Self::tail_len(&o), got: self.tail.len() });
        }
        if self.tail_residuals.len() != o.q {
            return Err(Error::ArityMismatch { expected: o.q, got: self.tail_residuals.len() });
        }
        if !(self.sigma2 > 0.0) {
            return Err(Error::InvalidArgument("sigma2 must be positive".into()));
        }
        if !roots::is_stationary(&self.ar_coeffs) || !roots::is_invertible(&self.ma_coeffs) {
            return Err(Error::NonStationaryParams);
        }
        Ok(())
    }
}

/// `2k - 2 lnL` with `k = p + q + 2`.
pub fn aic(model: &ArimaModel) -> f64 {
    2.0 * model.order.aic_params() as f64 - 2.0 * model.log_likelihood
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stub(p: usize, q: usize, ll: f64) -> ArimaModel {
        ArimaModel {
            order: ArimaOrder { p, d: 0, q },
            ar_coeffs: vec![0.0; p],
            ma_coeffs: vec![0.0; q],
            intercept: 0.0,
            sigma2: 1.0,
            log_likelihood: ll,
            n_obs: 100,
            tail: vec![0.0; p.max(q)],
            tail_residuals: vec![0.0; q],
        }
    }

    #[test]
    fn aic_arithmetic() {
        assert_eq!(aic(&stub(1, 1, -100.0)), 208.0);
        assert_eq!(aic(&stub(0, 0, -100.0)), 204.0);
        assert!(aic(&stub(1, 1, -90.0)) < aic(&stub(1, 1, -100.0)));
    }

    #[test]
    fn order_parsing() {
        assert_eq!("2,1,2".parse::<ArimaOrder>().unwrap(), ArimaOrder { p: 2, d: 1, q: 2 });
        assert_eq!("(4, 1, 4)".parse::<ArimaOrder>().unwrap(), ArimaOrder { p: 4, d: 1, q: 4 });
        assert!("1,3,1".parse::<ArimaOrder>().is_err());
        assert!("1,1".parse::<ArimaOrder>().is_err());
        assert_eq!(ArimaOrder { p: 3, d: 1, q: 0 }.to_string(), "(3,1,0)");
    }

    #[test]
    fn validate_catches_bad_models() {
        assert!(stub(1, 1, 0.0).validate().is_ok());
        let mut m = stub(1, 0, 0.0);
        m.ar_coeffs = vec![1.2];
        assert_eq!(m.validate(), Err(Error::NonStationaryParams));
        let mut m = stub(1, 0, 0.0);
        m.sigma2 = 0.0;
        assert!(m.validate().is_err());
    }
}
