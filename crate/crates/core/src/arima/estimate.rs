//! Conditional-sum-of-squares estimation.

use serde::{Deserialize, Serialize};

use super::optim::{nelder_mead, NelderMeadOptions};
use super::{roots, ArimaModel, ArimaOrder, ROOT_BOUND};
use crate::preprocess::difference_slice;
use crate::series::TimeSeries;
use crate::{Error, Result};

const PENALTY: f64 = 1e6;
const MAX_RESTARTS: usize = 3;
/// Keeps the likelihood finite on perfectly fitted (e.g. constant) series.
const SIGMA2_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub converged: bool,
    pub iterations: usize,
    /// Conditional sum of squares at the returned parameters.
    pub final_objective: f64,
    /// One-step-ahead errors for `t = d + p .. n`.
    pub residuals: Vec<f64>,
    /// One-step-ahead predictions on the original scale, aligned with `residuals`.
    pub fitted: Vec<f64>,
}

/// Writes one-step residuals of the zero-mean ARMA recursion into `resid` and
/// returns their sum of squares. The first `p` values of `z` are conditioned
/// on and pre-sample errors are zero.
pub fn conditional_sum_of_squares(z: &[f64], ar: &[f64], ma: &[f64], resid: &mut Vec<f64>) -> f64 {
    let p = ar.len();
    resid.clear();
    let mut css = 0.0;
    for t in p..z.len() {
        let mut e = z[t];
        for (i, phi) in ar.iter().enumerate() {
            e -= phi * z[t - 1 - i];
        }
        let k = resid.len();
        for (j, theta) in ma.iter().enumerate() {
            if j < k {
                e -= theta * resid[k - 1 - j];
            }
        }
        resid.push(e);
        css += e * e;
    }
    css
}

/// Yule-Walker AR(p) estimate from biased autocovariances via Levinson-Durbin.
/// Falls back to zeros when the series has no variance.
pub fn yule_walker(z: &[f64], p: usize) -> Vec<f64> {
    if p == 0 {
        return Vec::new();
    }
    let n = z.len();
    let mean = z.iter().sum::<f64>() / n as f64;
    let acov: Vec<f64> = (0..=p)
        .map(|lag| {
            (lag..n)
                .map(|t| (z[t] - mean) * (z[t - lag] - mean))
                .sum::<f64>()
                / n as f64
        })
        .collect();
    if !(acov[0] > 0.0) {
        return vec![0.0; p];
    }
    let mut phi = vec![0.0; p];
    let mut prev = vec![0.0; p];
    let mut err = acov[0];
    for k in 0..p {
        let mut num = acov[k + 1];
        for j in 0..k {
            num -= prev[j] * acov[k - j];
        }
        let refl = num / err;
        phi[k] = refl;
        for j in 0..k {
            phi[j] = prev[j] - refl * prev[k - 1 - j];
        }
        err *= 1.0 - refl * refl;
        if !(err > 0.0) {
            return vec![0.0; p];
        }
        prev[..=k].copy_from_slice(&phi[..=k]);
    }
    phi
}

struct Problem {
    order: ArimaOrder,
    y: Vec<f64>,
    z: Vec<f64>,
    intercept: f64,
    scale: f64,
}

impl Problem {
    fn new(series: &TimeSeries, order: ArimaOrder) -> Result<Self> {
        let y = series.observed()?;
        let needed = order.min_length();
        if y.len() < needed {
            return Err(Error::InsufficientLength { needed, got: y.len() });
        }
        let w = difference_slice(&y, order.d);
        let intercept = if order.d == 0 {
            w.iter().sum::<f64>() / w.len() as f64
        } else {
            0.0
        };
        let z: Vec<f64> = w.iter().map(|v| v - intercept).collect();
        let scale = z[order.p..].iter().map(|v| v * v).sum::<f64>();
        let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
        Ok(Self { order, y, z, intercept, scale })
    }

    /// Normalized CSS plus the unit-circle barrier.
    fn objective(&self, params: &[f64], buf: &mut Vec<f64>) -> f64 {
        let (ar, ma) = params.split_at(self.order.p);
        let radius = roots::ar_radius(ar).max(roots::ma_radius(ma));
        if !(radius < ROOT_BOUND) {
            let excess = if radius.is_finite() { radius - ROOT_BOUND } else { 1e6 };
            return PENALTY * (1.0 + excess);
        }
        conditional_sum_of_squares(&self.z, ar, ma, buf) / self.scale
    }

    fn start(&self) -> Vec<f64> {
        let mut ar = yule_walker(&self.z, self.order.p);
        if !roots::is_stationary(&ar) {
            ar.iter_mut().for_each(|c| *c = 0.0);
        }
        ar.resize(self.order.p + self.order.q, 0.0);
        ar
    }
}

/// Fits ARIMA(p,d,q) by minimizing the conditional sum of squares, starting
/// from Yule-Walker AR estimates and zero MA terms.
pub fn fit(series: &TimeSeries, order: ArimaOrder) -> Result<(ArimaModel, FitDiagnostics)> {
    let problem = Problem::new(series, order)?;
    let start = problem.start();
    estimate(problem, start)
}

/// Like [`fit`] but starts the optimizer at `start = [phi.., theta..]`.
pub fn fit_from(
    series: &TimeSeries,
    order: ArimaOrder,
    start: &[f64],
) -> Result<(ArimaModel, FitDiagnostics)> {
    if start.len() != order.p + order.q {
        return Err(Error::ArityMismatch { expected: order.p + order.q, got: start.len() });
    }
    let problem = Problem::new(series, order)?;
    estimate(problem, start.to_vec())
}

fn estimate(problem: Problem, start: Vec<f64>) -> Result<(ArimaModel, FitDiagnostics)> {
    let order = problem.order;
    let k = order.p + order.q;
    let mut buf = Vec::with_capacity(problem.z.len());

    let (params, iterations, converged) = if k == 0 {
        (Vec::new(), 0, true)
    } else {
        let budget = 2000 * (k + 1);
        let mut opts = NelderMeadOptions { max_iter: budget, ..Default::default() };
        let mut best = nelder_mead(|x| problem.objective(x, &mut buf), &start, &opts);
        let mut used = best.iterations;
        let mut restarts = 0;
        // restart from the optimum until the simplex stops finding improvements
        while best.converged && restarts < MAX_RESTARTS && used < budget {
            opts.max_iter = budget - used;
            let next = nelder_mead(|x| problem.objective(x, &mut buf), &best.x, &opts);
            used += next.iterations;
            restarts += 1;
            let gain = best.f - next.f;
            let done = gain <= opts.f_tol;
            if next.f <= best.f {
                best = next;
            }
            if done {
                break;
            }
        }
        (best.x, used, best.converged)
    };

    let (ar, ma) = params.split_at(order.p);
    let css = conditional_sum_of_squares(&problem.z, ar, ma, &mut buf);
    let residuals = buf;
    let n_eff = residuals.len();
    let sigma2 = (css / n_eff as f64).max(SIGMA2_FLOOR);
    let n_obs = problem.y.len();
    let log_likelihood =
        -(n_obs as f64 / 2.0) * ((2.0 * std::f64::consts::PI * sigma2).ln() + 1.0);

    let offset = order.d + order.p;
    let fitted = residuals
        .iter()
        .enumerate()
        .map(|(i, e)| problem.y[offset + i] - e)
        .collect();
    let tail_len = ArimaModel::tail_len(&order);
    let model = ArimaModel {
        order,
        ar_coeffs: ar.to_vec(),
        ma_coeffs: ma.to_vec(),
        intercept: problem.intercept,
        sigma2,
        log_likelihood,
        n_obs,
        tail: problem.y[n_obs - tail_len..].to_vec(),
        tail_residuals: residuals[n_eff - order.q..].to_vec(),
    };
    let diagnostics = FitDiagnostics {
        converged,
        iterations,
        final_objective: css,
        residuals,
        fitted,
    };
    Ok((model, diagnostics))
}
