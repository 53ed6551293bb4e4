//! Paired t-test and the residual diagnostics battery: Shapiro-Wilk
//! normality, Durbin-Watson autocorrelation and Breusch-Pagan
//! heteroscedasticity.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF, Normal, StudentsT};

use crate::{Error, Result};

pub const SHAPIRO_MAX_N: usize = 5000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestStatistic {
    pub statistic: f64,
    pub p_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    pub df: usize,
    pub p_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsReport {
    pub shapiro_wilk: TestStatistic,
    pub durbin_watson: f64,
    pub breusch_pagan: TestStatistic,
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Two-sided paired t-test on `a - b`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::InsufficientLength { needed: 2, got: n });
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let m = mean(&diffs);
    let var = diffs.iter().map(|d| (d - m).powi(2)).sum::<f64>() / (n - 1) as f64;
    if !(var > 0.0) {
        return Err(Error::ZeroVariance);
    }
    let t = m / (var.sqrt() / (n as f64).sqrt());
    let df = n - 1;
    let dist = StudentsT::new(0.0, 1.0, df as f64).expect("df >= 1");
    let p_value = (2.0 * dist.sf(t.abs())).min(1.0);
    Ok(TTest { t, df, p_value })
}

/// `sum (e_t - e_{t-1})^2 / sum e_t^2`.
pub fn durbin_watson(residuals: &[f64]) -> Result<f64> {
    if residuals.len() < 2 {
        return Err(Error::InsufficientLength { needed: 2, got: residuals.len() });
    }
    let denom: f64 = residuals.iter().map(|e| e * e).sum();
    if !(denom > 0.0) {
        return Err(Error::DegenerateResiduals);
    }
    let num: f64 = residuals.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum();
    Ok((num / denom).clamp(0.0, 4.0))
}

/// `c[0] + c[1] x + c[2] x^2 + ...`
fn poly(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ci| acc * x + ci)
}

/// Shapiro-Wilk W with Royston's (AS R94) coefficient and p-value
/// approximations. Valid for `3 <= n <= 5000`.
pub fn shapiro_wilk(sample: &[f64]) -> Result<TestStatistic> {
    const C1: [f64; 6] = [0.0, 0.221157, -0.147981, -2.071190, 4.434685, -2.706056];
    const C2: [f64; 6] = [0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633];
    const C3: [f64; 4] = [0.544, -0.39978, 0.025054, -6.714e-4];
    const C4: [f64; 4] = [1.3822, -0.77857, 0.062767, -0.0020322];
    const C5: [f64; 4] = [-1.5861, -0.31082, -0.083751, 0.0038915];
    const C6: [f64; 3] = [-0.4803, -0.082676, 0.0030302];
    const G: [f64; 2] = [-2.273, 0.459];

    let n = sample.len();
    if !(3..=SHAPIRO_MAX_N).contains(&n) {
        return Err(Error::SampleSizeOutOfRange(n));
    }
    let mut x = sample.to_vec();
    x.sort_by(f64::total_cmp);
    if !(x[n - 1] - x[0] > 0.0) {
        return Err(Error::DegenerateRange);
    }

    let half = n / 2;
    let nf = n as f64;
    let std_normal = Normal::new(0.0, 1.0).expect("valid parameters");
    let mut a = vec![0.0; half];
    if n == 3 {
        a[0] = std::f64::consts::FRAC_1_SQRT_2;
    } else {
        let m: Vec<f64> = (1..=half)
            .map(|i| std_normal.inverse_cdf((i as f64 - 0.375) / (nf + 0.25)))
            .collect();
        let summ2 = 2.0 * m.iter().map(|v| v * v).sum::<f64>();
        let ssumm2 = summ2.sqrt();
        let rsn = 1.0 / nf.sqrt();
        let a1 = poly(&C1, rsn) - m[0] / ssumm2;
        let (first, fac) = if n > 5 {
            let a2 = -m[1] / ssumm2 + poly(&C2, rsn);
            a[1] = a2;
            let fac = ((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1])
                / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2))
                .sqrt();
            (2, fac)
        } else {
            (1, ((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1)).sqrt())
        };
        a[0] = a1;
        for i in first..half {
            a[i] = -m[i] / fac;
        }
    }

    // W is the squared correlation between the ordered sample and the
    // antisymmetric coefficient vector.
    let mut coef = vec![0.0; n];
    for i in 0..half {
        coef[i] = -a[i];
        coef[n - 1 - i] = a[i];
    }
    let range = x[n - 1] - x[0];
    let xs: Vec<f64> = x.iter().map(|v| v / range).collect();
    let (cm, xm) = (mean(&coef), mean(&xs));
    let (mut scc, mut sxx, mut scx) = (0.0, 0.0, 0.0);
    for (c, v) in coef.iter().zip(&xs) {
        let (dc, dx) = (c - cm, v - xm);
        scc += dc * dc;
        sxx += dx * dx;
        scx += dc * dx;
    }
    let w = (scx * scx / (scc * sxx)).clamp(0.0, 1.0);

    if n == 3 {
        const SIX_OVER_PI: f64 = 6.0 / std::f64::consts::PI;
        let stqr = (0.75f64).sqrt().asin();
        let p = (SIX_OVER_PI * (w.sqrt().asin() - stqr)).max(0.0);
        return Ok(TestStatistic { statistic: w, p_value: p.min(1.0) });
    }

    let mut y = (1.0 - w).ln();
    let (mu, sigma) = if n <= 11 {
        let gamma = poly(&G, nf);
        if y >= gamma {
            return Ok(TestStatistic { statistic: w, p_value: 1e-99 });
        }
        y = -(gamma - y).ln();
        (poly(&C3, nf), poly(&C4, nf).exp())
    } else {
        let ln_n = nf.ln();
        (poly(&C5, ln_n), poly(&C6, ln_n).exp())
    };
    let p_value = Normal::new(mu, sigma).expect("sigma > 0").sf(y);
    Ok(TestStatistic { statistic: w, p_value })
}

/// Koenker's studentized Breusch-Pagan test: regress squared residuals on an
/// intercept plus `columns` and use `LM = n R^2 ~ chi2(k)`.
pub fn breusch_pagan(residuals: &[f64], columns: &[Vec<f64>]) -> Result<TestStatistic> {
    let n = residuals.len();
    let k = columns.len();
    if k == 0 {
        return Err(Error::InvalidArgument("at least one regressor is required".into()));
    }
    if let Some(c) = columns.iter().find(|c| c.len() != n) {
        return Err(Error::LengthMismatch(n, c.len()));
    }
    if n <= k + 1 {
        return Err(Error::TooFewObservations { n, k });
    }

    let design = DMatrix::from_fn(n, k + 1, |i, j| if j == 0 { 1.0 } else { columns[j - 1][i] });
    let target = DVector::from_iterator(n, residuals.iter().map(|e| e * e));

    let svd = design.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let tol = smax * 1e-10 * n as f64;
    if svd.singular_values.iter().any(|&s| !(s > tol)) {
        return Err(Error::RankDeficient);
    }
    let beta = svd
        .solve(&target, 0.0)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let fitted = &design * beta;

    let ybar = target.mean();
    let sst: f64 = target.iter().map(|v| (v - ybar).powi(2)).sum();
    let ssr: f64 = target.iter().zip(fitted.iter()).map(|(y, f)| (y - f).powi(2)).sum();
    let r2 = if sst > 0.0 { (1.0 - ssr / sst).clamp(0.0, 1.0) } else { 0.0 };
    let lm = n as f64 * r2;
    let p_value = ChiSquared::new(k as f64).expect("k >= 1").sf(lm).clamp(0.0, 1.0);
    Ok(TestStatistic { statistic: lm, p_value })
}

/// Runs the full battery on one-step residuals. Breusch-Pagan uses the
/// one-step-ahead fitted values as its single regressor; Shapiro-Wilk sees the
/// most recent 5000 residuals when there are more.
pub fn residual_diagnostics(residuals: &[f64], fitted: &[f64]) -> Result<DiagnosticsReport> {
    if residuals.len() != fitted.len() {
        return Err(Error::LengthMismatch(residuals.len(), fitted.len()));
    }
    let sw_window = &residuals[residuals.len().saturating_sub(SHAPIRO_MAX_N)..];
    Ok(DiagnosticsReport {
        shapiro_wilk: shapiro_wilk(sw_window)?,
        durbin_watson: durbin_watson(residuals)?,
        breusch_pagan: breusch_pagan(residuals, &[fitted.to_vec()])?,
    })
}
