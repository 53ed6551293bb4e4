use super::ArimaModel;
use crate::preprocess::{difference_slice, integrate_slice};

/// Iterates the ARMA recursion past the end of the sample with future
/// innovations set to zero, then undoes the differencing using the stored tail.
pub fn forecast(model: &ArimaModel, horizon: usize) -> Vec<f64> {
    let o = model.order;
    let w_tail = difference_slice(&model.tail, o.d);
    let mut z: Vec<f64> = w_tail[w_tail.len() - o.p..]
        .iter()
        .map(|w| w - model.intercept)
        .collect();
    let mut e = model.tail_residuals.clone();

    let mut w_hat = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let mut next = 0.0;
        for (i, phi) in model.ar_coeffs.iter().enumerate() {
            next += phi * z[z.len() - 1 - i];
        }
        for (j, theta) in model.ma_coeffs.iter().enumerate() {
            next += theta * e[e.len() - 1 - j];
        }
        z.push(next);
        e.push(0.0);
        w_hat.push(next + model.intercept);
    }

    let heads = &model.tail[model.tail.len() - o.d..];
    integrate_slice(&w_hat, o.d, heads).expect("tail holds at least d values")
}
