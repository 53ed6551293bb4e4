//! Unit-circle checks for the AR and MA polynomials via companion matrices.

use nalgebra::{DMatrix, Schur};

use super::ROOT_BOUND;

/// Largest modulus among the reciprocal roots of `1 + c_1 z + ... + c_k z^k`,
/// i.e. the spectral radius of its companion matrix. Returns infinity if the
/// eigenvalue iteration fails.
pub fn max_inverse_root_modulus(poly_tail: &[f64]) -> f64 {
    let k = poly_tail.len();
    match k {
        0 => 0.0,
        1 => poly_tail[0].abs(),
        2 => {
            // z^2 + c1 z + c2
            let (b, c) = (poly_tail[0], poly_tail[1]);
            let disc = b * b - 4.0 * c;
            if disc >= 0.0 {
                let s = disc.sqrt();
                ((-b + s) / 2.0).abs().max(((-b - s) / 2.0).abs())
            } else {
                c.abs().sqrt()
            }
        }
        _ => {
            if poly_tail.iter().any(|c| !c.is_finite()) {
                return f64::INFINITY;
            }
            let mut m = DMatrix::<f64>::zeros(k, k);
            for (j, c) in poly_tail.iter().enumerate() {
                m[(0, j)] = -c;
            }
            for i in 1..k {
                m[(i, i - 1)] = 1.0;
            }
            match Schur::try_new(m, 1e-14, 10_000) {
                Some(schur) => schur
                    .complex_eigenvalues()
                    .iter()
                    .map(|z| z.norm())
                    .fold(0.0, f64::max),
                None => f64::INFINITY,
            }
        }
    }
}

/// Spectral radius for `phi(B) = 1 - phi_1 B - ...`.
pub fn ar_radius(ar: &[f64]) -> f64 {
    let neg: Vec<f64> = ar.iter().map(|c| -c).collect();
    max_inverse_root_modulus(&neg)
}

/// Spectral radius for `theta(B) = 1 + theta_1 B + ...`.
pub fn ma_radius(ma: &[f64]) -> f64 {
    max_inverse_root_modulus(ma)
}

pub fn is_stationary(ar: &[f64]) -> bool {
    ar_radius(ar) < ROOT_BOUND
}

pub fn is_invertible(ma: &[f64]) -> bool {
    ma_radius(ma) < ROOT_BOUND
}
