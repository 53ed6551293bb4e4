use parima::arima::{fit, simulate_arima, ArimaOrder};
use parima::eval::{
    breusch_pagan, cv_boundaries, durbin_watson, paired_t_test, residual_diagnostics, rolling_origin_cv, shapiro_wilk,
    MIN_TRAIN_LEN,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

fn normals(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

#[test]
fn t_test_rejection_rate_is_calibrated() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let trials = 1000;
    let rejections = (0..trials)
        .filter(|_| {
            let a: Vec<f64> = (0..20).map(|_| rng.sample(StandardNormal)).collect();
            let b: Vec<f64> = (0..20).map(|_| rng.sample(StandardNormal)).collect();
            paired_t_test(&a, &b).unwrap().p_value < 0.05
        })
        .count();
    let rate = rejections as f64 / trials as f64;
    assert!((0.03..=0.07).contains(&rate), "rate {rate}");
}

#[test]
fn durbin_watson_on_white_noise() {
    let dw = durbin_watson(&normals(10000, 3)).unwrap();
    assert!((1.94..=2.06).contains(&dw), "dw {dw}");
}

#[test]
fn shapiro_wilk_power_and_size() {
    let exp = Exp::new(1.0).unwrap();
    let detected = (0..20u64)
        .filter(|&seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x: Vec<f64> = (0..50).map(|_| exp.sample(&mut rng)).collect();
            shapiro_wilk(&x).unwrap().p_value < 0.01
        })
        .count();
    assert!(detected >= 18, "{detected}/20");
    assert!(shapiro_wilk(&normals(50, 1)).unwrap().p_value > 0.05);
}

#[test]
fn breusch_pagan_flags_variance_growing_with_regressor() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let x: Vec<f64> = (0..500).map(|_| rng.random_range(1.0..10.0)).collect();
    let e: Vec<f64> = x
        .iter()
        .map(|xi| {
            let z: f64 = StandardNormal.sample(&mut rng);
            xi.sqrt() * z
        })
        .collect();
    let bp = breusch_pagan(&e, &[x]).unwrap();
    assert!(bp.p_value < 0.01, "p {}", bp.p_value);
}

#[test]
fn diagnostics_on_fitted_ar1() {
    let o: ArimaOrder = "1,0,0".parse().unwrap();
    let s = simulate_arima(o, &[0.7], &[], 1.0, 1.0, 1000, 5).unwrap();
    let (_, d) = fit(&s, o).unwrap();
    let r = residual_diagnostics(&d.residuals, &d.fitted).unwrap();
    assert!((1.8..=2.2).contains(&r.durbin_watson));
    assert!(r.shapiro_wilk.p_value > 0.01);
    assert!((0.0..=1.0).contains(&r.breusch_pagan.p_value));
}

#[test]
fn constant_series_cv_is_exact() {
    let s = parima::TimeSeries::from_values(&[7.5; 120]).unwrap();
    let r = rolling_origin_cv(&s, 3, 5, "0,0,0".parse().unwrap()).unwrap();
    assert!(r.folds.iter().all(|f| f.mae < 1e-6));
}

proptest! {
    #[test]
    fn cv_folds_never_leak(n in MIN_TRAIN_LEN..2000usize, folds in 2usize..10, horizon in 1usize..50) {
        match cv_boundaries(n, folds, horizon) {
            Ok(b) => {
                prop_assert_eq!(b.len(), folds);
                for (i, &(train_end, test_end)) in b.iter().enumerate() {
                    prop_assert!(train_end < test_end && test_end <= n);
                    prop_assert!(train_end >= MIN_TRAIN_LEN);
                    if i > 0 {
                        prop_assert!(train_end > b[i - 1].0);
                        prop_assert!(b[i - 1].1 <= test_end);
                    }
                }
                prop_assert_eq!(b[folds - 1].1, n);
            }
            Err(_) => prop_assert!(n < folds * horizon + MIN_TRAIN_LEN),
        }
    }

    #[test]
    fn durbin_watson_scale_invariant(seed in any::<u64>(), c in prop_oneof![-100.0f64..-0.01, 0.01f64..100.0]) {
        let e = normals(100, seed);
        let scaled: Vec<f64> = e.iter().map(|v| c * v).collect();
        let (a, b) = (durbin_watson(&e).unwrap(), durbin_watson(&scaled).unwrap());
        prop_assert!((a - b).abs() <= 1e-10 * a);
        prop_assert!((0.0..=4.0).contains(&a));
    }

    #[test]
    fn t_test_antisymmetric(seed in any::<u64>()) {
        let a = normals(15, seed);
        let b = normals(15, seed.wrapping_add(1));
        let (ab, ba) = (paired_t_test(&a, &b).unwrap(), paired_t_test(&b, &a).unwrap());
        prop_assert!((ab.t + ba.t).abs() <= 1e-12 * ab.t.abs().max(1.0));
        prop_assert!((ab.p_value - ba.p_value).abs() <= 1e-12);
    }

    #[test]
    fn shapiro_affine_invariant(seed in any::<u64>(), alpha in 0.01f64..100.0, beta in -1e3f64..1e3) {
        let x = normals(60, seed);
        let y: Vec<f64> = x.iter().map(|v| alpha * v + beta).collect();
        let (a, b) = (shapiro_wilk(&x).unwrap(), shapiro_wilk(&y).unwrap());
        prop_assert!((a.statistic - b.statistic).abs() <= 1e-8);
        prop_assert!(a.statistic <= 1.0 && a.statistic > 0.0);
    }

    #[test]
    fn breusch_pagan_bounds(seed in any::<u64>()) {
        let e = normals(80, seed);
        let x = normals(80, seed ^ 0xdead);
        let bp = breusch_pagan(&e, &[x]).unwrap();
        prop_assert!(bp.statistic >= 0.0);
        prop_assert!((0.0..=1.0).contains(&bp.p_value));
    }
}
