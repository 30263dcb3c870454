mod common;

use common::{gaussian_design, logistic_nll, rel_err};
use hdlss_hybrid::linear::{
    self, fit, fit_with_order, lambda_max, logistic_loss_and_gradient, objective, sample_weights, PenaltyConfig,
    PenaltyKind,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn tight(mut p: PenaltyConfig) -> PenaltyConfig {
    p.tol = 1e-11;
    p.max_iters = 20_000;
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn objective_never_increases(seed in any::<u64>(), kind in 0usize..3, lam in 0.001..0.2f64) {
        let x = gaussian_design(60, 15, 3, 1.5, seed);
        let penalty = match kind {
            0 => PenaltyConfig::l1(lam),
            1 => PenaltyConfig::l2(lam),
            _ => PenaltyConfig::elastic_net(lam, 0.3),
        };
        let m = fit(&x, &penalty).unwrap();
        let ybar = {
            let a = sample_weights(&x.labels, true).unwrap();
            let t: f64 = a.iter().sum();
            a.iter().zip(&x.labels).filter(|(_, &y)| y).map(|(w, _)| w / t).sum::<f64>()
        };
        let start = objective(x.view(), &x.labels, &[0.0; 15], (ybar / (1.0 - ybar)).ln(), &penalty).unwrap();
        let mut prev = start;
        for &f in &m.objective_trace {
            prop_assert!(f <= prev + 1e-10, "objective rose from {prev} to {f}");
            prev = f;
        }
    }

    #[test]
    fn logistic_gradient_matches_finite_differences(seed in any::<u64>()) {
        let x = gaussian_design(5, 8, 2, 1.0, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        use rand::Rng;
        let w: Vec<f64> = (0..8).map(|_| rng.random_range(-1.0..1.0)).collect();
        let b: f64 = rng.random_range(-0.5..0.5);
        let sw = sample_weights(&x.labels, true).unwrap();
        let (loss, grad, grad_b) = logistic_loss_and_gradient(x.view(), &x.labels, &sw, &w, b);
        prop_assert!((loss - logistic_nll(x.view(), &x.labels, &sw, &w, b)).abs() < 1e-12);
        let h = 1e-5;
        for j in 0..8 {
            let mut up = w.clone();
            let mut dn = w.clone();
            up[j] += h;
            dn[j] -= h;
            let fd = (logistic_nll(x.view(), &x.labels, &sw, &up, b) - logistic_nll(x.view(), &x.labels, &sw, &dn, b)) / (2.0 * h);
            prop_assert!(rel_err(grad[j], fd) < 1e-5, "coord {j}: {} vs {fd}", grad[j]);
        }
        let fd_b = (logistic_nll(x.view(), &x.labels, &sw, &w, b + h) - logistic_nll(x.view(), &x.labels, &sw, &w, b - h)) / (2.0 * h);
        prop_assert!(rel_err(grad_b, fd_b) < 1e-5);
    }

    #[test]
    fn l2_solution_ignores_coordinate_order(seed in any::<u64>()) {
        let x = gaussian_design(50, 12, 3, 1.0, seed);
        let p = tight(PenaltyConfig::l2(0.05));
        let base = fit(&x, &p).unwrap();
        let mut order: Vec<usize> = (0..12).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let shuffled = fit_with_order(x.view(), &x.labels, &p, &order).unwrap();
        for (a, b) in base.weights.iter().zip(&shuffled.weights) {
            prop_assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn elastic_net_endpoints_reduce(seed in any::<u64>(), lam in 0.005..0.1f64) {
        let x = gaussian_design(50, 10, 3, 1.0, seed);
        let l1 = fit(&x, &PenaltyConfig::l1(lam)).unwrap();
        let l2 = fit(&x, &PenaltyConfig::l2(lam)).unwrap();
        let e1 = fit(&x, &PenaltyConfig::elastic_net(lam, 1.0)).unwrap();
        let e0 = fit(&x, &PenaltyConfig::elastic_net(lam, 0.0)).unwrap();
        let tol = PenaltyConfig::default().tol;
        for (a, b) in l1.weights.iter().zip(&e1.weights) {
            prop_assert!((a - b).abs() <= tol);
        }
        for (a, b) in l2.weights.iter().zip(&e0.weights) {
            prop_assert!((a - b).abs() <= tol);
        }
    }
}

#[test]
fn sparsity_shrinks_along_lambda_grid() {
    for seed in 0..5 {
        let x = gaussian_design(80, 30, 5, 1.0, seed);
        let top = lambda_max(x.view(), &x.labels, true).unwrap();
        let mut prev = usize::MAX;
        for i in 0..10 {
            let lam = top * 0.02 * (50.0f64).powf(i as f64 / 9.0);
            let nz = fit(&x, &tight(PenaltyConfig::l1(lam))).unwrap().nonzero_count();
            assert!(nz <= prev, "seed {seed}: {nz} non-zeros after {prev} at lambda {lam}");
            prev = nz;
        }
    }
}

#[test]
fn above_lambda_max_everything_is_zero() {
    for seed in 0..10 {
        let x = gaussian_design(40, 20, 4, 1.0, seed);
        let top = lambda_max(x.view(), &x.labels, true).unwrap();
        let m = fit(&x, &PenaltyConfig::l1(1.1 * top)).unwrap();
        assert_eq!(m.nonzero_count(), 0);
        let just_below = fit(&x, &PenaltyConfig::l1(0.9 * top)).unwrap();
        assert!(just_below.nonzero_count() > 0);
    }
}

#[test]
fn predict_proba_is_sigmoid_of_scores() {
    let x = gaussian_design(30, 6, 2, 1.0, 3);
    let m = fit(&x, &PenaltyConfig::l2(0.01)).unwrap();
    let probs = m.predict_proba(x.view()).unwrap();
    for (i, p) in probs.iter().enumerate() {
        let s: f64 = x.values.row(i).iter().zip(&m.weights).map(|(a, b)| a * b).sum::<f64>() + m.intercept;
        assert!((p - 1.0 / (1.0 + (-s).exp())).abs() < 1e-14);
    }
}

#[test]
fn model_json_round_trips() {
    let x = gaussian_design(30, 6, 2, 1.0, 4);
    let m = fit(&x, &PenaltyConfig::elastic_net(0.02, 0.4)).unwrap();
    let back: linear::LinearModel = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
    assert_eq!(back.weights, m.weights);
    assert_eq!(back.penalty.kind, PenaltyKind::ElasticNet);
    assert_eq!(back.predict_proba(x.view()).unwrap(), m.predict_proba(x.view()).unwrap());
}
