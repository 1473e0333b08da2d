use proptest::prelude::*;
use std::f64::consts::PI;
use swapengine::analysis::{covariance_sign_matches, efficiency_bound_check, kernel_product, tur_bound_check};
use swapengine::engine::{self, classify_regime, Regime};
use swapengine::spectral::{
    characteristic_function, efficiency_is_nonfluctuating, joint_distribution, moment_set, snr_identity_rhs,
    CountingPoint,
};
use swapengine::{thermal, EngineParams64};

fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

prop_compose! {
    fn params()(d in 2usize..=32, wa in 0.1f64..5.0, wb in 0.1f64..5.0,
                xa in log_uniform(1e-3, 1e2), xb in log_uniform(1e-3, 1e2),
                theta in 0.0f64..PI) -> EngineParams64 {
        EngineParams64::from_products(d, wa, wb, xa, xb, theta).unwrap()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn entropy_production_is_nonnegative(p in params()) {
        prop_assert!(engine::entropy_production(&p) >= 0.0);
    }

    #[test]
    fn first_law(p in params()) {
        let m = moment_set(&p);
        prop_assert!((m.mean_w + m.mean_qh + m.mean_qc).abs() <= 1e-12 * (1.0 + m.mean_qh.abs()));
    }

    #[test]
    fn characteristic_function_is_bounded(p in params(), l in -20.0f64..20.0, m in -20.0f64..20.0) {
        prop_assert!(characteristic_function(&p, CountingPoint::real(l, m)).norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn distribution_is_normalized_and_nonnegative(p in params()) {
        let dist = joint_distribution(&p);
        prop_assert!((dist.total() - 1.0).abs() < 1e-12);
        for n in dist.support() {
            prop_assert!(dist.prob(n) >= 0.0);
        }
    }

    #[test]
    fn efficiency_does_not_fluctuate(p in params()) {
        prop_assert!(efficiency_is_nonfluctuating(&p).constant);
    }

    #[test]
    fn variances_are_nonnegative(p in params()) {
        let m = moment_set(&p);
        prop_assert!(m.var_w >= 0.0 && m.var_qh >= 0.0);
        prop_assert!(m.cov_w_qh * m.cov_w_qh <= m.var_w * m.var_qh * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn generalized_tur_holds(p in params()) {
        if let Ok(c) = tur_bound_check(&p) {
            prop_assert!(c.bound_holds, "{:?} {:?}", p, c);
        }
    }

    #[test]
    fn kernel_product_at_least_two(d in 2usize..=32, x in log_uniform(1e-3, 1e2), y in log_uniform(1e-3, 1e2)) {
        if let Ok(k) = kernel_product(x, y, d) {
            prop_assert!(k >= 2.0 * (1.0 - 1e-10), "{} {} {} {}", x, y, d, k);
        }
    }

    #[test]
    fn covariance_sign_follows_regime(p in params()) {
        if let Some(ok) = covariance_sign_matches(&p) {
            prop_assert!(ok);
        }
    }

    #[test]
    fn efficiency_bound_holds_for_engines(p in params()) {
        if classify_regime(&p) == Regime::HeatEngine {
            let b = efficiency_bound_check(&p).unwrap();
            prop_assert!(b.holds, "{:?} {:?}", p, b);
        }
    }

    #[test]
    fn snr_identity(d in 2usize..=32, xa in log_uniform(0.05, 20.0), xb in log_uniform(0.05, 20.0), theta in 0.01f64..3.13) {
        prop_assume!((xa - xb).abs() > 1e-3);
        let p = EngineParams64::from_products(d, 1.0, 0.6, xa, xb, theta).unwrap();
        let lhs = moment_set(&p).inverse_snr().unwrap();
        let rhs = snr_identity_rhs(&p).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0), "{} {}", lhs, rhs);
    }

    #[test]
    fn occupation_inverse_round_trip(d in 2usize..=64, x in log_uniform(1e-3, 30.0)) {
        let n = thermal::mean_occupation(x, d).unwrap();
        let back = thermal::mean_occupation_inverse(n, d).unwrap();
        prop_assert!((back - x).abs() <= 1e-9 * x.max(1.0));
    }
}

#[test]
fn zero_entropy_limit_diverges() {
    let mut last = 0.0;
    for gap in [1e-1, 1e-2, 1e-3, 1e-4] {
        let p = EngineParams64::from_products(3, 1.0, 0.5, 1.0, 1.0 + gap, PI / 2.0).unwrap();
        let c = tur_bound_check(&p).unwrap();
        assert!(c.lhs > last && c.lhs >= c.rhs);
        last = c.lhs;
    }
    assert!(last > 1e6);
}
