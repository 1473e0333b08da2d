use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_PI_2;
use swapengine::finite_time::{
    finite_time_inverse_snr, iterate_occupations, optimal_power, params_from_occupations, scaled_power,
    starred_params, steady_moments, steady_occupations, steady_state,
};
use swapengine::spectral::{efficiency_is_nonfluctuating, moment_set, verify_detailed_ft};
use swapengine::{EngineParams64, FiniteTimeParams64};

fn base() -> EngineParams64 {
    EngineParams64::new(6, 1.0, 0.4, 0.35, 1.6, FRAC_PI_2).unwrap()
}

fn ftp(aa: f64, ab: f64, tq: f64, tw: f64) -> FiniteTimeParams64 {
    FiniteTimeParams64::new(base(), aa, ab, tq, tw).unwrap()
}

#[test]
fn closed_form_is_the_recursion_fixed_point() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..500 {
        let (aa, ab): (f64, f64) = (rng.gen_range(0.05..5.0), rng.gen_range(0.05..5.0));
        let tq = rng.gen_range((0.1 / (aa + ab)).ln()..(20.0f64).ln()).exp();
        let f = ftp(aa, ab, tq, 0.0);
        let c = steady_occupations(&f);
        let it = iterate_occupations(&f, 1000);
        assert!((c.0 - it.0).abs() < 1e-12 && (c.1 - it.1).abs() < 1e-12, "{aa} {ab} {tq}");
        let diff = (1.0 - (-aa * tq).exp()) * (1.0 - (-ab * tq).exp()) / (1.0 - (-(aa + ab) * tq).exp());
        assert!(((c.0 - c.1) - diff * (base().n_a() - base().n_b())).abs() < 1e-13);
        let s = steady_state(&f).unwrap();
        assert!(s.n_a_star > 0.0 && s.n_a_star < 2.5 && s.n_b_star > 0.0 && s.n_b_star < 2.5);
    }
}

#[test]
fn efficiency_is_independent_of_stroke_time() {
    for tq in [0.01, 0.05, 0.1, 0.3, 0.7, 1.0, 2.0, 4.0, 9.0, 30.0] {
        let m = steady_moments(&ftp(1.0, 0.7, tq, 0.0)).unwrap();
        assert!((-m.mean_w / m.mean_qh - 0.6).abs() < 1e-12);
        let star = starred_params(&ftp(1.0, 0.7, tq, 0.0)).unwrap();
        assert!(efficiency_is_nonfluctuating(&star).constant);
        let ft = verify_detailed_ft(&star);
        assert!(ft.max_deviation < 1e-9);
    }
}

#[test]
fn power_limit_and_monotone_decay() {
    let zero = scaled_power(&ftp(1.0, 1.0, 0.0, 0.0));
    assert!((zero - 0.5).abs() < 1e-15);
    let tiny = scaled_power(&ftp(1.0, 1.0, 1e-6, 0.0));
    assert!((tiny - 0.5).abs() < 1e-9);
    let grid = swapengine::analysis::log_grid(1e-4, 50.0, 300);
    let curve: Vec<f64> = grid.iter().map(|&t| scaled_power(&ftp(1.0, 1.0, t, 0.0))).collect();
    assert!(curve.windows(2).all(|w| w[1] < w[0]));
    let direct = (1.0f64).tanh() / 2.0;
    let f = ftp(1.0, 1.0, 2.0, 0.0);
    let (a, b) = steady_occupations(&f);
    let unit = (base().omega_a - base().omega_b) * (base().n_a() - base().n_b());
    assert!(((base().omega_a - base().omega_b) * (a - b) / 2.0 / unit - direct).abs() < 1e-14);
}

#[test]
fn optimal_stroke_time_against_dense_grid() {
    let mut last = 0.0;
    for tw in [0.1, 1.0, 10.0] {
        let o = optimal_power(&ftp(1.0, 1.0, 1.0, tw)).unwrap();
        assert!(o.tau_q > 0.0 && o.tau_q.is_finite() && !o.boundary && o.converged);
        let grid = swapengine::analysis::log_grid(1e-3, 50.0, 20000);
        let (best, _) = grid
            .iter()
            .map(|&t| (t, scaled_power(&ftp(1.0, 1.0, t, tw))))
            .fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        let step = (50.0f64 / 1e-3).ln() / 19999.0;
        assert!((o.tau_q.ln() - best.ln()).abs() < 2.0 * step, "{tw}: {} {best}", o.tau_q);
        assert!(o.tau_q > last);
        last = o.tau_q;
    }
    let ideal = optimal_power(&ftp(1.0, 1.0, 1.0, 0.0)).unwrap();
    assert!(ideal.boundary && ideal.tau_q == 0.0);
}

#[test]
fn snr_degrades_with_shorter_strokes() {
    let mut prev: Option<Vec<f64>> = None;
    for tq in [f64::INFINITY, 3.0, 2.0, 1.0] {
        let curve: Vec<f64> = (1..20)
            .map(|i| {
                let na = 2.0 + 0.1 * i as f64;
                let p = params_from_occupations(9, 1.0, 0.5, na, 2.0).unwrap();
                let f = FiniteTimeParams64::new(p, 1.0, 1.0, tq, 0.0).unwrap();
                1.0 / finite_time_inverse_snr(&f).unwrap()
            })
            .collect();
        if let Some(prev) = &prev {
            assert!(prev.iter().zip(&curve).all(|(a, b)| b < a));
        }
        prev = Some(curve);
    }
}

#[test]
fn entropy_production_uses_bath_temperatures() {
    let f = ftp(1.0, 2.0, 0.8, 0.0);
    let m = steady_moments(&f).unwrap();
    let (a, b) = steady_occupations(&f);
    assert!((m.entropy_production - (base().x_b() - base().x_a()) * (a - b)).abs() < 1e-15);
    let ideal = steady_moments(&ftp(1.0, 2.0, f64::INFINITY, 0.0)).unwrap();
    let reference = moment_set(&base());
    assert!((ideal.var_w - reference.var_w).abs() < 1e-10);
    assert!((ideal.entropy_production - reference.entropy_production).abs() < 1e-15);
}
