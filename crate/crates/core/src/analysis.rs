//! Uncertainty relations, violation searches and efficiency at maximum work.

use rayon::prelude::*;
use serde::Serialize;

use crate::engine::{self, EngineParams, Regime};
use crate::error::{Error, Result};
use crate::optimize::{self, Optimum};
use crate::scalar::Real;
use crate::spectral;
use crate::thermal;

/// Relative slack allowed when checking `var(W)/<W>^2 >= 2/<Sigma> - 1`.
pub const TUR_TOL: f64 = 1e-10;

/// Outcome of [`tur_bound_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TurCheck<T> {
    /// `var(W) / <W>^2`.
    pub lhs: T,
    /// `2 / <Sigma> - 1`.
    pub rhs: T,
    /// `var(W) <Sigma> / <W>^2`.
    pub ratio: T,
    pub bound_holds: bool,
    /// `lhs < 2 / <Sigma>`: the standard relation fails.
    pub standard_violation: bool,
}

pub fn tur_bound_check<T: Real>(p: &EngineParams<T>) -> Result<TurCheck<T>> {
    let m = spectral::moment_set(p);
    let lhs = m.inverse_snr().ok_or(Error::DegenerateMean)?;
    let sigma = m.entropy_production;
    let two = T::lit(2.0);
    let rhs = two / sigma - T::one();
    let slack = T::lit(TUR_TOL) * rhs.abs().max(T::one());
    Ok(TurCheck {
        lhs,
        rhs,
        ratio: lhs * sigma,
        bound_holds: lhs >= rhs - slack,
        standard_violation: lhs < two / sigma,
    })
}

/// `var(W) <Sigma> / <W>^2` as a function of `x = beta_a omega_a`,
/// `y = beta_b omega_b`; the spacings cancel. Equals `(y - x) f - sin^2(theta) (y - x) (N_x - N_y)`.
pub fn tur_ratio(x: f64, y: f64, d: usize, theta: f64) -> Result<f64> {
    let f = spectral::snr_kernel(x, y, d)?;
    let s2 = theta.sin().powi(2);
    if s2 == 0.0 {
        return Err(Error::DegenerateMean);
    }
    let dn = thermal::mean_occupation(x, d)? - thermal::mean_occupation(y, d)?;
    Ok((y - x) * f - s2 * (y - x) * dn)
}

/// `(y - x) f(x, y, d)`, conjectured to be at least 2.
pub fn kernel_product(x: f64, y: f64, d: usize) -> Result<f64> {
    Ok((y - x) * spectral::snr_kernel(x, y, d)?)
}

/// `(d + 1 + 3 (d - 1) cos^2 theta) / (3 (d - 1) sin^2 theta)`, the infimum of
/// `var(W)/<W>^2` reached for `x_a -> 0`, `x_b -> infinity`.
pub fn ultimate_snr_limit<T: Real>(d: usize, theta: T) -> Result<T> {
    if d < 2 {
        return Err(Error::InvalidParams(format!("d >= 2 violated (d = {d})")));
    }
    let s2 = theta.sin().powi(2);
    if s2 <= T::epsilon() * T::epsilon() {
        return Err(Error::Domain(format!("theta = {theta} is a multiple of pi")));
    }
    let c2 = T::one() - s2;
    let dm1 = T::from_usize_lossy(d - 1);
    let three = T::lit(3.0);
    Ok((T::from_usize_lossy(d + 1) + three * dm1 * c2) / (three * dm1 * s2))
}

/// Location and value of the smallest `var(W) <Sigma> / <W>^2` along `x_b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ViolationExtremum {
    pub x_a: f64,
    pub x_b: f64,
    pub ratio: f64,
    pub converged: bool,
}

pub const VIOLATION_BRACKET: (f64, f64) = (0.5, 5.0);
pub const VIOLATION_PIN: f64 = 1e-4;

/// Minimizes the TUR ratio over `x_b` in [`VIOLATION_BRACKET`] at fixed `x_a`.
pub fn strongest_violation(d: usize, theta: f64, x_a: f64) -> Result<ViolationExtremum> {
    tur_ratio(x_a, VIOLATION_BRACKET.1, d, theta)?;
    let o = optimize::grid_then_golden_min(
        |y| tur_ratio(x_a, y, d, theta).unwrap_or(f64::INFINITY),
        VIOLATION_BRACKET.0,
        VIOLATION_BRACKET.1,
        200,
        false,
        1e-10,
    );
    Ok(ViolationExtremum {
        x_a,
        x_b: o.x,
        ratio: o.value,
        converged: o.converged && !o.at_boundary,
    })
}

/// One point of a TUR scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TurScanPoint {
    pub d: usize,
    pub theta: f64,
    pub x_a: f64,
    pub x_b: f64,
    /// `None` when the mean work vanishes.
    pub ratio: Option<f64>,
    pub violation: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TurScanResult {
    pub points: Vec<TurScanPoint>,
    pub violation_count: usize,
}

/// Logarithmic grid of `n` points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp()).collect()
}

fn scan_point(d: usize, theta: f64, x_a: f64, x_b: f64) -> TurScanPoint {
    let ratio = tur_ratio(x_a, x_b, d, theta).ok();
    TurScanPoint {
        d,
        theta,
        x_a,
        x_b,
        ratio,
        violation: ratio.is_some_and(|r| r < 2.0),
    }
}

/// Evaluates the ratio on the product grid `xs x ys`, rows in parallel.
pub fn tur_scan(d: usize, theta: f64, xs: &[f64], ys: &[f64]) -> TurScanResult {
    let points: Vec<TurScanPoint> = xs
        .par_iter()
        .flat_map_iter(|&x| ys.iter().map(move |&y| scan_point(d, theta, x, y)))
        .collect();
    let violation_count = points.iter().filter(|p| p.violation).count();
    TurScanResult { points, violation_count }
}

pub const REGION_GRID: usize = 400;
pub const REGION_RANGE: (f64, f64) = (1e-2, 1e1);

/// Number of points of the fixed `400 x 400` logarithmic grid over
/// `[1e-2, 1e1]^2` where the standard relation fails.
pub fn violation_region_count(d: usize, theta: f64) -> usize {
    let g = log_grid(REGION_RANGE.0, REGION_RANGE.1, REGION_GRID);
    g.par_iter()
        .map(|&x| g.iter().filter(|&&y| scan_point(d, theta, x, y).violation).count())
        .sum()
}

/// Efficiency at maximum work for fixed bath temperatures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxWorkResult {
    pub d: usize,
    pub tb_over_ta: f64,
    pub eta_m: f64,
    pub eta_ca: f64,
    pub eta_c: f64,
    /// `beta_b omega_b` at the optimum.
    pub x_b_opt: f64,
    /// `|<W>|` at the optimum with `T_b = 1`.
    pub max_work: f64,
    pub converged: bool,
    pub residual: f64,
}

const X_RANGE: (f64, f64) = (1e-6, 50.0);
const MAX_WORK_GRID: usize = 200;
const MAX_WORK_TOL: f64 = 1e-8;

/// `|<W>|` with `T_b = 1` as a function of efficiency and `x = beta_b omega_b / 2`:
/// `2 x eta/(1 - eta) [g(2 x r) - g(2 x)]` with `r = (1 - eta_c)/(1 - eta)`.
fn extracted_work(d: usize, tau: f64, eta: f64, x: f64) -> f64 {
    let r = tau / (1.0 - eta);
    let ga = thermal::occupation_unchecked(2.0 * x * r, d);
    let gb = thermal::occupation_unchecked(2.0 * x, d);
    2.0 * x * eta / (1.0 - eta) * (ga - gb)
}

fn best_x(d: usize, tau: f64, eta: f64) -> Optimum {
    optimize::grid_then_golden_max(
        |x| extracted_work(d, tau, eta, x),
        X_RANGE.0,
        X_RANGE.1,
        MAX_WORK_GRID,
        true,
        MAX_WORK_TOL,
    )
}

/// Maximizes `|<W>|` over level spacings at fixed `T_b/T_a`, returning the
/// Otto efficiency at the optimum. The coupling only rescales the work.
pub fn efficiency_at_max_work(d: usize, tb_over_ta: f64, theta: f64) -> Result<MaxWorkResult> {
    if d < 2 {
        return Err(Error::InvalidParams(format!("d >= 2 violated (d = {d})")));
    }
    if !(tb_over_ta > 0.0 && tb_over_ta < 1.0) {
        return Err(Error::Domain(format!("T_b/T_a = {tb_over_ta} outside (0, 1)")));
    }
    let s2 = theta.sin().powi(2);
    if s2 == 0.0 {
        return Err(Error::Domain("no work is extracted at sin(theta) = 0".into()));
    }
    let eta_c = 1.0 - tb_over_ta;
    let outer = optimize::grid_then_golden_max(
        |eta| best_x(d, tb_over_ta, eta).value,
        eta_c * 1e-9,
        eta_c * (1.0 - 1e-9),
        MAX_WORK_GRID,
        false,
        MAX_WORK_TOL,
    );
    let inner = best_x(d, tb_over_ta, outer.x);
    Ok(MaxWorkResult {
        d,
        tb_over_ta,
        eta_m: outer.x,
        eta_ca: engine::curzon_ahlborn(tb_over_ta),
        eta_c,
        x_b_opt: 2.0 * inner.x,
        max_work: s2 * inner.value,
        converged: outer.converged && inner.converged && !outer.at_boundary && !inner.at_boundary,
        residual: outer.residual.max(inner.residual),
    })
}

/// Efficiency against its second-moment bound `eta_c / (1 + 2 T_b <-W> / <W^2>)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EfficiencyBound<T> {
    pub eta: T,
    pub bound: T,
    pub holds: bool,
}

pub fn efficiency_bound_check<T: Real>(p: &EngineParams<T>) -> Result<EfficiencyBound<T>> {
    let regime = engine::classify_regime(p);
    if !matches!(regime, Regime::HeatEngine | Regime::Boundary) {
        return Err(Error::RegimeMismatch {
            expected: Regime::HeatEngine.as_str(),
            found: regime.as_str(),
        });
    }
    let eta_c = engine::carnot_efficiency(p);
    let w2 = spectral::second_moment_work(p);
    let extracted = -engine::mean_work(p);
    let bound = if w2 == T::zero() {
        eta_c
    } else {
        eta_c / (T::one() + T::lit(2.0) * extracted / (p.beta_b * w2))
    };
    let eta = engine::otto_efficiency(p).value;
    Ok(EfficiencyBound {
        eta,
        bound,
        holds: eta <= bound + T::lit(1e-12),
    })
}

/// Sign check of `cov(W, Q_H)`: negative for engines and refrigerators,
/// positive for accelerators. `None` on a boundary or without fluctuations.
pub fn covariance_sign_matches<T: Real>(p: &EngineParams<T>) -> Option<bool> {
    let cov = spectral::moment_set(p).cov_w_qh;
    if cov == T::zero() {
        return None;
    }
    match engine::classify_regime(p) {
        Regime::HeatEngine | Regime::Refrigerator => Some(cov < T::zero()),
        Regime::ThermalAccelerator => Some(cov > T::zero()),
        Regime::Boundary => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    #[test]
    fn ratio_matches_moment_set() {
        let p = EngineParams::<f64>::from_products(3, 1.0, 0.4, 0.3, 1.9, 1.2).unwrap();
        let c = tur_bound_check(&p).unwrap();
        let r = tur_ratio(0.3, 1.9, 3, 1.2).unwrap();
        assert!((c.ratio - r).abs() < 1e-12 * r);
        assert!(c.bound_holds);
    }

    #[test]
    fn strongest_qubit_violation() {
        let v = strongest_violation(2, FRAC_PI_2, VIOLATION_PIN).unwrap();
        assert!((v.ratio - 1.864496).abs() < 1e-5, "{v:?}");
        assert!((v.x_b - 2.01016).abs() < 1e-3, "{v:?}");
        assert!(v.converged);
    }

    #[test]
    fn ultimate_limit_values() {
        assert!((ultimate_snr_limit(2, FRAC_PI_2).unwrap() - 1.0).abs() < 1e-15);
        assert!((ultimate_snr_limit(4, FRAC_PI_2).unwrap() - 5.0 / 9.0).abs() < 1e-15);
        // (5 + 9/4) / (9 * 3/4)
        assert!((ultimate_snr_limit(4, FRAC_PI_3).unwrap() - 29.0 / 27.0).abs() < 1e-14);
        assert!(ultimate_snr_limit(4, 0.0).is_err());
        assert!(ultimate_snr_limit(4, std::f64::consts::PI).is_err());
    }

    #[test]
    fn degenerate_mean_is_an_error() {
        let p = EngineParams::<f64>::new(3, 1.0, 1.0, 0.5, 1.0, 1.0).unwrap();
        assert_eq!(tur_bound_check(&p), Err(Error::DegenerateMean));
        assert!(tur_ratio(0.7, 0.7, 3, 1.0).is_err());
    }

    #[test]
    fn max_work_qubit_beats_curzon_ahlborn() {
        let r = efficiency_at_max_work(2, 0.5, FRAC_PI_2).unwrap();
        assert!((r.eta_m - 0.2963).abs() < 5e-4, "{r:?}");
        assert!(r.eta_m > r.eta_ca && r.eta_m < r.eta_c);
        assert!(r.converged);
        assert!(efficiency_at_max_work(2, 1.0, 1.0).is_err());
    }

    #[test]
    fn efficiency_bound_at_carnot_point() {
        let p = EngineParams::<f64>::new(4, 2.0, 1.0, 0.5, 1.0, 0.8).unwrap();
        let b = efficiency_bound_check(&p).unwrap();
        assert!((b.eta - 0.5).abs() < 1e-15 && (b.bound - 0.5).abs() < 1e-15 && b.holds);
        let fridge = EngineParams::<f64>::new(4, 3.0, 1.0, 0.5, 1.0, 0.8).unwrap();
        assert!(matches!(efficiency_bound_check(&fridge), Err(Error::RegimeMismatch { .. })));
    }

    #[test]
    fn covariance_signs() {
        let base = EngineParams::<f64>::new(4, 1.0, 0.6, 0.5, 1.0, 1.0).unwrap();
        assert_eq!(covariance_sign_matches(&base), Some(true));
        let fridge = EngineParams::<f64>::new(4, 3.0, 1.0, 0.5, 1.0, 1.0).unwrap();
        assert_eq!(covariance_sign_matches(&fridge), Some(true));
        let acc = EngineParams::<f64>::new(4, 1.0, 1.5, 0.5, 1.0, 1.0).unwrap();
        assert_eq!(covariance_sign_matches(&acc), Some(true));
    }

    #[test]
    fn log_grid_ends() {
        let g = log_grid(1e-2, 1e1, 400);
        assert_eq!(g.len(), 400);
        assert!((g[0] - 1e-2).abs() < 1e-16 && (g[399] - 10.0).abs() < 1e-13);
    }
}
