//! Characteristic function of work and heat, second-order statistics, and the
//! closed-form joint distribution on the `(W, Q_H)` lattice.
//!
//! The characteristic function depends on the counting parameters only
//! through `xi = (omega_a - omega_b) lambda - omega_a mu`, so work and heat are
//! perfectly correlated: every outcome has `Q_H = n omega_a` and
//! `W = -n (omega_a - omega_b)` for a single integer `n` in `[-(d-1), d-1]`.
//! All moments are therefore moments of `n`, which is how they are evaluated
//! here. Numerical differentiation of the characteristic function is never
//! used.

use num_complex::Complex;
use serde::Serialize;

use crate::engine::{self, EngineParams, MomentSet};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::thermal;

/// Probabilities below this are treated as underflowed in ratio checks.
pub const PROBABILITY_FLOOR: f64 = 1e-300;

/// Highest joint moment order served by [`moments_from_chi`].
pub const MAX_MOMENT_ORDER: usize = 4;

/// A pair of counting parameters for work (`lambda`) and hot-bath heat (`mu`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CountingPoint<T> {
    pub lambda: Complex<T>,
    pub mu: Complex<T>,
}

impl<T: Real> CountingPoint<T> {
    pub fn real(lambda: T, mu: T) -> Self {
        Self {
            lambda: Complex::new(lambda, T::zero()),
            mu: Complex::new(mu, T::zero()),
        }
    }

    pub fn xi(&self, p: &EngineParams<T>) -> Complex<T> {
        self.lambda * (p.omega_a - p.omega_b) - self.mu * p.omega_a
    }
}

/// `sum_{n<d} e^{-n z}` by Horner's rule. Free of the removable singularities
/// of the closed ratio `(1 - e^{-dz}) / (1 - e^{-z})`.
fn geometric_sum<T: Real>(z: Complex<T>, d: usize) -> Complex<T> {
    let w = (-z).exp();
    let mut acc = Complex::new(T::zero(), T::zero());
    for _ in 0..d {
        acc = acc * w + T::one();
    }
    acc
}

/// `chi(lambda, mu) = cos^2 theta + sin^2 theta G(x_a + i xi) G(x_b - i xi) / (Z_a Z_b)`
/// with `G` the truncated geometric sum. Accepts complex counting parameters.
pub fn characteristic_function<T: Real>(p: &EngineParams<T>, at: CountingPoint<T>) -> Complex<T> {
    let i = Complex::new(T::zero(), T::one());
    let xi = at.xi(p);
    let za = Complex::new(p.x_a(), T::zero());
    let zb = Complex::new(p.x_b(), T::zero());
    let norm = geometric_sum(za, p.d) * geometric_sum(zb, p.d);
    let swap = geometric_sum(za + i * xi, p.d) * geometric_sum(zb - i * xi, p.d) / norm;
    swap * p.sin2() + p.cos2()
}

/// The same function in its hyperbolic-sine ratio form. Has removable
/// singularities where `x_a + i xi` or `x_b - i xi` is a multiple of `2 pi i`;
/// kept as an independent cross-check away from them.
pub fn characteristic_function_sinh<T: Real>(p: &EngineParams<T>, at: CountingPoint<T>) -> Complex<T> {
    let i = Complex::new(T::zero(), T::one());
    let half = T::lit(0.5);
    let df = T::from_usize_lossy(p.d);
    let xi = at.xi(p);
    let (xa, xb) = (p.x_a(), p.x_b());
    let a = i * xi + xa;
    let b = -i * xi + xb;
    let num = (a * df * half).sinh() * (b * df * half).sinh() * (xa * half).sinh() * (xb * half).sinh();
    let den = (a * half).sinh() * (b * half).sinh() * (df * xa * half).sinh() * (df * xb * half).sinh();
    num / den * p.sin2() + p.cos2()
}

/// `<n^2>` of the lattice index: `sin^2 theta [v_a + v_b + (N_a - N_b)^2]`,
/// where `v` is the occupation variance.
fn lattice_second_moment<T: Real>(p: &EngineParams<T>) -> T {
    let dn = p.n_a() - p.n_b();
    let va = thermal::variance_unchecked(p.x_a(), p.d);
    let vb = thermal::variance_unchecked(p.x_b(), p.d);
    p.sin2() * (va + vb + dn * dn)
}

fn lattice_variance<T: Real>(p: &EngineParams<T>) -> T {
    let dn = p.n_a() - p.n_b();
    let va = thermal::variance_unchecked(p.x_a(), p.d);
    let vb = thermal::variance_unchecked(p.x_b(), p.d);
    let s2 = p.sin2();
    s2 * (va + vb + (T::one() - s2) * dn * dn)
}

/// `<W^2>`.
pub fn second_moment_work<T: Real>(p: &EngineParams<T>) -> T {
    let dw = p.omega_b - p.omega_a;
    dw * dw * lattice_second_moment(p)
}

/// Components of the hyperbolic-cotangent expression for `<W^2>`, written in
/// terms of `eps = coth(x/2) - 1` and `delta = coth(dx/2) - 1` so the unit
/// parts cancel exactly. Returns `(numerator, denominator)` where
/// `<W^2> = sin^2 theta / 2 (omega_b - omega_a)^2 numerator` and
/// `denominator = 2 (N_x - N_y)`.
fn coth_form_parts<T: Real>(x: T, y: T, d: usize) -> (T, T) {
    let df = T::from_usize_lossy(d);
    let (ex, ey) = (thermal::coth_offset(x), thermal::coth_offset(y));
    let (dx, dy) = (thermal::coth_offset(df * x), thermal::coth_offset(df * y));
    let num = ex + ey + ex * ex + ey * ey - ex * ey - df * (ex - ey) * (dx - dy) - df * df * (dx + dy + dx * dy);
    let den = (ex - ey) - df * (dx - dy);
    (num, den)
}

/// `<W^2>` from the hyperbolic-cotangent closed form. Loses relative accuracy
/// as `x -> 0` through cancellation of `O(1/x^2)` terms; used as a cross-check.
pub fn second_moment_work_coth<T: Real>(p: &EngineParams<T>) -> T {
    let dw = p.omega_b - p.omega_a;
    let (num, _) = coth_form_parts(p.x_a(), p.x_b(), p.d);
    T::lit(0.5) * p.sin2() * dw * dw * num
}

/// The kernel `f(x, y, d)` of the signal-to-noise identity, evaluated through
/// occupation statistics: `[v(x) + v(y) + (g(x) - g(y))^2] / (g(x) - g(y))`.
pub fn snr_kernel<T: Real>(x: T, y: T, d: usize) -> Result<T> {
    let gx = thermal::mean_occupation(x, d)?;
    let gy = thermal::mean_occupation(y, d)?;
    let dn = gx - gy;
    if dn == T::zero() {
        return Err(Error::DegenerateMean);
    }
    let vx = thermal::variance_unchecked(x, d);
    let vy = thermal::variance_unchecked(y, d);
    Ok((vx + vy + dn * dn) / dn)
}

/// `f(x, y, d)` as the ratio of the two hyperbolic-cotangent brackets.
pub fn snr_kernel_coth<T: Real>(x: T, y: T, d: usize) -> Result<T> {
    if d < 2 || !(x > T::zero()) || !(y > T::zero()) {
        return Err(Error::Domain(format!("f({x}, {y}, {d}) needs x, y > 0 and d >= 2")));
    }
    let (num, den) = coth_form_parts(x, y, d);
    if den == T::zero() {
        return Err(Error::DegenerateMean);
    }
    Ok(num / den)
}

/// Right-hand side of the exact signal-to-noise identity,
/// `(x_b - x_a) f(x_a, x_b, d) / <Sigma> - 1`, which equals `var(W)/<W>^2`.
pub fn snr_identity_rhs<T: Real>(p: &EngineParams<T>) -> Result<T> {
    if engine::mean_work(p) == T::zero() {
        return Err(Error::DegenerateMean);
    }
    let f = snr_kernel_coth(p.x_a(), p.x_b(), p.d)?;
    Ok((p.x_b() - p.x_a()) * f / engine::entropy_production(p) - T::one())
}

/// Full first- and second-order statistics of one cycle.
pub fn moment_set<T: Real>(p: &EngineParams<T>) -> MomentSet<T> {
    let var_n = lattice_variance(p);
    let dw = p.omega_a - p.omega_b;
    MomentSet {
        mean_w: engine::mean_work(p),
        mean_qh: engine::mean_heat_hot(p),
        mean_qc: engine::mean_heat_cold(p),
        var_w: dw * dw * var_n,
        var_qh: p.omega_a * p.omega_a * var_n,
        cov_w_qh: -dw * p.omega_a * var_n,
        entropy_production: engine::entropy_production(p),
    }
}

/// Joint moment `<W^l Q_H^s>`. Orders up to two come from closed forms,
/// orders three and four from the closed-form distribution.
pub fn moments_from_chi<T: Real>(p: &EngineParams<T>, l: usize, s: usize) -> Result<T> {
    let order = l + s;
    if order > MAX_MOMENT_ORDER {
        return Err(Error::OrderTooHigh {
            order,
            max: MAX_MOMENT_ORDER,
        });
    }
    // W = -n (omega_a - omega_b), Q_H = n omega_a
    let scale = (p.omega_b - p.omega_a).powi(l as i32) * p.omega_a.powi(s as i32);
    let lattice = match order {
        0 => T::one(),
        1 => p.sin2() * (p.n_a() - p.n_b()),
        2 => lattice_second_moment(p),
        _ => joint_distribution(p).lattice_moment(order),
    };
    Ok(scale * lattice)
}

/// Discrete joint law of work and hot-bath heat. Index `n` labels the outcome
/// `Q_H = n omega_a`, `W = -n (omega_a - omega_b)`; all other lattice points
/// carry zero probability.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorkHeatDistribution<T> {
    pub params: EngineParams<T>,
    /// Probabilities for `n = -(d-1), ..., d-1`.
    probs: Vec<T>,
}

impl<T: Real> WorkHeatDistribution<T> {
    pub fn max_index(&self) -> i64 {
        self.params.d as i64 - 1
    }

    pub fn support(&self) -> std::ops::RangeInclusive<i64> {
        -self.max_index()..=self.max_index()
    }

    /// `p[Q_H = n omega_a]`; zero outside the support.
    pub fn prob(&self, n: i64) -> T {
        let k = n + self.max_index();
        if k < 0 || k as usize >= self.probs.len() {
            T::zero()
        } else {
            self.probs[k as usize]
        }
    }

    /// `p[W = m (omega_a - omega_b), Q_H = n omega_a] = p(n) delta_{m,-n}`.
    pub fn joint_prob(&self, m: i64, n: i64) -> T {
        if m == -n {
            self.prob(n)
        } else {
            T::zero()
        }
    }

    pub fn work_of(&self, n: i64) -> T {
        -T::from_i64_lossy(n) * (self.params.omega_a - self.params.omega_b)
    }

    pub fn heat_of(&self, n: i64) -> T {
        T::from_i64_lossy(n) * self.params.omega_a
    }

    /// `(n, W, Q_H, p)` for every lattice index of the support.
    pub fn iter(&self) -> impl Iterator<Item = (i64, T, T, T)> + '_ {
        self.support().map(move |n| (n, self.work_of(n), self.heat_of(n), self.prob(n)))
    }

    pub fn total(&self) -> T {
        self.probs.iter().copied().sum()
    }

    pub fn lattice_moment(&self, k: usize) -> T {
        self.iter().map(|(n, _, _, p)| p * T::from_i64_lossy(n).powi(k as i32)).sum()
    }

    /// `<W^l Q_H^s>` as a sum over the lattice.
    pub fn moment(&self, l: usize, s: usize) -> T {
        self.iter().map(|(_, w, q, p)| p * w.powi(l as i32) * q.powi(s as i32)).sum()
    }

    /// Checks `ln[p(n)/p(-n)] = (x_b - x_a) n` on every `n > 0` where both
    /// probabilities exceed [`PROBABILITY_FLOOR`].
    pub fn detailed_ft(&self) -> FtReport<T> {
        let slope = self.params.x_b() - self.params.x_a();
        let floor = T::lit(PROBABILITY_FLOOR);
        let mut report = FtReport {
            max_deviation: T::zero(),
            checked: Vec::new(),
            skipped: Vec::new(),
        };
        for n in 1..=self.max_index() {
            let (fwd, bwd) = (self.prob(n), self.prob(-n));
            if fwd > floor && bwd > floor {
                let dev = ((fwd / bwd).ln() - slope * T::from_i64_lossy(n)).abs();
                report.max_deviation = report.max_deviation.max(dev);
                report.checked.push(n);
            } else {
                report.skipped.push(n);
            }
        }
        report
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FtReport<T> {
    /// Largest `|ln[p(n)/p(-n)] - Sigma(n)|` over the checked indices.
    pub max_deviation: T,
    pub checked: Vec<i64>,
    /// Indices skipped because a probability underflowed.
    pub skipped: Vec<i64>,
}

/// Closed-form law of the lattice index:
///
/// ```text
/// p(n) = delta_{n0} cos^2 theta
///      + sin^2 theta / (Z_a Z_b) (1 - r^(d-|n|)) / (1 - r) * { e^{-x_a n}   n >= 0
///                                                            { e^{-x_b |n|} n < 0
/// ```
///
/// with `r = e^{-(x_a + x_b)}`.
pub fn joint_distribution<T: Real>(p: &EngineParams<T>) -> WorkHeatDistribution<T> {
    let d = p.d;
    let (xa, xb) = (p.x_a(), p.x_b());
    let za = (-T::from_usize_lossy(d) * xa).exp_m1() / (-xa).exp_m1();
    let zb = (-T::from_usize_lossy(d) * xb).exp_m1() / (-xb).exp_m1();
    let pref = p.sin2() / (za * zb);
    let sum = xa + xb;
    let top = d as i64 - 1;
    let probs = (-top..=top)
        .map(|n| {
            let k = T::from_i64_lossy(d as i64 - n.abs());
            let geom = (-k * sum).exp_m1() / (-sum).exp_m1();
            let tilt = if n >= 0 {
                (-xa * T::from_i64_lossy(n)).exp()
            } else {
                (xb * T::from_i64_lossy(n)).exp()
            };
            let atom = if n == 0 { p.cos2() } else { T::zero() };
            atom + pref * geom * tilt
        })
        .collect();
    WorkHeatDistribution { params: *p, probs }
}

pub fn verify_detailed_ft<T: Real>(p: &EngineParams<T>) -> FtReport<T> {
    joint_distribution(p).detailed_ft()
}

/// Witness that `-W/Q_H` takes a single value on the whole support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EfficiencyWitness<T> {
    /// The common value of `-W/Q_H`; `None` when only `n = 0` is populated.
    pub ratio: Option<T>,
    /// Largest deviation of any populated point from `1 - omega_b/omega_a`.
    pub max_deviation: T,
    pub constant: bool,
}

pub fn efficiency_is_nonfluctuating<T: Real>(p: &EngineParams<T>) -> EfficiencyWitness<T> {
    let dist = joint_distribution(p);
    let expected = T::one() - p.omega_b / p.omega_a;
    let tol = T::lit(64.0) * T::epsilon() * (T::one() + expected.abs());
    let mut ratio = None;
    let mut max_dev = T::zero();
    for (n, w, q, prob) in dist.iter() {
        if n == 0 || prob <= T::zero() {
            continue;
        }
        let r = -w / q;
        max_dev = max_dev.max((r - expected).abs());
        ratio.get_or_insert(r);
    }
    EfficiencyWitness {
        ratio,
        max_deviation: max_dev,
        constant: max_dev <= tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

    fn params(d: usize, xa: f64, xb: f64, theta: f64) -> EngineParams<f64> {
        EngineParams::<f64>::from_products(d, 1.0, 0.6, xa, xb, theta).unwrap()
    }

    #[test]
    fn chi_normalization_and_fluctuation_theorem() {
        let p = EngineParams::<f64>::new(5, 1.3, 0.7, 0.4, 1.9, 0.8).unwrap();
        let one = characteristic_function(&p, CountingPoint::real(0.0, 0.0));
        assert!((one - 1.0).norm() < 1e-14);
        let jarzynski = CountingPoint {
            lambda: Complex::new(0.0, p.beta_b),
            mu: Complex::new(0.0, p.beta_b - p.beta_a),
        };
        assert!((characteristic_function(&p, jarzynski) - 1.0).norm() < 1e-12);
    }

    #[test]
    fn chi_bounded_and_function_of_xi_only() {
        let p = EngineParams::<f64>::new(4, 1.0, 0.3, 0.5, 2.0, 1.2).unwrap();
        let a = CountingPoint::real(0.7, -0.4);
        // shift lambda and mu along a direction of constant xi
        let t = 0.37;
        let b = CountingPoint::real(0.7 + t * p.omega_a, -0.4 + t * (p.omega_a - p.omega_b));
        let (ca, cb) = (characteristic_function(&p, a), characteristic_function(&p, b));
        assert!((ca - cb).norm() < 1e-13);
        assert!(ca.norm() <= 1.0 + 1e-15);
    }

    #[test]
    fn sinh_form_matches_away_from_singularities() {
        let p = EngineParams::<f64>::new(6, 1.1, 0.4, 0.9, 1.4, 0.6).unwrap();
        for k in 0..20 {
            let at = CountingPoint::real(0.31 * k as f64 - 2.0, 0.17 * k as f64 - 1.0);
            let a = characteristic_function(&p, at);
            let b = characteristic_function_sinh(&p, at);
            assert!((a - b).norm() < 1e-12, "{a} {b}");
        }
    }

    #[test]
    fn distribution_zero_coupling_is_an_atom() {
        let dist = joint_distribution(&params(5, 1.0, 2.0, 0.0));
        assert_eq!(dist.prob(0), 1.0);
        for n in dist.support().filter(|&n| n != 0) {
            assert_eq!(dist.prob(n), 0.0);
        }
        let rep = dist.detailed_ft();
        assert!(rep.checked.is_empty() && rep.skipped.len() == 4);
    }

    #[test]
    fn distribution_normalized_and_geometric_tails() {
        let p = params(8, 1.0, 2.0, FRAC_PI_2);
        let dist = joint_distribution(&p);
        assert!((dist.total() - 1.0).abs() < 1e-14);
        // Positive tail ratios combine the tilt with the shrinking geometric factor.
        for n in 1..7 {
            let ratio = dist.prob(n) / dist.prob(n + 1);
            let r = (-3.0f64).exp();
            let geo = |k: i64| (1.0 - r.powi((8 - k) as i32)) / (1.0 - r);
            assert!((ratio - 1f64.exp() * geo(n) / geo(n + 1)).abs() < 1e-12);
        }
        assert_eq!(dist.joint_prob(2, -2), dist.prob(-2));
        assert_eq!(dist.joint_prob(1, 2), 0.0);
    }

    #[test]
    fn detailed_ft_examples() {
        for (d, theta) in [(2usize, FRAC_PI_2), (8, FRAC_PI_4), (8, FRAC_PI_3)] {
            let rep = verify_detailed_ft(&params(d, 1.0, 2.0, theta));
            assert!(rep.max_deviation < 1e-12, "{d} {theta}: {rep:?}");
            assert_eq!(rep.checked.len(), d - 1);
        }
    }

    #[test]
    fn distribution_moments_match_closed_forms() {
        let p = EngineParams::<f64>::new(7, 1.2, 0.5, 0.3, 1.7, 1.0).unwrap();
        let dist = joint_distribution(&p);
        let m = moment_set(&p);
        assert!((dist.moment(1, 0) - m.mean_w).abs() < 1e-13);
        assert!((dist.moment(0, 1) - m.mean_qh).abs() < 1e-13);
        assert!((dist.moment(2, 0) - second_moment_work(&p)).abs() < 1e-12);
        assert!((dist.moment(1, 1) - moments_from_chi(&p, 1, 1).unwrap()).abs() < 1e-12);
        for (l, s) in [(3, 0), (2, 1), (0, 4), (1, 3)] {
            let a = dist.moment(l, s);
            let b = moments_from_chi(&p, l, s).unwrap();
            assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()), "({l},{s})");
        }
        assert!(matches!(moments_from_chi(&p, 3, 2), Err(Error::OrderTooHigh { order: 5, .. })));
    }

    #[test]
    fn heat_moment_symmetry() {
        let p = EngineParams::<f64>::new(4, 1.0, 0.35, 0.6, 1.5, 0.9).unwrap();
        let ratio = p.omega_a / (p.omega_b - p.omega_a);
        for (l, s) in [(0, 1), (0, 2), (1, 1), (1, 2), (2, 2)] {
            let lhs = moments_from_chi(&p, l, s).unwrap();
            let rhs = ratio.powi(s as i32) * moments_from_chi(&p, l + s, 0).unwrap();
            assert!(crate::scalar::rel_diff(lhs, rhs) < 1e-10);
        }
        let w1 = moments_from_chi(&p, 1, 0).unwrap();
        assert_eq!(w1, engine::mean_work(&p));
    }

    #[test]
    fn qubit_second_moment() {
        // N_a = 0.3, N_b = 0.1, theta = pi/2, omega_b - omega_a = -0.5
        let xa = (0.7f64 / 0.3).ln();
        let xb = 9f64.ln();
        let p = EngineParams::<f64>::from_products(2, 1.0, 0.5, xa, xb, FRAC_PI_2).unwrap();
        assert!((second_moment_work(&p) - 0.085).abs() < 1e-15);
        assert!((second_moment_work_coth(&p) - 0.085).abs() < 1e-14);
        assert_eq!(second_moment_work(&p.with_theta(0.0)), 0.0);
    }

    #[test]
    fn frozen_second_moment_d6() {
        let p = EngineParams::<f64>::new(6, 1.3, 0.45, 0.7, 2.9, 1.1).unwrap();
        assert!((second_moment_work(&p) - 0.887_643_019_920_999_66).abs() < 1e-14);
        assert!((engine::mean_work(&p) - -0.187_949_782_086_706_09).abs() < 1e-15);
        assert!((second_moment_work_coth(&p) - 0.887_643_019_920_999_66).abs() < 1e-12);
    }

    #[test]
    fn qubit_kernel_is_a_hyperbolic_cotangent() {
        let f = snr_kernel(0.5f64, 1.5, 2).unwrap();
        assert!((f - 2.163_953_413_738_652_8).abs() < 1e-14);
        let fc = snr_kernel_coth(0.5f64, 1.5, 2).unwrap();
        assert!((fc - 2.163_953_413_738_652_8).abs() < 1e-13);
        assert!(matches!(snr_kernel(1.0, 1.0, 3), Err(Error::DegenerateMean)));
    }

    #[test]
    fn snr_identity_holds() {
        let p = EngineParams::<f64>::new(5, 1.0, 0.7, 0.45, 1.3, 1.0).unwrap();
        let m = moment_set(&p);
        let rhs = snr_identity_rhs(&p).unwrap();
        let lhs = m.inverse_snr().unwrap();
        assert!(crate::scalar::rel_diff(lhs, rhs) < 1e-10);
        let q = m.var_qh / (m.mean_qh * m.mean_qh);
        let c = m.cov_w_qh / (m.mean_w * m.mean_qh);
        assert!(crate::scalar::rel_diff(lhs, q) < 1e-12);
        assert!(crate::scalar::rel_diff(lhs, c) < 1e-12);
        assert!(matches!(snr_identity_rhs(&p.with_theta(0.0)), Err(Error::DegenerateMean)));
    }

    #[test]
    fn efficiency_witness() {
        let p = EngineParams::<f64>::new(5, 1.0, 0.7, 0.45, 1.3, 1.0).unwrap();
        let w = efficiency_is_nonfluctuating(&p);
        assert!(w.constant);
        assert!((w.ratio.unwrap() - 0.3).abs() < 1e-15);
        let w0 = efficiency_is_nonfluctuating(&p.with_theta(0.0));
        assert!(w0.ratio.is_none() && w0.constant);
        let w_pi = efficiency_is_nonfluctuating(&p.with_theta(PI));
        assert!(w_pi.ratio.is_none() || w_pi.constant);
    }

    #[test]
    fn single_precision_distribution() {
        let p = EngineParams::<f32>::new(4, 1.0, 0.6, 0.5, 1.0, 1.2).unwrap();
        let dist = joint_distribution(&p);
        assert!((dist.total() - 1.0).abs() < 1e-5);
        assert!(verify_detailed_ft(&p).max_deviation < 1e-4);
    }
}
