//! Thermal statistics of a single qudit with `d` equally spaced levels.
//!
//! Every function here takes the dimensionless product `x = βω` of an inverse
//! temperature and a level spacing. The occupation functions are written in
//! terms of the Langevin function `L(z) = coth z - 1/z`, which keeps the
//! large `1/x` parts of the hyperbolic cotangents cancelled analytically:
//!
//! ```text
//! g(x) = (d-1)/2 - [d L(dx/2) - L(x/2)] / 2
//! v(x) = -g'(x) = [d^2 L'(dx/2) - L'(x/2)] / 4
//! ```
//!
//! For `x >= 2` the exponential forms `1/(e^x - 1) - d/(e^{dx} - 1)` are used
//! instead, since there `g` itself becomes exponentially small.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Taylor coefficients of `coth z - 1/z = sum_k c_k z^(2k-1)`, i.e.
/// `c_k = 2^(2k) B_(2k) / (2k)!`.
const LANGEVIN_SERIES: [f64; 12] = [
    0.3333333333333333,
    -0.022222222222222223,
    0.0021164021164021165,
    -0.00021164021164021165,
    2.1377799155576935e-05,
    -2.1644042808063972e-06,
    2.1925947851873778e-07,
    -2.2214608789979678e-08,
    2.2507846516808994e-09,
    -2.2805151204592183e-10,
    2.3106432599002624e-11,
    -2.3411706819824882e-12,
];

const SERIES_RADIUS: f64 = 0.5;
const EXP_FORM_THRESHOLD: f64 = 2.0;

fn check_domain<T: Real>(x: T, d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::Domain(format!("dimension d = {d} must be at least 2")));
    }
    if !(x > T::zero()) || x.is_nan() {
        return Err(Error::Domain(format!("x = {x} must be positive")));
    }
    Ok(())
}

/// `coth z - 1/z` for `z >= 0`.
pub fn langevin<T: Real>(z: T) -> T {
    if z < T::lit(SERIES_RADIUS) {
        let z2 = z * z;
        let mut acc = T::zero();
        for &c in LANGEVIN_SERIES.iter().rev() {
            acc = acc * z2 + T::lit(c);
        }
        acc * z
    } else {
        // coth z = 1 + 2 / (e^{2z} - 1)
        T::one() + T::lit(2.0) / (z + z).exp_m1() - z.recip()
    }
}

/// Derivative of [`langevin`]: `1/z^2 - 1/sinh^2 z`.
pub fn langevin_prime<T: Real>(z: T) -> T {
    if z < T::lit(SERIES_RADIUS) {
        let z2 = z * z;
        let mut acc = T::zero();
        for (k, &c) in LANGEVIN_SERIES.iter().enumerate().rev() {
            acc = acc * z2 + T::lit(c * (2 * k + 1) as f64);
        }
        acc
    } else {
        z.powi(-2) - inv_sinh_sq(z)
    }
}

/// `1 / sinh^2 z` written so that it underflows to zero instead of
/// overflowing for large `z`.
fn inv_sinh_sq<T: Real>(z: T) -> T {
    let e = (-(z + z)).exp();
    let den = (-(z + z)).exp_m1();
    T::lit(4.0) * e / (den * den)
}

/// Partition function `Z = sum_{n<d} e^{-n x} = (1 - e^{-dx}) / (1 - e^{-x})`.
pub fn partition_function<T: Real>(x: T, d: usize) -> Result<T> {
    check_domain(x, d)?;
    let dx = T::from_usize_lossy(d) * x;
    Ok((-dx).exp_m1() / (-x).exp_m1())
}

/// Mean occupation number `g(x) = <n>` of the Gibbs state.
pub fn mean_occupation<T: Real>(x: T, d: usize) -> Result<T> {
    check_domain(x, d)?;
    Ok(occupation_unchecked(x, d))
}

pub(crate) fn occupation_unchecked<T: Real>(x: T, d: usize) -> T {
    let df = T::from_usize_lossy(d);
    let half = T::lit(0.5);
    if x >= T::lit(EXP_FORM_THRESHOLD) {
        x.exp_m1().recip() - df / (df * x).exp_m1()
    } else {
        half * (df - T::one()) - half * (df * langevin(df * x * half) - langevin(x * half))
    }
}

/// Variance of the occupation number, `<n^2> - <n>^2 = -g'(x)`.
pub fn occupation_variance<T: Real>(x: T, d: usize) -> Result<T> {
    check_domain(x, d)?;
    Ok(variance_unchecked(x, d))
}

pub(crate) fn variance_unchecked<T: Real>(x: T, d: usize) -> T {
    let df = T::from_usize_lossy(d);
    let half = T::lit(0.5);
    let quarter = T::lit(0.25);
    if x >= T::lit(EXP_FORM_THRESHOLD) {
        quarter * (inv_sinh_sq(x * half) - df * df * inv_sinh_sq(df * x * half))
    } else {
        quarter * (df * df * langevin_prime(df * x * half) - langevin_prime(x * half))
    }
}

/// Inverse of [`mean_occupation`] on `(0, (d-1)/2)`, found by bracketing
/// followed by bisection in `ln x`.
pub fn mean_occupation_inverse<T: Real>(n_target: T, d: usize) -> Result<T> {
    if d < 2 {
        return Err(Error::Domain(format!("dimension d = {d} must be at least 2")));
    }
    let upper = T::lit(0.5) * (T::from_usize_lossy(d) - T::one());
    if !(n_target > T::zero() && n_target < upper) {
        return Err(Error::Domain(format!(
            "occupation {n_target} outside the open interval (0, {upper})"
        )));
    }
    let g = |x: T| occupation_unchecked(x, d);

    let mut lo = T::one();
    let mut hi = T::one();
    let tiny = T::min_positive_value().sqrt();
    let huge = T::max_value().sqrt();
    while g(lo) < n_target {
        lo = lo * T::lit(0.125);
        if lo < tiny {
            return Err(Error::Domain(format!(
                "occupation {n_target} too close to the infinite-temperature limit {upper}"
            )));
        }
    }
    while g(hi) > n_target {
        hi = hi * T::lit(8.0);
        if hi > huge {
            return Err(Error::Domain(format!("occupation {n_target} too close to zero")));
        }
    }

    let (mut llo, mut lhi) = (lo.ln(), hi.ln());
    for _ in 0..400 {
        let mid = T::lit(0.5) * (llo + lhi);
        if mid <= llo || mid >= lhi {
            break;
        }
        if g(mid.exp()) > n_target {
            llo = mid;
        } else {
            lhi = mid;
        }
    }
    let (xlo, xhi) = (llo.exp(), lhi.exp());
    if (g(xlo) - n_target).abs() <= (g(xhi) - n_target).abs() {
        Ok(xlo)
    } else {
        Ok(xhi)
    }
}

/// `coth(x/2) - d coth(dx/2)`, the combination appearing in the hyperbolic
/// form of the average work. Evaluated by its Taylor series when `dx` is
/// small, by exponentials when `dx > 30`, and literally in between.
pub fn coth_gap<T: Real>(x: T, d: usize) -> Result<T> {
    check_domain(x, d)?;
    Ok(coth_gap_unchecked(x, d))
}

pub(crate) fn coth_gap_unchecked<T: Real>(x: T, d: usize) -> T {
    let df = T::from_usize_lossy(d);
    let dx = df * x;
    let one = T::one();
    if dx < T::lit(1e-3) {
        let d2 = df * df;
        let x2 = x * x;
        (one - d2) * x / T::lit(6.0) - (one - d2 * d2) * x * x2 / T::lit(360.0)
            + (one - d2 * d2 * d2) * x * x2 * x2 / T::lit(15120.0)
    } else if dx > T::lit(30.0) {
        let two = T::lit(2.0);
        (one + two / x.exp_m1()) - df * (one + two / dx.exp_m1())
    } else {
        let half = T::lit(0.5);
        (x * half).tanh().recip() - df * (dx * half).tanh().recip()
    }
}

/// `coth(x/2) - 1 = 2 / (e^x - 1)`.
pub(crate) fn coth_offset<T: Real>(x: T) -> T {
    T::lit(2.0) / x.exp_m1()
}
