//! Repeated full-swap cycles with thermal strokes of finite duration.
//!
//! Each qudit relaxes as `dN/dt = -alpha (N - N_eq)` during a thermal stroke
//! of length `tau_q`; the swap then exchanges the two occupations. The limit
//! cycle stays bi-Gibbsian with effective inverse temperatures
//! `beta* = g^{-1}(N*) / omega`.

use serde::{Deserialize, Serialize};

use crate::engine::{self, EngineParams, MomentSet};
use crate::error::{Error, Result};
use crate::optimize;
use crate::scalar::Real;
use crate::spectral;
use crate::thermal;

/// Inverse temperature reported when an occupation reaches the
/// infinite-temperature value `(d - 1)/2`.
pub const BETA_STAR_CAP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteTimeParams<T> {
    pub base: EngineParams<T>,
    pub alpha_a: T,
    pub alpha_b: T,
    /// Thermal stroke duration; may be infinite.
    pub tau_q: T,
    pub tau_w: T,
}

impl<T: Real> FiniteTimeParams<T> {
    pub fn new(base: EngineParams<T>, alpha_a: T, alpha_b: T, tau_q: T, tau_w: T) -> Result<Self> {
        let f = Self {
            base,
            alpha_a,
            alpha_b,
            tau_q,
            tau_w,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.base.theta.cos().abs() > T::lit(1e3) * T::epsilon() {
            return Err(Error::InvalidParams(format!(
                "theta = pi/2 (mod pi) violated (theta = {})",
                self.base.theta
            )));
        }
        for (name, v) in [("alpha_a", self.alpha_a), ("alpha_b", self.alpha_b)] {
            if !(v > T::zero() && v.is_finite()) {
                return Err(Error::InvalidParams(format!("{name} > 0 violated ({name} = {v})")));
            }
        }
        if !(self.tau_q >= T::zero()) {
            return Err(Error::InvalidParams(format!("tau_q >= 0 violated (tau_q = {})", self.tau_q)));
        }
        if !(self.tau_w >= T::zero() && self.tau_w.is_finite()) {
            return Err(Error::InvalidParams(format!("tau_w >= 0 violated (tau_w = {})", self.tau_w)));
        }
        Ok(())
    }

    pub fn with_tau_q(self, tau_q: T) -> Self {
        Self { tau_q, ..self }
    }

    pub fn with_tau_w(self, tau_w: T) -> Self {
        Self { tau_w, ..self }
    }
}

/// Engine parameters whose Gibbs occupations equal `n_a`, `n_b`, with a full swap.
pub fn params_from_occupations<T: Real>(d: usize, omega_a: T, omega_b: T, n_a: T, n_b: T) -> Result<EngineParams<T>> {
    let x_a = thermal::mean_occupation_inverse(n_a, d)?;
    let x_b = thermal::mean_occupation_inverse(n_b, d)?;
    EngineParams::from_products(d, omega_a, omega_b, x_a, x_b, T::FRAC_PI_2())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiniteTimeState<T> {
    pub n_a_star: T,
    pub n_b_star: T,
    pub beta_a_star: T,
    pub beta_b_star: T,
    pub power: T,
    /// `tau_q = 0`: the two occupations coincide and no work is exchanged.
    pub degenerate: bool,
    /// An effective inverse temperature was replaced by [`BETA_STAR_CAP`].
    pub capped: bool,
}

/// `1 - e^{-a t}` without cancellation.
fn one_minus_decay<T: Real>(rate: T, t: T) -> T {
    -(-rate * t).exp_m1()
}

/// `(N_a* - N_b*) / (N_a - N_b) = (1 - e_a)(1 - e_b) / (1 - e_a e_b)`.
pub fn difference_factor<T: Real>(alpha_a: T, alpha_b: T, tau_q: T) -> T {
    if tau_q == T::zero() {
        return T::zero();
    }
    if tau_q.is_infinite() {
        return T::one();
    }
    one_minus_decay(alpha_a, tau_q) * one_minus_decay(alpha_b, tau_q) / one_minus_decay(alpha_a + alpha_b, tau_q)
}

/// `difference_factor / tau_q`, continuous at `tau_q = 0` where it equals
/// `alpha_a alpha_b / (alpha_a + alpha_b)`.
fn factor_rate<T: Real>(alpha_a: T, alpha_b: T, tau_q: T) -> T {
    if tau_q == T::zero() {
        return alpha_a * alpha_b / (alpha_a + alpha_b);
    }
    if tau_q.is_infinite() {
        return T::zero();
    }
    difference_factor(alpha_a, alpha_b, tau_q) / tau_q
}

/// Steady occupations from the closed form.
pub fn steady_occupations<T: Real>(ftp: &FiniteTimeParams<T>) -> (T, T) {
    let (na, nb) = (ftp.base.n_a(), ftp.base.n_b());
    let (aa, ab, t) = (ftp.alpha_a, ftp.alpha_b, ftp.tau_q);
    if t == T::zero() {
        let mid = (aa * na + ab * nb) / (aa + ab);
        return (mid, mid);
    }
    let (ea, eb) = ((-aa * t).exp(), (-ab * t).exp());
    let (ua, ub) = (one_minus_decay(aa, t), one_minus_decay(ab, t));
    let den = one_minus_decay(aa + ab, t);
    ((na * ua + nb * ub * ea) / den, (nb * ub + na * ua * eb) / den)
}

/// Occupations after `cycles` applications of the swap-then-relax map,
/// starting from full thermalization.
pub fn iterate_occupations<T: Real>(ftp: &FiniteTimeParams<T>, cycles: usize) -> (T, T) {
    let (na, nb) = (ftp.base.n_a(), ftp.base.n_b());
    let ea = (-ftp.alpha_a * ftp.tau_q).exp();
    let eb = (-ftp.alpha_b * ftp.tau_q).exp();
    let (mut a, mut b) = (na, nb);
    for _ in 0..cycles {
        (a, b) = ((b - na) * ea + na, (a - nb) * eb + nb);
    }
    (a, b)
}

fn effective_beta<T: Real>(n: T, omega: T, d: usize) -> Result<(T, bool)> {
    let upper = T::lit(0.5) * (T::from_usize_lossy(d) - T::one());
    if n >= upper * (T::one() - T::epsilon()) {
        return Ok((T::lit(BETA_STAR_CAP), true));
    }
    match thermal::mean_occupation_inverse(n, d) {
        Ok(x) => Ok((x / omega, false)),
        Err(_) if n > T::lit(0.5) * upper => Ok((T::lit(BETA_STAR_CAP), true)),
        Err(e) => Err(e),
    }
}

pub fn steady_state<T: Real>(ftp: &FiniteTimeParams<T>) -> Result<FiniteTimeState<T>> {
    ftp.validate()?;
    let p = &ftp.base;
    let (n_a_star, n_b_star) = steady_occupations(ftp);
    let (beta_a_star, ca) = effective_beta(n_a_star, p.omega_a, p.d)?;
    let (beta_b_star, cb) = effective_beta(n_b_star, p.omega_b, p.d)?;
    Ok(FiniteTimeState {
        n_a_star,
        n_b_star,
        beta_a_star,
        beta_b_star,
        power: power(ftp),
        degenerate: ftp.tau_q == T::zero(),
        capped: ca || cb,
    })
}

/// Engine parameters at the effective temperatures of the limit cycle.
pub fn starred_params<T: Real>(ftp: &FiniteTimeParams<T>) -> Result<EngineParams<T>> {
    let s = steady_state(ftp)?;
    EngineParams::new(
        ftp.base.d,
        ftp.base.omega_a,
        ftp.base.omega_b,
        s.beta_a_star,
        s.beta_b_star,
        ftp.base.theta,
    )
}

/// Work and heat statistics of the limit cycle. Fluctuations come from the
/// effective temperatures; `<Sigma>` uses the bath temperatures.
pub fn steady_moments<T: Real>(ftp: &FiniteTimeParams<T>) -> Result<MomentSet<T>> {
    let star = starred_params(ftp)?;
    let p = &ftp.base;
    let dn = difference_factor(ftp.alpha_a, ftp.alpha_b, ftp.tau_q) * (p.n_a() - p.n_b());
    let mut m = spectral::moment_set(&star);
    m.mean_w = (p.omega_b - p.omega_a) * dn;
    m.mean_qh = p.omega_a * dn;
    m.mean_qc = -p.omega_b * dn;
    m.entropy_production = (p.x_b() - p.x_a()) * dn;
    Ok(m)
}

/// `<Sigma*>` at the effective temperatures; diagnostic only.
pub fn internal_entropy_production<T: Real>(ftp: &FiniteTimeParams<T>) -> Result<T> {
    Ok(engine::entropy_production(&starred_params(ftp)?))
}

/// `<-W> / (tau_q + tau_w)`; at `tau_q = tau_w = 0` the `tau_q -> 0` limit.
pub fn power<T: Real>(ftp: &FiniteTimeParams<T>) -> T {
    scaled_power(ftp) * (ftp.base.omega_a - ftp.base.omega_b) * (ftp.base.n_a() - ftp.base.n_b())
}

/// Power in units of `(omega_a - omega_b)(N_a - N_b)`.
pub fn scaled_power<T: Real>(ftp: &FiniteTimeParams<T>) -> T {
    let (aa, ab, tq, tw) = (ftp.alpha_a, ftp.alpha_b, ftp.tau_q, ftp.tau_w);
    if tw == T::zero() {
        factor_rate(aa, ab, tq)
    } else if tq.is_infinite() {
        T::zero()
    } else {
        difference_factor(aa, ab, tq) / (tq + tw)
    }
}

/// `var(W) / <W>^2` in the limit cycle from the kernel at effective temperatures.
pub fn finite_time_inverse_snr<T: Real>(ftp: &FiniteTimeParams<T>) -> Result<T> {
    let star = starred_params(ftp)?;
    let (na, nb) = steady_occupations(ftp);
    if na == nb {
        return Err(Error::DegenerateMean);
    }
    Ok(spectral::snr_kernel(star.x_a(), star.x_b(), star.d)? / (na - nb) - T::one())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptimalPower {
    pub tau_q: f64,
    pub scaled_power: f64,
    pub power: f64,
    /// Optimum at `tau_q -> 0`.
    pub boundary: bool,
    pub converged: bool,
    pub residual: f64,
}

/// Maximizes the power over `tau_q in (0, 50 / min(alpha)]` at fixed `tau_w`.
pub fn optimal_power(ftp: &FiniteTimeParams<f64>) -> Result<OptimalPower> {
    ftp.validate()?;
    let unit = (ftp.base.omega_a - ftp.base.omega_b) * (ftp.base.n_a() - ftp.base.n_b());
    if ftp.tau_w == 0.0 {
        let s = scaled_power(&ftp.with_tau_q(0.0));
        return Ok(OptimalPower {
            tau_q: 0.0,
            scaled_power: s,
            power: s * unit,
            boundary: true,
            converged: true,
            residual: 0.0,
        });
    }
    let hi = 50.0 / ftp.alpha_a.min(ftp.alpha_b);
    let o = optimize::grid_then_golden_max(
        |t| scaled_power(&ftp.with_tau_q(t)),
        hi * 1e-9,
        hi,
        400,
        true,
        1e-10,
    );
    Ok(OptimalPower {
        tau_q: o.x,
        scaled_power: o.value,
        power: o.value * unit,
        boundary: o.at_boundary,
        converged: o.converged,
        residual: o.residual,
    })
}
