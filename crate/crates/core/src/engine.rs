//! Engine parameters and the first-order (average) thermodynamics of the cycle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::thermal;

/// Relative tolerance used to tag parameters that sit on a regime boundary.
pub const REGIME_BOUNDARY_TOL: f64 = 1e-9;

/// Static description of one cycle: two `d`-level qudits with level spacings
/// `omega_a`, `omega_b`, thermalized at inverse temperatures `beta_a` (hot
/// bath) and `beta_b` (cold bath), coupled by a partial swap of angle `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EngineParams<T> {
    pub d: usize,
    pub omega_a: T,
    pub omega_b: T,
    pub beta_a: T,
    pub beta_b: T,
    pub theta: T,
}

impl<T: Real> EngineParams<T> {
    pub fn new(d: usize, omega_a: T, omega_b: T, beta_a: T, beta_b: T, theta: T) -> Result<Self> {
        let p = Self {
            d,
            omega_a,
            omega_b,
            beta_a,
            beta_b,
            theta,
        };
        p.validate()?;
        Ok(p)
    }

    /// Builds parameters from the dimensionless products `x_a = beta_a omega_a`
    /// and `x_b = beta_b omega_b`.
    pub fn from_products(d: usize, omega_a: T, omega_b: T, x_a: T, x_b: T, theta: T) -> Result<Self> {
        Self::new(d, omega_a, omega_b, x_a / omega_a, x_b / omega_b, theta)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: T| v > T::zero() && v.is_finite();
        if self.d < 2 {
            return Err(Error::InvalidParams(format!("d >= 2 violated (d = {})", self.d)));
        }
        for (name, v) in [
            ("omega_a", self.omega_a),
            ("omega_b", self.omega_b),
            ("beta_a", self.beta_a),
            ("beta_b", self.beta_b),
        ] {
            if !positive(v) {
                return Err(Error::InvalidParams(format!("{name} > 0 violated ({name} = {v})")));
            }
        }
        if !self.theta.is_finite() {
            return Err(Error::InvalidParams(format!("theta must be finite (theta = {})", self.theta)));
        }
        Ok(())
    }

    /// True when the bath labelled hot is actually colder (`beta_a > beta_b`).
    /// All formulas stay valid; only the regime labels lose their meaning.
    pub fn hot_cold_inverted(&self) -> bool {
        self.beta_a > self.beta_b
    }

    pub fn x_a(&self) -> T {
        self.beta_a * self.omega_a
    }

    pub fn x_b(&self) -> T {
        self.beta_b * self.omega_b
    }

    pub fn n_a(&self) -> T {
        thermal::occupation_unchecked(self.x_a(), self.d)
    }

    pub fn n_b(&self) -> T {
        thermal::occupation_unchecked(self.x_b(), self.d)
    }

    pub fn sin2(&self) -> T {
        let s = self.theta.sin();
        s * s
    }

    pub fn cos2(&self) -> T {
        let c = self.theta.cos();
        c * c
    }

    pub fn with_theta(self, theta: T) -> Self {
        Self { theta, ..self }
    }

    pub fn with_dimension(self, d: usize) -> Self {
        Self { d, ..self }
    }

    pub fn with_betas(self, beta_a: T, beta_b: T) -> Self {
        Self {
            beta_a,
            beta_b,
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    HeatEngine,
    Refrigerator,
    ThermalAccelerator,
    Boundary,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::HeatEngine => "heat-engine",
            Regime::Refrigerator => "refrigerator",
            Regime::ThermalAccelerator => "thermal-accelerator",
            Regime::Boundary => "boundary",
        }
    }
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// First and second moments of work and heat for one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSet<T> {
    pub mean_w: T,
    pub mean_qh: T,
    pub mean_qc: T,
    pub var_w: T,
    pub var_qh: T,
    pub cov_w_qh: T,
    pub entropy_production: T,
}

impl<T: Real> MomentSet<T> {
    /// `var(W) / <W>^2`; `None` when the mean work vanishes.
    pub fn inverse_snr(&self) -> Option<T> {
        (self.mean_w != T::zero()).then(|| self.var_w / (self.mean_w * self.mean_w))
    }

    /// `var(W) <Sigma> / <W>^2`, the product bounded below by 2 in the standard TUR.
    pub fn tur_product(&self) -> Option<T> {
        self.inverse_snr().map(|r| r * self.entropy_production)
    }

    pub fn second_moment_w(&self) -> T {
        self.var_w + self.mean_w * self.mean_w
    }
}

/// A value together with whether the parameters are in the regime where it
/// has its physical meaning.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeValue<T> {
    pub value: T,
    pub regime_ok: bool,
}

/// `<W> = sin^2(theta) (omega_b - omega_a) (N_a - N_b)`.
pub fn mean_work<T: Real>(p: &EngineParams<T>) -> T {
    p.sin2() * (p.omega_b - p.omega_a) * (p.n_a() - p.n_b())
}

/// Average work from the hyperbolic-cotangent expression
/// `sin^2(theta)/2 (omega_b - omega_a) {[coth(x_a/2) - d coth(d x_a/2)] - [same at x_b]}`.
///
/// Independent numerical path used to cross-check [`mean_work`].
pub fn mean_work_coth<T: Real>(p: &EngineParams<T>) -> T {
    let (xa, xb, d) = (p.x_a(), p.x_b(), p.d);
    let df = T::from_usize_lossy(d);
    let small = |x: T| df * x < T::lit(1e-3);
    let gap = if small(xa) || small(xb) {
        thermal::coth_gap_unchecked(xa, d) - thermal::coth_gap_unchecked(xb, d)
    } else {
        // group the unit parts of each coth so they cancel exactly
        let eps = thermal::coth_offset(xa) - thermal::coth_offset(xb);
        let delta = thermal::coth_offset(df * xa) - thermal::coth_offset(df * xb);
        eps - df * delta
    };
    T::lit(0.5) * p.sin2() * (p.omega_b - p.omega_a) * gap
}

/// `<Q_H> = omega_a sin^2(theta) (N_a - N_b)`; equal to
/// `omega_a / (omega_b - omega_a) <W>` whenever the spacings differ, and
/// well defined when they coincide.
pub fn mean_heat_hot<T: Real>(p: &EngineParams<T>) -> T {
    p.omega_a * p.sin2() * (p.n_a() - p.n_b())
}

/// `<Q_C> = -omega_b sin^2(theta) (N_a - N_b)`.
pub fn mean_heat_cold<T: Real>(p: &EngineParams<T>) -> T {
    -p.omega_b * p.sin2() * (p.n_a() - p.n_b())
}

/// Average entropy production `-beta_a <Q_H> - beta_b <Q_C>`, which reduces to
/// `sin^2(theta) (x_b - x_a)(N_a - N_b) >= 0`.
pub fn entropy_production<T: Real>(p: &EngineParams<T>) -> T {
    p.sin2() * (p.x_b() - p.x_a()) * (p.n_a() - p.n_b())
}

/// `(beta_a omega_a - beta_b omega_b) / (omega_a - omega_b) <W>`; `None` for
/// equal spacings.
pub fn entropy_production_ratio_form<T: Real>(p: &EngineParams<T>) -> Option<T> {
    let dw = p.omega_a - p.omega_b;
    (dw != T::zero()).then(|| (p.x_a() - p.x_b()) / dw * mean_work(p))
}

pub fn classify_regime<T: Real>(p: &EngineParams<T>) -> Regime {
    let tol = T::lit(REGIME_BOUNDARY_TOL);
    let ratio = p.omega_a / p.omega_b;
    let temp_ratio = p.beta_b / p.beta_a;
    let near = |a: T, b: T| (a - b).abs() <= tol * a.abs().max(b.abs());
    if near(ratio, T::one()) || near(ratio, temp_ratio) {
        Regime::Boundary
    } else if ratio < T::one() {
        Regime::ThermalAccelerator
    } else if ratio < temp_ratio {
        Regime::HeatEngine
    } else {
        Regime::Refrigerator
    }
}

/// Otto efficiency `1 - omega_b/omega_a`.
pub fn otto_efficiency<T: Real>(p: &EngineParams<T>) -> RegimeValue<T> {
    RegimeValue {
        value: T::one() - p.omega_b / p.omega_a,
        regime_ok: classify_regime(p) == Regime::HeatEngine,
    }
}

/// Refrigerator coefficient of performance `omega_b / (omega_a - omega_b)`.
pub fn cop<T: Real>(p: &EngineParams<T>) -> RegimeValue<T> {
    RegimeValue {
        value: p.omega_b / (p.omega_a - p.omega_b),
        regime_ok: classify_regime(p) == Regime::Refrigerator,
    }
}

/// Carnot efficiency `1 - T_b/T_a`.
pub fn carnot_efficiency<T: Real>(p: &EngineParams<T>) -> T {
    T::one() - p.beta_a / p.beta_b
}

/// Carnot coefficient of performance `T_b / (T_a - T_b)`.
pub fn carnot_cop<T: Real>(p: &EngineParams<T>) -> T {
    p.beta_a / (p.beta_b - p.beta_a)
}

pub fn curzon_ahlborn<T: Real>(tb_over_ta: T) -> T {
    T::one() - tb_over_ta.sqrt()
}
