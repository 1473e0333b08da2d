//! Two-qudit partial-swap quantum Otto engine.
//!
//! The engine couples two `d`-level systems prepared in Gibbs states at
//! inverse temperatures `beta_a` (hot) and `beta_b` (cold). One stroke applies
//! `exp(-i theta E)` with `E` the exchange operator. Modules:
//!
//! * [`thermal`]: truncated-oscillator thermodynamics of a single qudit.
//! * [`engine`]: parameters, first moments, regimes and efficiencies.
//! * [`spectral`]: characteristic function, full statistics and fluctuation theorems.
//! * [`tpm`]: two-point-measurement enumeration and Monte Carlo sampling.
//! * [`analysis`]: thermodynamic uncertainty relations and maximum-work efficiency.
//! * [`finite_time`]: repeated cycles with partial thermalization.
//!
//! Everything is generic over [`Real`]; `*64` and `*32` aliases fix the scalar.

pub mod analysis;
pub mod engine;
pub mod error;
pub mod finite_time;
pub mod optimize;
pub mod scalar;
pub mod spectral;
pub mod thermal;
pub mod tpm;

pub use engine::{EngineParams, MomentSet, Regime, RegimeValue};
pub use error::{Error, Result};
pub use scalar::Real;

pub type EngineParams64 = engine::EngineParams<f64>;
pub type EngineParams32 = engine::EngineParams<f32>;
pub type MomentSet64 = engine::MomentSet<f64>;
pub type MomentSet32 = engine::MomentSet<f32>;
pub type Distribution64 = spectral::WorkHeatDistribution<f64>;
pub type Distribution32 = spectral::WorkHeatDistribution<f32>;
pub type FiniteTimeParams64 = finite_time::FiniteTimeParams<f64>;
pub type FiniteTimeParams32 = finite_time::FiniteTimeParams<f32>;
