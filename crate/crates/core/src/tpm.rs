//! Two-point-measurement ground truth.
//!
//! Both qudits are measured in their energy bases before and after the swap
//! stroke. Outcomes `(n, m) -> (l, s)` give `W = omega_a (l - n) + omega_b (s - m)`
//! and `Q_H = omega_a (n - l)`. Nothing here uses the closed forms of
//! [`crate::spectral`]: Gibbs weights are normalized by direct summation and
//! transition probabilities come from the matrix elements of
//! `V = cos(theta) I - i sin(theta) E`. The free evolution `U_0` only adds
//! phases to those amplitudes and drops out of every probability.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::engine::EngineParams;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest dimension accepted by [`enumerate_joint`].
pub const ENUMERATION_MAX_D: usize = 64;
/// Largest dimension accepted by [`enumerate_joint_naive`].
pub const NAIVE_MAX_D: usize = 8;
/// Samples drawn per independent RNG stream in [`sample`].
pub const SAMPLE_CHUNK: u64 = 1 << 16;

/// Energy change of each qudit for one realization: `(l - n, s - m)`.
pub type EnergyJump = (i64, i64);

/// One realization `(n, m) -> (l, s)` of the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TpmOutcome<T> {
    pub n: usize,
    pub m: usize,
    pub l: usize,
    pub s: usize,
    pub work: T,
    pub heat_hot: T,
}

impl<T: Real> TpmOutcome<T> {
    pub fn new(p: &EngineParams<T>, n: usize, m: usize, l: usize, s: usize) -> Self {
        let (da, db) = (l as i64 - n as i64, s as i64 - m as i64);
        Self {
            n,
            m,
            l,
            s,
            work: p.omega_a * T::from_i64_lossy(da) + p.omega_b * T::from_i64_lossy(db),
            heat_hot: -p.omega_a * T::from_i64_lossy(da),
        }
    }

    pub fn jump(&self) -> EnergyJump {
        (self.l as i64 - self.n as i64, self.s as i64 - self.m as i64)
    }
}

/// Normalized Gibbs weights `e^{-n x} / sum_k e^{-k x}` by direct summation.
pub fn gibbs_weights<T: Real>(x: T, d: usize) -> Vec<T> {
    let raw: Vec<T> = (0..d).map(|n| (-x * T::from_usize_lossy(n)).exp()).collect();
    let z: T = raw.iter().copied().sum();
    raw.into_iter().map(|w| w / z).collect()
}

/// `q(l, s | n, m) = |<l, s| V_theta |n, m>|^2`.
pub fn transition_probability<T: Real>(p: &EngineParams<T>, n: usize, m: usize, l: usize, s: usize) -> Result<T> {
    for index in [n, m, l, s] {
        if index >= p.d {
            return Err(Error::IndexOutOfRange { index, d: p.d });
        }
    }
    let (c, sn) = (p.theta.cos(), p.theta.sin());
    // amplitude = cos(theta) <l,s|n,m> - i sin(theta) <l,s|m,n>
    let re = if l == n && s == m { c } else { T::zero() };
    let im = if l == m && s == n { -sn } else { T::zero() };
    Ok(re * re + im * im)
}

/// Exact law over energy jumps `(l - n, s - m)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointLaw<T> {
    pub params: EngineParams<T>,
    pub probs: BTreeMap<EnergyJump, T>,
}

impl<T: Real> JointLaw<T> {
    pub fn prob(&self, jump: EnergyJump) -> T {
        self.probs.get(&jump).copied().unwrap_or_else(T::zero)
    }

    /// Probability that the hot bath releases `n omega_a`, i.e. `l - n = -n`.
    pub fn heat_marginal(&self, n: i64) -> T {
        self.probs
            .iter()
            .filter(|((da, _), _)| *da == -n)
            .map(|(_, &p)| p)
            .sum()
    }

    /// True when every populated jump conserves the total excitation number.
    pub fn anticorrelated(&self) -> bool {
        self.probs.iter().all(|(&(da, db), &p)| p == T::zero() || da == -db)
    }

    pub fn total(&self) -> T {
        self.probs.values().copied().sum()
    }

    pub fn expectation(&self, f: impl Fn(T, T) -> T) -> T {
        let (wa, wb) = (self.params.omega_a, self.params.omega_b);
        self.probs
            .iter()
            .map(|(&(da, db), &p)| {
                let (da, db) = (T::from_i64_lossy(da), T::from_i64_lossy(db));
                p * f(wa * da + wb * db, -wa * da)
            })
            .sum()
    }
}

/// Exhaustive enumeration using the selection rule of the partial swap:
/// from `(n, m)` only `(n, m)` and `(m, n)` are reachable, so the cost is
/// `O(d^2)`.
pub fn enumerate_joint<T: Real>(p: &EngineParams<T>) -> Result<JointLaw<T>> {
    if p.d > ENUMERATION_MAX_D {
        return Err(Error::DimensionCap {
            d: p.d,
            max: ENUMERATION_MAX_D,
        });
    }
    let pa = gibbs_weights(p.x_a(), p.d);
    let pb = gibbs_weights(p.x_b(), p.d);
    let mut probs = BTreeMap::new();
    for n in 0..p.d {
        for m in 0..p.d {
            let w = pa[n] * pb[m];
            let mut targets = vec![(n, m)];
            if n != m {
                targets.push((m, n));
            }
            for (l, s) in targets {
                let q = transition_probability(p, n, m, l, s)?;
                let jump = (l as i64 - n as i64, s as i64 - m as i64);
                let e = probs.entry(jump).or_insert_with(T::zero);
                *e = *e + w * q;
            }
        }
    }
    Ok(JointLaw { params: *p, probs })
}

/// Four-index sum over all `(n, m, l, s)` without any selection rule.
pub fn enumerate_joint_naive<T: Real>(p: &EngineParams<T>) -> Result<JointLaw<T>> {
    if p.d > NAIVE_MAX_D {
        return Err(Error::DimensionCap { d: p.d, max: NAIVE_MAX_D });
    }
    let pa = gibbs_weights(p.x_a(), p.d);
    let pb = gibbs_weights(p.x_b(), p.d);
    let mut probs: BTreeMap<EnergyJump, T> = BTreeMap::new();
    for n in 0..p.d {
        for m in 0..p.d {
            for l in 0..p.d {
                for s in 0..p.d {
                    let q = transition_probability(p, n, m, l, s)?;
                    if q == T::zero() {
                        continue;
                    }
                    let jump = (l as i64 - n as i64, s as i64 - m as i64);
                    let e = probs.entry(jump).or_insert_with(T::zero);
                    *e = *e + pa[n] * pb[m] * q;
                }
            }
        }
    }
    Ok(JointLaw { params: *p, probs })
}

/// Running sums of a scalar observable.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct Accumulator {
    pub sum: f64,
    pub sum_sq: f64,
}

impl Accumulator {
    fn push(&mut self, v: f64) {
        self.sum += v;
        self.sum_sq += v * v;
    }

    fn merge(&mut self, other: &Accumulator) {
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }
}

/// Sample mean with its standard error `std / sqrt(count)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    pub fn z_score(&self, exact: f64) -> f64 {
        if self.std_error == 0.0 {
            if self.mean == exact {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            (self.mean - exact) / self.std_error
        }
    }
}

/// Aggregated Monte Carlo realizations of the protocol.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalStats {
    pub sample_count: u64,
    pub histogram: BTreeMap<EnergyJump, u64>,
    pub work: Accumulator,
    pub work_sq: Accumulator,
    pub heat_hot: Accumulator,
    pub heat_hot_sq: Accumulator,
    pub work_heat: Accumulator,
    /// `e^{-Sigma}` per realization, with `Sigma = (beta_b - beta_a) Q_H + beta_b W`.
    pub exp_neg_entropy: Accumulator,
}

impl EmpiricalStats {
    fn empty() -> Self {
        Self {
            sample_count: 0,
            histogram: BTreeMap::new(),
            work: Accumulator::default(),
            work_sq: Accumulator::default(),
            heat_hot: Accumulator::default(),
            heat_hot_sq: Accumulator::default(),
            work_heat: Accumulator::default(),
            exp_neg_entropy: Accumulator::default(),
        }
    }

    fn merge(&mut self, other: &EmpiricalStats) {
        self.sample_count += other.sample_count;
        for (k, v) in &other.histogram {
            *self.histogram.entry(*k).or_insert(0) += v;
        }
        self.work.merge(&other.work);
        self.work_sq.merge(&other.work_sq);
        self.heat_hot.merge(&other.heat_hot);
        self.heat_hot_sq.merge(&other.heat_hot_sq);
        self.work_heat.merge(&other.work_heat);
        self.exp_neg_entropy.merge(&other.exp_neg_entropy);
    }

    pub fn estimate(&self, acc: &Accumulator) -> Estimate {
        let n = self.sample_count as f64;
        let mean = acc.sum / n;
        let var = (acc.sum_sq / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
        Estimate {
            mean,
            std_error: (var / n).sqrt(),
        }
    }

    pub fn frequency(&self, jump: EnergyJump) -> f64 {
        self.histogram.get(&jump).copied().unwrap_or(0) as f64 / self.sample_count as f64
    }

    /// Empirical `p[Q_H = n omega_a]`.
    pub fn heat_frequency(&self, n: i64) -> f64 {
        let hits: u64 = self
            .histogram
            .iter()
            .filter(|((da, _), _)| *da == -n)
            .map(|(_, c)| c)
            .sum();
        hits as f64 / self.sample_count as f64
    }

    /// Range `(min, max)` of `-W/Q_H` over observed outcomes with `Q_H != 0`.
    pub fn efficiency_range(&self, omega_a: f64, omega_b: f64) -> Option<(f64, f64)> {
        self.histogram
            .keys()
            .filter(|(da, _)| *da != 0)
            .map(|&(da, db)| {
                let w = omega_a * da as f64 + omega_b * db as f64;
                let q = -omega_a * da as f64;
                -w / q
            })
            .fold(None, |acc, r| match acc {
                None => Some((r, r)),
                Some((lo, hi)) => Some((f64::min(lo, r), f64::max(hi, r))),
            })
    }
}

fn cumulative(weights: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    let mut cdf: Vec<f64> = weights
        .iter()
        .map(|w| {
            acc += w;
            acc
        })
        .collect();
    if let Some(last) = cdf.last_mut() {
        *last = 1.0;
    }
    cdf
}

fn draw(cdf: &[f64], u: f64) -> usize {
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

fn sample_chunk(p: &EngineParams<f64>, cdf_a: &[f64], cdf_b: &[f64], count: u64, seed: u64, stream: u64) -> EmpiricalStats {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut out = EmpiricalStats::empty();
    let cos2 = p.cos2();
    let (ba, bb) = (p.beta_a, p.beta_b);
    for _ in 0..count {
        let n = draw(cdf_a, rng.gen::<f64>());
        let m = draw(cdf_b, rng.gen::<f64>());
        let keep = n == m || rng.gen::<f64>() < cos2;
        let (l, s) = if keep { (n, m) } else { (m, n) };
        let o = TpmOutcome::new(p, n, m, l, s);
        *out.histogram.entry(o.jump()).or_insert(0) += 1;
        out.work.push(o.work);
        out.work_sq.push(o.work * o.work);
        out.heat_hot.push(o.heat_hot);
        out.heat_hot_sq.push(o.heat_hot * o.heat_hot);
        out.work_heat.push(o.work * o.heat_hot);
        let sigma = (bb - ba) * o.heat_hot + bb * o.work;
        out.exp_neg_entropy.push((-sigma).exp());
    }
    out.sample_count = count;
    out
}

/// Draws `count` realizations of the protocol.
///
/// Initial outcomes come from inverse-CDF sampling of the two Gibbs
/// distributions, final outcomes from [`transition_probability`]. The run is
/// split into chunks of [`SAMPLE_CHUNK`] draws; chunk `k` uses a ChaCha8
/// generator seeded with `seed` on stream `k`, and chunks are merged in index
/// order. Results are therefore identical for a given seed regardless of how
/// many threads execute the chunks.
pub fn sample(p: &EngineParams<f64>, count: u64, seed: u64) -> Result<EmpiricalStats> {
    if count == 0 {
        return Err(Error::Domain("sample count must be at least 1".into()));
    }
    let cdf_a = cumulative(&gibbs_weights(p.x_a(), p.d));
    let cdf_b = cumulative(&gibbs_weights(p.x_b(), p.d));
    let chunks = count.div_ceil(SAMPLE_CHUNK);
    let parts: Vec<EmpiricalStats> = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let len = SAMPLE_CHUNK.min(count - k * SAMPLE_CHUNK);
            sample_chunk(p, &cdf_a, &cdf_b, len, seed, k)
        })
        .collect();
    let mut total = EmpiricalStats::empty();
    for part in &parts {
        total.merge(part);
    }
    Ok(total)
}

/// Pearson two-sample chi-square test of homogeneity between two histograms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

pub fn two_sample_chi_square(a: &EmpiricalStats, b: &EmpiricalStats) -> ChiSquareTest {
    use statrs::distribution::{ChiSquared, ContinuousCDF};

    let keys: std::collections::BTreeSet<_> = a.histogram.keys().chain(b.histogram.keys()).collect();
    let (na, nb) = (a.sample_count as f64, b.sample_count as f64);
    let (ka, kb) = ((nb / na).sqrt(), (na / nb).sqrt());
    let mut stat = 0.0;
    let mut bins = 0usize;
    for key in keys {
        let ca = a.histogram.get(key).copied().unwrap_or(0) as f64;
        let cb = b.histogram.get(key).copied().unwrap_or(0) as f64;
        if ca + cb == 0.0 {
            continue;
        }
        stat += (ka * ca - kb * cb).powi(2) / (ca + cb);
        bins += 1;
    }
    let dof = bins.saturating_sub(1).max(1);
    let p_value = ChiSquared::new(dof as f64).map(|c| 1.0 - c.cdf(stat)).unwrap_or(f64::NAN);
    ChiSquareTest {
        statistic: stat,
        dof,
        p_value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3};

    fn reference() -> EngineParams<f64> {
        EngineParams::<f64>::new(4, 1.0, 0.6, 0.5, 1.0, FRAC_PI_2).unwrap()
    }

    #[test]
    fn transition_examples() {
        let p = reference().with_theta(0.9);
        assert_eq!(transition_probability(&p, 2, 2, 2, 2).unwrap(), 1.0);
        let swap = reference();
        assert!((transition_probability(&swap, 1, 3, 3, 1).unwrap() - 1.0).abs() < 1e-15);
        let third = reference().with_theta(FRAC_PI_3);
        assert!((transition_probability(&third, 0, 2, 0, 2).unwrap() - 0.25).abs() < 1e-15);
        assert!((transition_probability(&third, 0, 2, 2, 0).unwrap() - 0.75).abs() < 1e-15);
        assert_eq!(transition_probability(&third, 0, 2, 1, 1).unwrap(), 0.0);
        assert!(matches!(
            transition_probability(&third, 0, 4, 0, 0),
            Err(Error::IndexOutOfRange { index: 4, d: 4 })
        ));
    }

    #[test]
    fn rows_sum_to_one() {
        let p = reference().with_theta(0.77);
        for n in 0..4 {
            for m in 0..4 {
                let mut row = 0.0;
                for l in 0..4 {
                    for s in 0..4 {
                        row += transition_probability(&p, n, m, l, s).unwrap();
                    }
                }
                assert!((row - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn enumeration_zero_coupling_is_an_atom() {
        let law = enumerate_joint(&reference().with_theta(0.0)).unwrap();
        assert!((law.prob((0, 0)) - 1.0).abs() < 1e-15);
        assert!((law.total() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn qubit_enumeration_three_points() {
        let p = EngineParams::<f64>::new(2, 1.0, 0.4, 0.8, 1.7, 1.0).unwrap();
        let law = enumerate_joint(&p).unwrap();
        let populated: Vec<_> = law.probs.iter().filter(|(_, &v)| v > 0.0).map(|(k, _)| *k).collect();
        assert_eq!(populated, vec![(-1, 1), (0, 0), (1, -1)]);
        // direct four-term sum
        let (za, zb) = (1.0 + (-0.8f64).exp(), 1.0 + (-0.68f64).exp());
        let (pa1, pb1) = ((-0.8f64).exp() / za, (-0.68f64).exp() / zb);
        let s2 = 1f64.sin().powi(2);
        assert!((law.prob((-1, 1)) - s2 * pa1 * (1.0 - pb1)).abs() < 1e-15);
        assert!((law.prob((1, -1)) - s2 * (1.0 - pa1) * pb1).abs() < 1e-15);
        assert!(law.anticorrelated());
    }

    #[test]
    fn naive_and_selection_rule_enumerations_agree() {
        let p = EngineParams::<f64>::new(5, 1.1, 0.3, 0.6, 1.4, 0.7).unwrap();
        let fast = enumerate_joint(&p).unwrap();
        let slow = enumerate_joint_naive(&p).unwrap();
        for (k, v) in &slow.probs {
            assert!((fast.prob(*k) - v).abs() < 1e-15);
        }
        assert!(enumerate_joint_naive(&p.with_dimension(9)).is_err());
        assert!(enumerate_joint(&p.with_dimension(65)).is_err());
    }

    #[test]
    fn sampling_is_deterministic() {
        let p = reference();
        let a = sample(&p, 200_000, 7).unwrap();
        let b = sample(&p, 200_000, 7).unwrap();
        assert_eq!(a, b);
        let c = sample(&p, 200_000, 8).unwrap();
        assert_ne!(a.histogram, c.histogram);
        assert!(sample(&p, 0, 1).is_err());
    }

    #[test]
    fn sampling_zero_coupling() {
        let s = sample(&reference().with_theta(0.0), 10_000, 3).unwrap();
        assert_eq!(s.histogram.len(), 1);
        assert_eq!(s.histogram[&(0, 0)], 10_000);
    }

    #[test]
    fn sampling_tracks_exact_law() {
        let p = reference();
        let s = sample(&p, 400_000, 11).unwrap();
        let law = enumerate_joint(&p).unwrap();
        for (&k, &prob) in &law.probs {
            let se = (prob * (1.0 - prob) / s.sample_count as f64).sqrt();
            assert!((s.frequency(k) - prob).abs() < 5.0 * se + 1e-12, "{k:?}");
        }
        let range = s.efficiency_range(1.0, 0.6).unwrap();
        assert!((range.0 - 0.4).abs() < 1e-15 && (range.1 - 0.4).abs() < 1e-15);
    }

    #[test]
    fn chi_square_detects_seed_independence_and_mismatch() {
        let p = reference();
        let a = sample(&p, 100_000, 1).unwrap();
        let b = sample(&p, 100_000, 2).unwrap();
        assert!(two_sample_chi_square(&a, &b).p_value > 1e-3);
        let c = sample(&p.with_theta(0.6), 100_000, 2).unwrap();
        assert!(two_sample_chi_square(&a, &c).p_value < 1e-3);
    }
}
