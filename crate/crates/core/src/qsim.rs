//! State-vector instantiation of the evenness oracle.
//!
//! The control register is prepared in the uniform superposition over the
//! pattern's domain, an output qubit coherently receives
//! `y = f(x) xor f(-x)`, and `y` is measured. A measurement returns 1 with
//! probability `t / D`, where `t` counts the violating domain points, so a
//! shot can miss a violation but can never report one that is not there.

use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::criteria::IndexedFunction;
use crate::error::{Error, Result};
use crate::index::SignedIndex;
use crate::oracle::{check_widths, EvennessOracle, QueryLedger, Syndrome};
use crate::register::RegisterPattern;

/// Real amplitudes over `(n + 1)`-bit basis states; only the support is stored.
#[derive(Debug, Clone, PartialEq)]
pub struct PreparedState {
    width: usize,
    // Ascending by encoding.
    support: Vec<(SignedIndex, f64)>,
}

impl PreparedState {
    /// Uniform amplitude `1/sqrt(D)` on every index the pattern selects.
    pub fn prepare(pattern: &RegisterPattern) -> Self {
        let amplitude = 1.0 / (pattern.domain_size() as f64).sqrt();
        PreparedState { width: pattern.width(), support: pattern.domain().map(|x| (x, amplitude)).collect() }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn amplitude(&self, x: &SignedIndex) -> f64 {
        self.support.binary_search_by_key(&x.encoding(), |(s, _)| s.encoding()).map_or(0.0, |i| self.support[i].1)
    }

    pub fn support(&self) -> &[(SignedIndex, f64)] {
        &self.support
    }

    pub fn norm_squared(&self) -> f64 {
        self.support.iter().map(|(_, a)| a * a).sum()
    }
}

/// The measurement statistics of one evenness query.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationProfile {
    /// `D`, the number of domain points.
    pub domain_size: u64,
    /// `t`, the number of domain points with `f(x) != f(-x)`.
    pub violations: u64,
    /// Probability that one measurement of `y` reads non-zero.
    pub probability: f64,
    state: PreparedState,
    flagged: Vec<bool>,
}

impl ViolationProfile {
    /// Runs the circuit once coherently over the pattern's domain.
    pub fn compute(f: &dyn IndexedFunction, pattern: &RegisterPattern) -> Result<Self> {
        check_widths(f, pattern)?;
        let state = PreparedState::prepare(pattern);
        let flagged: Vec<bool> = state.support.iter().map(|&(x, _)| f.evaluate(x) != f.evaluate(x.negate())).collect();
        let probability =
            state.support.iter().zip(&flagged).filter(|(_, &hit)| hit).fold(0.0, |acc, ((_, a), _)| acc + a * a);
        Ok(ViolationProfile {
            domain_size: state.support.len() as u64,
            violations: flagged.iter().filter(|&&hit| hit).count() as u64,
            probability,
            state,
            flagged,
        })
    }

    /// Probability that `shots` independent measurements all read zero.
    pub fn miss_probability(&self, shots: u64) -> f64 {
        miss_probability(self.probability, shots)
    }

    pub fn violating(&self) -> impl Iterator<Item = SignedIndex> + '_ {
        self.state.support.iter().zip(&self.flagged).filter(|(_, &hit)| hit).map(|((x, _), _)| *x)
    }

    /// Measures the register `shots` times; `Uneven` if any shot reads a
    /// non-zero `y`, with the first such basis state as witness.
    fn measure<R: rand::Rng>(&self, shots: u64, rng: &mut R) -> Syndrome {
        let weights = self.state.support.iter().map(|(_, a)| a * a);
        let dist = WeightedIndex::new(weights).expect("state is normalised and non-empty");
        let mut witness = None;
        for _ in 0..shots {
            let k = dist.sample(rng);
            if witness.is_none() && self.flagged[k] {
                witness = Some(self.state.support[k].0);
            }
        }
        witness.map_or(Syndrome::EVEN, |x| Syndrome::uneven(Some(x)))
    }
}

pub fn miss_probability(probability: f64, shots: u64) -> f64 {
    (1.0 - probability).powf(shots as f64)
}

/// Per-shot probability `t / D` of reading a non-zero output register.
pub fn violation_probability(f: &dyn IndexedFunction, pattern: &RegisterPattern) -> Result<f64> {
    Ok(ViolationProfile::compute(f, pattern)?.probability)
}

/// One sampled evenness query with a fresh generator seeded from `seed`.
pub fn sample_even_or_not(
    f: &dyn IndexedFunction,
    pattern: &RegisterPattern,
    shots: u64,
    seed: u64,
    ledger: &QueryLedger,
) -> Result<Syndrome> {
    sample_with(f, pattern, shots, &mut ChaCha8Rng::seed_from_u64(seed), ledger)
}

fn sample_with<R: rand::Rng>(
    f: &dyn IndexedFunction,
    pattern: &RegisterPattern,
    shots: u64,
    rng: &mut R,
    ledger: &QueryLedger,
) -> Result<Syndrome> {
    if shots == 0 {
        return Err(Error::Contract("sampled oracle needs at least one shot".into()));
    }
    let profile = ViolationProfile::compute(f, pattern)?;
    ledger.record_call();
    ledger.record_point_evaluations(2 * profile.domain_size);
    ledger.record_shots(shots);
    Ok(profile.measure(shots, rng))
}

/// Evenness oracle that repeats the sampled query `shots` times per call.
///
/// Its generator is seeded once, so a given seed replays the same sequence
/// of syndromes for the same sequence of queries.
#[derive(Debug, Clone)]
pub struct SampledOracle {
    shots: u64,
    seed: u64,
    rng: ChaCha8Rng,
}

impl SampledOracle {
    pub fn new(shots: u64, seed: u64) -> Result<Self> {
        if shots == 0 {
            return Err(Error::Contract("sampled oracle needs at least one shot".into()));
        }
        Ok(SampledOracle { shots, seed, rng: ChaCha8Rng::seed_from_u64(seed) })
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }
}

impl EvennessOracle for SampledOracle {
    fn name(&self) -> &str {
        "sampled"
    }

    fn is_exact(&self) -> bool {
        false
    }

    fn seed(&self) -> Option<u64> {
        Some(self.seed)
    }

    fn detect(&mut self, f: &dyn IndexedFunction, pattern: &RegisterPattern, ledger: &QueryLedger) -> Result<Syndrome> {
        sample_with(f, pattern, self.shots, &mut self.rng, ledger)
    }
}
