//! The evenness oracle contract, its exhaustive reference implementation,
//! and query accounting.

use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};

use crate::criteria::IndexedFunction;
use crate::error::{Error, Result};
use crate::index::SignedIndex;
use crate::register::RegisterPattern;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    /// The all-zero output register.
    Even,
    /// Any non-zero output register.
    Uneven,
}

/// What an evenness query reports.
///
/// `Even` never carries a witness. An `Uneven` witness `x` satisfies
/// `f(x) != f(negate(x))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Syndrome {
    verdict: Verdict,
    witness: Option<SignedIndex>,
}

impl Syndrome {
    pub const EVEN: Syndrome = Syndrome { verdict: Verdict::Even, witness: None };

    pub fn uneven(witness: Option<SignedIndex>) -> Self {
        Syndrome { verdict: Verdict::Uneven, witness }
    }

    pub fn verdict(&self) -> Verdict {
        self.verdict
    }

    pub fn witness(&self) -> Option<SignedIndex> {
        self.witness
    }

    pub fn is_even(&self) -> bool {
        self.verdict == Verdict::Even
    }

    pub fn is_uneven(&self) -> bool {
        self.verdict == Verdict::Uneven
    }
}

/// Counts oracle calls, function evaluations made inside them, and sampling
/// shots. Counters only grow and updates are atomic, so a ledger can be
/// shared across threads.
#[derive(Debug, Default)]
pub struct QueryLedger {
    oracle_calls: AtomicU64,
    point_evaluations: AtomicU64,
    shots: AtomicU64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerSnapshot {
    pub oracle_calls: u64,
    pub point_evaluations: u64,
    pub shots: u64,
}

impl QueryLedger {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record_call(&self) {
        self.oracle_calls.fetch_add(1, Ordering::Relaxed);
    }

    pub fn record_point_evaluations(&self, count: u64) {
        self.point_evaluations.fetch_add(count, Ordering::Relaxed);
    }

    pub fn record_shots(&self, count: u64) {
        self.shots.fetch_add(count, Ordering::Relaxed);
    }

    pub fn oracle_calls(&self) -> u64 {
        self.oracle_calls.load(Ordering::Relaxed)
    }

    pub fn snapshot(&self) -> LedgerSnapshot {
        LedgerSnapshot {
            oracle_calls: self.oracle_calls.load(Ordering::Relaxed),
            point_evaluations: self.point_evaluations.load(Ordering::Relaxed),
            shots: self.shots.load(Ordering::Relaxed),
        }
    }
}

/// A black-box evenness test over the domain a register pattern selects.
///
/// Every implementation is sound: if `f` is even on `domain(pattern)` the
/// result is `Even`. Exact oracles are also complete and report every
/// violation; inexact ones may miss violations but never invent them.
pub trait EvennessOracle {
    fn name(&self) -> &str;

    fn is_exact(&self) -> bool;

    /// Seed driving any randomness, for trace records.
    fn seed(&self) -> Option<u64> {
        None
    }

    fn detect(&mut self, f: &dyn IndexedFunction, pattern: &RegisterPattern, ledger: &QueryLedger) -> Result<Syndrome>;
}

impl<O: EvennessOracle + ?Sized> EvennessOracle for &mut O {
    fn name(&self) -> &str {
        (**self).name()
    }

    fn is_exact(&self) -> bool {
        (**self).is_exact()
    }

    fn seed(&self) -> Option<u64> {
        (**self).seed()
    }

    fn detect(&mut self, f: &dyn IndexedFunction, pattern: &RegisterPattern, ledger: &QueryLedger) -> Result<Syndrome> {
        (**self).detect(f, pattern, ledger)
    }
}

pub(crate) fn check_widths(f: &dyn IndexedFunction, pattern: &RegisterPattern) -> Result<()> {
    if f.input_width() != pattern.width() {
        return Err(Error::Contract(format!(
            "function takes {}-bit inputs but pattern {pattern} has width {}",
            f.input_width(),
            pattern.width()
        )));
    }
    Ok(())
}

/// Classical reference oracle: compares `f(x)` with `f(-x)` at every domain
/// point in ascending order, stopping at the first violation.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExhaustiveOracle;

impl EvennessOracle for ExhaustiveOracle {
    fn name(&self) -> &str {
        "exhaustive"
    }

    fn is_exact(&self) -> bool {
        true
    }

    fn detect(&mut self, f: &dyn IndexedFunction, pattern: &RegisterPattern, ledger: &QueryLedger) -> Result<Syndrome> {
        check_widths(f, pattern)?;
        ledger.record_call();
        let mut evaluations = 0u64;
        let mut witness = None;
        for x in pattern.domain() {
            evaluations += 2;
            if f.evaluate(x) != f.evaluate(x.negate()) {
                witness = Some(x);
                break;
            }
        }
        ledger.record_point_evaluations(evaluations);
        Ok(witness.map_or(Syndrome::EVEN, |x| Syndrome::uneven(Some(x))))
    }
}
