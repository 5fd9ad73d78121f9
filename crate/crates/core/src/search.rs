//! Search drivers that locate matches purely through evenness queries.
//!
//! Both drivers start from the positive half `+0…0`: the sign-extended
//! predicate is uneven there exactly when some item matches. They then fix
//! one magnitude cell per step, left to right.
//!
//! - [`search_single`] probes only the left half (`Plus`) at each step and
//!   keeps it when it is uneven, otherwise takes the right half. It costs
//!   exactly `n + 1` queries when a match exists and finds the leftmost one.
//! - [`search_multi`] probes both halves at each step and recurses into both
//!   when both are uneven, so it costs two queries per resolved cell of every
//!   branch and returns every match.
//!
//! Under an inexact oracle a missed violation can only prune a branch or
//! steer a single search wrong. Leaves are checked against the function
//! before they are reported, so results never contain non-matches.

use serde::{Deserialize, Serialize};

use crate::criteria::{IndexedFunction, Instance};
use crate::error::{Error, Result};
use crate::index::SignedIndex;
use crate::oracle::{EvennessOracle, LedgerSnapshot, QueryLedger, Syndrome, Verdict};
use crate::register::{Cell, RegisterPattern};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Single,
    Multi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    PresenceCheck,
    Probe,
    Decide,
    Recurse,
    Emit,
}

/// One step of a search.
///
/// `pattern` is the queried pattern for checks and probes, the updated
/// pattern for decisions, the child pattern for recursions and the fully
/// determined pattern for emissions (whose `witness` holds the read-out
/// index). A decision with an `even` verdict marks a pruned branch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub kind: EventKind,
    pub pattern: String,
    pub j: usize,
    pub verdict: Option<Verdict>,
    pub witness: Option<String>,
    pub depth: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchTrace {
    pub algo: Algo,
    pub n: u32,
    pub seed: Option<u64>,
    pub events: Vec<TraceEvent>,
    pub result: Vec<u64>,
    pub ledger: LedgerSnapshot,
}

impl SearchTrace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("trace: {e}")))
    }

    pub fn count(&self, kind: EventKind) -> usize {
        self.events.iter().filter(|e| e.kind == kind).count()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchOptions {
    /// In the multi-item driver, skip the right probe when the left one is
    /// even: the parent was uneven, so the right half must be.
    pub adaptive: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchOutcome {
    /// Matching list positions, ascending.
    pub positions: Vec<u64>,
    pub trace: SearchTrace,
}

impl SearchOutcome {
    pub fn position(&self) -> Option<u64> {
        self.positions.first().copied()
    }

    pub fn oracle_calls(&self) -> u64 {
        self.trace.ledger.oracle_calls
    }
}

/// Match count, and for two matches the length of the magnitude prefix they
/// share.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchStats {
    pub match_count: usize,
    pub shared_prefix: Option<u32>,
    pub oracle_calls: u64,
}

impl SearchStats {
    pub fn new(positions: &[u64], magnitude_bits: u32, oracle_calls: u64) -> Self {
        let shared_prefix = match positions {
            [a, b] => Some(magnitude_bits - (64 - (a ^ b).leading_zeros())),
            _ => None,
        };
        SearchStats { match_count: positions.len(), shared_prefix, oracle_calls }
    }
}

/// Brute-force reference: every position whose item matches, ascending.
pub fn linear_scan(instance: &Instance) -> Vec<u64> {
    (0..instance.items().raw_len() as u64).filter(|&p| instance.f1(p).unwrap_or(false)).collect()
}

/// One query over the positive half; true iff some item matches.
pub fn presence(f: &dyn IndexedFunction, oracle: &mut dyn EvennessOracle, ledger: &QueryLedger) -> Result<bool> {
    let pattern = RegisterPattern::positive_half(magnitude_bits_of(f)?)?;
    Ok(oracle.detect(f, &pattern, ledger)?.is_uneven())
}

pub fn search_single<O: EvennessOracle>(instance: &Instance, oracle: O, ledger: &QueryLedger) -> Result<SearchOutcome> {
    search_single_fn(&instance.as_indexed_function(), oracle, ledger)
}

pub fn search_multi<O: EvennessOracle>(
    instance: &Instance,
    oracle: O,
    ledger: &QueryLedger,
    options: SearchOptions,
) -> Result<SearchOutcome> {
    search_multi_fn(&instance.as_indexed_function(), oracle, ledger, options)
}

/// Single-item search over any function that vanishes on negative indices.
/// Reports the magnitude position of the leftmost violating index.
pub fn search_single_fn<O: EvennessOracle>(
    f: &dyn IndexedFunction,
    oracle: O,
    ledger: &QueryLedger,
) -> Result<SearchOutcome> {
    let mut run = Run::new(f, oracle, ledger, Algo::Single, SearchOptions::default())?;
    let Some(mut pattern) = run.presence_check()? else {
        return Ok(run.finish());
    };
    for j in 1..=run.n as usize {
        let left = pattern.with_cell(j, Cell::Plus)?;
        let y = run.probe(&left, j, 1)?;
        pattern = if y.is_uneven() { left } else { pattern.with_cell(j, Cell::Minus)? };
        run.decide(&pattern, j, 1, None);
    }
    run.emit(&pattern, 1)?;
    Ok(run.finish())
}

/// Multi-item search over any function that vanishes on negative indices.
pub fn search_multi_fn<O: EvennessOracle>(
    f: &dyn IndexedFunction,
    oracle: O,
    ledger: &QueryLedger,
    options: SearchOptions,
) -> Result<SearchOutcome> {
    let mut run = Run::new(f, oracle, ledger, Algo::Multi, options)?;
    if let Some(pattern) = run.presence_check()? {
        run.resolve(pattern, 1, 1)?;
    }
    Ok(run.finish())
}

fn magnitude_bits_of(f: &dyn IndexedFunction) -> Result<u32> {
    match f.input_width() {
        0 | 1 => Err(Error::Contract(format!("function input width {} leaves no magnitude bits", f.input_width()))),
        w => Ok(w as u32 - 1),
    }
}

struct Run<'a, O> {
    f: &'a dyn IndexedFunction,
    oracle: O,
    ledger: &'a QueryLedger,
    options: SearchOptions,
    algo: Algo,
    n: u32,
    events: Vec<TraceEvent>,
    found: Vec<u64>,
}

impl<'a, O: EvennessOracle> Run<'a, O> {
    fn new(
        f: &'a dyn IndexedFunction,
        oracle: O,
        ledger: &'a QueryLedger,
        algo: Algo,
        options: SearchOptions,
    ) -> Result<Self> {
        let n = magnitude_bits_of(f)?;
        Ok(Run { f, oracle, ledger, options, algo, n, events: Vec::new(), found: Vec::new() })
    }

    fn record(&mut self, kind: EventKind, pattern: &RegisterPattern, j: usize, depth: u32, syndrome: Option<Syndrome>) {
        self.events.push(TraceEvent {
            kind,
            pattern: pattern.to_string(),
            j,
            verdict: syndrome.map(|s| s.verdict()),
            witness: syndrome.and_then(|s| s.witness()).map(|w| w.to_string()),
            depth,
        });
    }

    /// The positive-half pattern when something is present.
    fn presence_check(&mut self) -> Result<Option<RegisterPattern>> {
        let pattern = RegisterPattern::positive_half(self.n)?;
        let y = self.oracle.detect(self.f, &pattern, self.ledger)?;
        self.record(EventKind::PresenceCheck, &pattern, 0, 1, Some(y));
        Ok(y.is_uneven().then_some(pattern))
    }

    fn probe(&mut self, pattern: &RegisterPattern, j: usize, depth: u32) -> Result<Syndrome> {
        let y = self.oracle.detect(self.f, pattern, self.ledger)?;
        self.record(EventKind::Probe, pattern, j, depth, Some(y));
        Ok(y)
    }

    fn decide(&mut self, pattern: &RegisterPattern, j: usize, depth: u32, verdict: Option<Verdict>) {
        self.events.push(TraceEvent {
            kind: EventKind::Decide,
            pattern: pattern.to_string(),
            j,
            verdict,
            witness: None,
            depth,
        });
    }

    /// Fixes cells `start..=n` of `pattern`, forking on doubly uneven splits.
    fn resolve(&mut self, mut pattern: RegisterPattern, start: usize, depth: u32) -> Result<()> {
        for j in start..=self.n as usize {
            let left = pattern.with_cell(j, Cell::Plus)?;
            let right = pattern.with_cell(j, Cell::Minus)?;
            let y1 = self.probe(&left, j, depth)?.is_uneven();
            let y2 = if self.options.adaptive && !y1 { true } else { self.probe(&right, j, depth)?.is_uneven() };
            match (y1, y2) {
                (true, false) => pattern = left,
                (false, true) => pattern = right,
                (true, true) => {
                    self.record(EventKind::Recurse, &left, j, depth + 1, None);
                    self.resolve(left, j + 1, depth + 1)?;
                    self.record(EventKind::Recurse, &right, j, depth + 1, None);
                    return self.resolve(right, j + 1, depth + 1);
                }
                (false, false) => {
                    if self.oracle.is_exact() {
                        return Err(Error::Contract(format!(
                            "both halves of uneven pattern {pattern} reported even at cell {j}"
                        )));
                    }
                    self.decide(&pattern, j, depth, Some(Verdict::Even));
                    return Ok(());
                }
            }
            self.decide(&pattern, j, depth, None);
        }
        self.emit(&pattern, depth)
    }

    /// Reads out a determined pattern and reports it if the function really
    /// is uneven there.
    fn emit(&mut self, pattern: &RegisterPattern, depth: u32) -> Result<()> {
        let x: SignedIndex = pattern.readout()?;
        if self.f.evaluate(x) == self.f.evaluate(x.negate()) {
            if self.oracle.is_exact() {
                return Err(Error::Contract(format!("read-out index {x} does not violate evenness")));
            }
            return Ok(());
        }
        self.events.push(TraceEvent {
            kind: EventKind::Emit,
            pattern: pattern.to_string(),
            j: self.n as usize,
            verdict: None,
            witness: Some(x.to_string()),
            depth,
        });
        self.found.push(x.magnitude_position());
        Ok(())
    }

    fn finish(self) -> SearchOutcome {
        let mut positions = self.found;
        positions.sort_unstable();
        positions.dedup();
        let trace = SearchTrace {
            algo: self.algo,
            n: self.n,
            seed: self.oracle.seed(),
            events: self.events,
            result: positions.clone(),
            ledger: self.ledger.snapshot(),
        };
        SearchOutcome { positions, trace }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::{gen_instance, F2Kind, ItemList, SearchSpec, TruthTable};
    use crate::oracle::ExhaustiveOracle;
    use crate::qsim::SampledOracle;

    fn instance(items: &[&str], z: &str) -> Instance {
        let width = items.first().map_or(z.len(), |s| s.len());
        Instance::new(
            ItemList::new(width, items.iter().map(|s| s.parse().unwrap()).collect()).unwrap(),
            SearchSpec::new(F2Kind::Identity, z.parse().unwrap()).unwrap(),
        )
        .unwrap()
    }

    fn running_instance() -> Instance {
        instance(&["101", "010", "110", "011"], "110")
    }

    fn patterns(trace: &SearchTrace, kind: EventKind) -> Vec<(String, Option<Verdict>)> {
        trace.events.iter().filter(|e| e.kind == kind).map(|e| (e.pattern.clone(), e.verdict)).collect()
    }

    #[test]
    fn linear_scan_examples() {
        assert_eq!(linear_scan(&running_instance()), [2]);
        assert!(linear_scan(&instance(&["101", "010"], "111")).is_empty());
        assert_eq!(linear_scan(&instance(&["11", "11", "11"], "11")), [0, 1, 2]);
    }

    #[test]
    fn presence_examples() {
        let ledger = QueryLedger::new();
        let r = running_instance();
        assert!(presence(&r.as_indexed_function(), &mut ExhaustiveOracle, &ledger).unwrap());
        assert_eq!(ledger.oracle_calls(), 1);

        let none = instance(&["101", "010", "110", "011"], "111");
        assert!(!presence(&none.as_indexed_function(), &mut ExhaustiveOracle, &ledger).unwrap());
        assert_eq!(ledger.oracle_calls(), 2);

        let one = instance(&["1"], "1");
        assert!(presence(&one.as_indexed_function(), &mut ExhaustiveOracle, &ledger).unwrap());
    }

    #[test]
    fn single_on_running_instance() {
        let ledger = QueryLedger::new();
        let out = search_single(&running_instance(), ExhaustiveOracle, &ledger).unwrap();
        assert_eq!(out.position(), Some(2));
        assert_eq!(out.oracle_calls(), 3);
        let e = Some(Verdict::Even);
        let u = Some(Verdict::Uneven);
        assert_eq!(patterns(&out.trace, EventKind::PresenceCheck), [("+00".into(), u)]);
        assert_eq!(patterns(&out.trace, EventKind::Probe), [("++0".into(), e), ("+-+".into(), u)]);
        assert_eq!(patterns(&out.trace, EventKind::Decide), [("+-0".into(), None), ("+-+".into(), None)]);
        let emit = out.trace.events.last().unwrap();
        assert_eq!((emit.kind, emit.witness.as_deref()), (EventKind::Emit, Some("010")));
    }

    #[test]
    fn single_without_match() {
        for n in 1..=6 {
            let inst = gen_instance(n as u64, n, 8, &[]).unwrap();
            let out = search_single(&inst, ExhaustiveOracle, &QueryLedger::new()).unwrap();
            assert_eq!(out.position(), None);
            assert_eq!(out.oracle_calls(), 1);
            assert_eq!(out.trace.events.len(), 1);
        }
    }

    #[test]
    fn single_takes_leftmost() {
        let inst = instance(&["00", "11", "01", "11"], "11");
        let out = search_single(&inst, ExhaustiveOracle, &QueryLedger::new()).unwrap();
        assert_eq!(out.position(), Some(1));
        assert_eq!(out.oracle_calls(), 3);
    }

    #[test]
    fn multi_on_running_instance() {
        let out =
            search_multi(&running_instance(), ExhaustiveOracle, &QueryLedger::new(), SearchOptions::default()).unwrap();
        assert_eq!(out.positions, [2]);
        assert_eq!(out.oracle_calls(), 5);
    }

    #[test]
    fn multi_forks_on_two_matches() {
        let inst = instance(&["00", "11", "01", "11"], "11");
        let out = search_multi(&inst, ExhaustiveOracle, &QueryLedger::new(), SearchOptions::default()).unwrap();
        assert_eq!(out.positions, [1, 3]);
        assert_eq!(out.oracle_calls(), 7);
        assert_eq!(out.trace.count(EventKind::Recurse), 2);
        assert_eq!(out.trace.count(EventKind::Emit), 2);
        let probes: Vec<String> = patterns(&out.trace, EventKind::Probe).into_iter().map(|p| p.0).collect();
        assert_eq!(probes, ["++0", "+-0", "+++", "++-", "+-+", "+--"]);
    }

    #[test]
    fn multi_without_match() {
        let inst = instance(&["00", "10", "01"], "11");
        let out = search_multi(&inst, ExhaustiveOracle, &QueryLedger::new(), SearchOptions::default()).unwrap();
        assert!(out.positions.is_empty());
        assert_eq!(out.oracle_calls(), 1);
    }

    #[test]
    fn trace_shape() {
        let inst = gen_instance(3, 5, 8, &[1, 2, 17, 30]).unwrap();
        for out in [
            search_single(&inst, ExhaustiveOracle, &QueryLedger::new()).unwrap(),
            search_multi(&inst, ExhaustiveOracle, &QueryLedger::new(), SearchOptions::default()).unwrap(),
        ] {
            let t = &out.trace;
            assert_eq!(t.events[0].kind, EventKind::PresenceCheck);
            for (i, e) in t.events.iter().enumerate() {
                if e.kind == EventKind::Decide {
                    assert!(t.events[..i].iter().any(|p| p.kind == EventKind::Probe && p.j == e.j));
                }
                let p: RegisterPattern = e.pattern.parse().unwrap();
                assert!(p.is_fixed_prefix());
                if e.kind == EventKind::Decide {
                    assert_eq!(p.free_count(), t.n as usize - e.j);
                }
            }
            assert_eq!(SearchTrace::from_json(&t.to_json()).unwrap(), *t);
        }
    }

    #[test]
    fn adaptive_multi_agrees() {
        for seed in 0..40u64 {
            let plant: Vec<u64> = (0..64).filter(|p| (p * 31 + seed * 7) % 13 == 0).collect();
            let inst = gen_instance(seed, 6, 10, &plant).unwrap();
            let plain = search_multi(&inst, ExhaustiveOracle, &QueryLedger::new(), SearchOptions::default()).unwrap();
            let adaptive =
                search_multi(&inst, ExhaustiveOracle, &QueryLedger::new(), SearchOptions { adaptive: true }).unwrap();
            assert_eq!(plain.positions, plant);
            assert_eq!(adaptive.positions, plant);
            assert!(adaptive.oracle_calls() <= plain.oracle_calls());
        }
    }

    #[test]
    fn adaptive_single_match_costs_at_most_two_per_cell() {
        // Position 0b1111 is always on the right: one probe per cell.
        let inst = gen_instance(1, 4, 8, &[15]).unwrap();
        let out = search_multi(&inst, ExhaustiveOracle, &QueryLedger::new(), SearchOptions { adaptive: true }).unwrap();
        assert_eq!(out.positions, [15]);
        assert_eq!(out.oracle_calls(), 5);
    }

    /// An oracle that lies in the one direction it is allowed to.
    struct Forgetful {
        calls: usize,
    }

    impl EvennessOracle for Forgetful {
        fn name(&self) -> &str {
            "forgetful"
        }
        fn is_exact(&self) -> bool {
            false
        }
        fn detect(
            &mut self,
            f: &dyn IndexedFunction,
            pattern: &RegisterPattern,
            ledger: &QueryLedger,
        ) -> Result<Syndrome> {
            self.calls += 1;
            let truth = ExhaustiveOracle.detect(f, pattern, ledger)?;
            Ok(if self.calls % 3 == 0 { Syndrome::EVEN } else { truth })
        }
    }

    /// The same lie from an oracle claiming exactness.
    struct Liar;

    impl EvennessOracle for Liar {
        fn name(&self) -> &str {
            "liar"
        }
        fn is_exact(&self) -> bool {
            true
        }
        fn detect(
            &mut self,
            f: &dyn IndexedFunction,
            pattern: &RegisterPattern,
            ledger: &QueryLedger,
        ) -> Result<Syndrome> {
            let truth = ExhaustiveOracle.detect(f, pattern, ledger)?;
            Ok(if pattern.free_count() == 0 { Syndrome::EVEN } else { truth })
        }
    }

    #[test]
    fn inexact_misses_only_omit() {
        for seed in 0..30u64 {
            let plant: Vec<u64> = (0..32).filter(|p| (p + seed) % 7 == 0).collect();
            let inst = gen_instance(seed, 5, 8, &plant).unwrap();
            for adaptive in [false, true] {
                let out = search_multi(&inst, Forgetful { calls: 0 }, &QueryLedger::new(), SearchOptions { adaptive })
                    .unwrap();
                assert!(out.positions.iter().all(|p| plant.contains(p)));
            }
            let single = search_single(&inst, Forgetful { calls: 0 }, &QueryLedger::new()).unwrap();
            assert!(single.positions.iter().all(|p| plant.contains(p)));
        }
    }

    /// Claims every single point is uneven.
    struct Boastful;

    impl EvennessOracle for Boastful {
        fn name(&self) -> &str {
            "boastful"
        }
        fn is_exact(&self) -> bool {
            true
        }
        fn detect(
            &mut self,
            f: &dyn IndexedFunction,
            pattern: &RegisterPattern,
            ledger: &QueryLedger,
        ) -> Result<Syndrome> {
            let truth = ExhaustiveOracle.detect(f, pattern, ledger)?;
            Ok(if pattern.free_count() == 0 { Syndrome::uneven(None) } else { truth })
        }
    }

    #[test]
    fn lying_exact_oracle_is_a_contract_violation() {
        let inst = instance(&["00", "11", "01", "11"], "11");
        let err = search_multi(&inst, Liar, &QueryLedger::new(), SearchOptions::default());
        assert!(matches!(err, Err(Error::Contract(_))));
        let err = search_single(&inst, Boastful, &QueryLedger::new());
        assert!(matches!(err, Err(Error::Contract(_))));
    }

    #[test]
    fn sampled_search_records_seed() {
        let inst = gen_instance(4, 4, 8, &[6]).unwrap();
        let out =
            search_multi(&inst, SampledOracle::new(256, 99).unwrap(), &QueryLedger::new(), SearchOptions::default())
                .unwrap();
        assert_eq!(out.trace.seed, Some(99));
        assert_eq!(out.positions, [6]);
        assert_eq!(out.trace.ledger.shots, 256 * out.oracle_calls());
    }

    #[test]
    fn degenerate_single_item_list() {
        let inst = instance(&["1"], "1");
        assert_eq!(inst.magnitude_bits(), 1);
        let out = search_single(&inst, ExhaustiveOracle, &QueryLedger::new()).unwrap();
        assert_eq!((out.position(), out.oracle_calls()), (Some(0), 2));
        let out = search_multi(&inst, ExhaustiveOracle, &QueryLedger::new(), SearchOptions::default()).unwrap();
        assert_eq!(out.positions, [0]);
    }

    #[test]
    fn works_over_arbitrary_functions() {
        let f = TruthTable::from_fn(3, |x| !x.sign() && matches!(x.magnitude_position(), 2 | 5)).unwrap();
        let out = search_multi_fn(&f, ExhaustiveOracle, &QueryLedger::new(), SearchOptions::default()).unwrap();
        assert_eq!(out.positions, [2, 5]);
        let out = search_single_fn(&f, ExhaustiveOracle, &QueryLedger::new()).unwrap();
        assert_eq!(out.positions, [2]);
    }

    #[test]
    fn stats_shared_prefix() {
        assert_eq!(SearchStats::new(&[1, 3], 2, 7).shared_prefix, Some(0));
        assert_eq!(SearchStats::new(&[0b1010, 0b1011], 4, 0).shared_prefix, Some(3));
        assert_eq!(SearchStats::new(&[0b0010, 0b0110], 4, 0).shared_prefix, Some(1));
        assert_eq!(SearchStats::new(&[2], 4, 0).shared_prefix, None);
        assert_eq!(SearchStats::new(&[], 4, 1).match_count, 0);
    }
}
