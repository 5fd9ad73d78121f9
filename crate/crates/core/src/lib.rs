//! Unstructured search driven entirely by evenness queries.
//!
//! A list search `find i with f2(L[i]) = z` is lifted to a predicate over
//! signed-magnitude indices that vanishes on every negative index. Such a
//! predicate is even on a domain exactly when the domain holds no match, so
//! repeatedly bisecting the positive half and asking "is it even here?"
//! recovers the matching positions one bit at a time.
//!
//! The crate is organised bottom-up:
//!
//! - [`index`]: fixed-width bit strings and signed-magnitude indices.
//! - [`criteria`]: item lists, the `f2` family, and the match predicates.
//! - [`register`]: Plus/Minus/Free control patterns and the domains they select.
//! - [`oracle`]: the evenness oracle contract, the exhaustive oracle, and query accounting.
//! - [`qsim`]: a state-vector instantiation of the oracle with one-sided sampling error.
//! - [`search`]: the single- and multi-item search drivers and their traces.

pub mod criteria;
pub mod error;
pub mod index;
pub mod oracle;
pub mod qsim;
pub mod register;
pub mod search;

pub use criteria::{
    gen_instance, gen_instance_with, F2Kind, IndexedFunction, Instance, ItemList, SearchSpec, SignExtended, TruthTable,
};
pub use error::{Error, Result};
pub use index::{BitString, SignedIndex};
pub use oracle::{EvennessOracle, ExhaustiveOracle, LedgerSnapshot, QueryLedger, Syndrome, Verdict};
pub use qsim::{sample_even_or_not, violation_probability, PreparedState, SampledOracle, ViolationProfile};
pub use register::{Cell, RegisterPattern};
pub use search::{
    linear_scan, presence, search_multi, search_multi_fn, search_single, search_single_fn, Algo, EventKind,
    SearchOptions, SearchOutcome, SearchStats, SearchTrace, TraceEvent,
};
