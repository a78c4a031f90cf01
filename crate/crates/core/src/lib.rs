//! Freiman isomorphisms relative to polynomial systems: condensing and
//! densifying integer sets while preserving their solution structure.

pub mod algnum;
pub mod condense;
pub mod counting;
pub mod densify;
pub mod error;
pub mod intset;
pub mod limits;
pub mod meanvalue;
pub mod numeric;
pub mod poly;
pub mod primes;
pub mod solutions;
pub mod verify;

pub use algnum::{AlgNum, AlgSet};
pub use condense::{CondenseMode, CondenseStep, CondenseTrace, StepOutcome, StopReason};
pub use densify::{DensifyRun, DensifyStep, VerifyLevel};
pub use error::{Error, Result};
pub use intset::{measures, IntSet, Measures};
pub use limits::Limits;
pub use meanvalue::MomentVector;
pub use poly::{PolySystem, Polynomial, Term};
pub use solutions::{build_hypergraph, solution_set, SolutionHypergraph, SolutionSet};
pub use verify::{
    hypergraph_isomorphic, induced_map, is_freiman_iso, is_tfold_freiman_iso, Counterexample, Direction, MapKind,
    MapTable, SliceCounterexample, Verdict,
};
