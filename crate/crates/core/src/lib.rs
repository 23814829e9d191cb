//! Exact integer/rational arithmetic for the gluing coefficients of
//! index-zero branched covers of cylinders.
//!
//! The library computes one family of integers three independent ways and
//! insists they agree:
//!
//! * a memoized subset recursion ([`coefficients::f_theta`]),
//! * a weighted sum over admissible oriented trees
//!   ([`coefficients::f_theta_via_trees`]),
//! * a signed sum of exact rational determinants
//!   ([`cokernel_combinatorics::f_via_determinants`]).
//!
//! Everything is driven by a guarded rational angle [`theta_core::Theta`]:
//! a reduced fraction whose denominator exceeds every multiplicity in play,
//! so that `⌈mθ⌉` and `⌊mθ⌋` behave exactly as they would for an irrational
//! angle. All coefficient values are arbitrary-precision integers; matrix
//! work is exact rational. No floating point anywhere.

pub mod coefficients;
pub mod cokernel_combinatorics;
pub mod partitions;
pub mod theta_core;
pub mod trees;

/// Errors shared across the library. Guard violations are always hard
/// errors: a resonant angle silently breaks `⌈mθ⌉ − ⌊mθ⌋ = 1` and with it
/// every identity downstream.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("guard violation: multiplicity {m} exceeds certified bound {guard} for {theta}")]
    GuardViolation { theta: String, m: u64, guard: u64 },
    #[error("sum condition failed: positive side totals {plus}, negative side totals {minus}")]
    SumMismatch { plus: u64, minus: u64 },
    #[error("enumeration cap exceeded while {what} (cap {cap})")]
    CapExceeded { what: &'static str, cap: usize },
    #[error("tree is not admissible: {0}")]
    NotAdmissible(&'static str),
    #[error("end-set family is invalid: {0}")]
    InvalidFamily(&'static str),
    #[error("not supported: {0}")]
    NotSupported(&'static str),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
