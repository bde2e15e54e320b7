//! Exact analysis of storage allocations in a distributed store where each
//! node is read independently with probability `p`.
//!
//! A data object of unit size is coded and spread over `n` nodes with a total
//! budget `T`; recovery succeeds when the nodes that were read hold at least
//! one unit between them. The crate evaluates recovery probabilities for
//! arbitrary and symmetric allocations, searches for the best symmetric
//! allocation, classifies `(p, T)` pairs by which spreading policy is provably
//! optimal, and computes suboptimality certificates for maximal spreading.
//!
//! Probability-valued routines are generic over [`Scalar`]. [`Rational`]
//! (arbitrary precision) is the reference type and the one every decision is
//! made in; `f64` and `f32` are available for fast approximate evaluation.

pub mod allocation;
pub mod binomial;
pub mod bounds;
mod error;
pub mod oracle;
pub mod rational;
pub mod scalar;
pub mod symmetric;

pub use allocation::{
    expand_symmetric, recovery_probability_dp, recovery_probability_enum, symmetric_recovery_probability, Allocation,
    ProblemInstance, SymmetricSpec,
};
pub use binomial::{binomial_coefficient, binomial_pmf, binomial_tail_ge, BinomialSpec};
pub use bounds::{bounds_report, chernoff_envelope, lemma1_upper_bound, markov_cap, theorem1_gap, BoundsReport};
pub use error::{Error, Result};
pub use oracle::{brute_force_best, monte_carlo_estimate, MonteCarloEstimate, QuantizedSearchResult};
pub use rational::{parse_rational, Rational};
pub use scalar::Scalar;
pub use symmetric::{
    candidate_ms, classify_region, condition_lemma2, condition_lemma3, condition_lemma4, condition_theorem2,
    condition_theorem3, delta_closed_form, delta_direct, exhaustive_symmetric, optimal_symmetric, CandidateReport,
    DeltaValue, RegionClass, Verdict,
};

/// Candidate report with exact probabilities.
pub type ExactCandidateReport = CandidateReport<Rational>;
/// Candidate report evaluated in double precision.
pub type FloatCandidateReport = CandidateReport<f64>;
/// Bounds report with exact probabilities.
pub type ExactBoundsReport = BoundsReport<Rational>;
/// Difference value evaluated in double precision.
pub type FloatDeltaValue = DeltaValue<f64>;
/// Difference value with an exact payload.
pub type ExactDeltaValue = DeltaValue<Rational>;
