//! Exact analysis of measurement behaviors on hypergraphs.
//!
//! A *behavior* assigns an outcome distribution to every context (hyperedge)
//! of a scenario hypergraph. This crate decides membership in the
//! non-contextual polytope with exact rational arithmetic, computes the
//! minimum number of non-contextual behaviors needed to simulate a behavior
//! context-by-context (and its base-2 logarithm), evaluates comparison
//! measures, generates standard behavior families, and runs a finite
//! automaton whose memory states are non-contextual behaviors.
//!
//! Probabilities are arbitrary-precision rationals end to end: polytope
//! membership and marginal-consistency questions are exact yes/no decisions,
//! so no tolerance appears anywhere in the decision path. The only floating
//! point computation is the relative-entropy measure, which reports its own
//! duality-gap bound.

pub mod automaton;
pub mod behavior;
pub mod constructions;
pub mod graph;
pub mod hypergraph;
pub mod json;
pub mod lp;
pub mod mask;
pub mod measures;
pub mod oracle;
pub mod rank;
pub mod rational;

/// The scalar used for all probability bookkeeping. Arbitrary precision,
/// always in lowest terms, denominator positive.
pub type Rational = num_rational::BigRational;

pub use behavior::{Behavior, ValidationReport};
pub use hypergraph::Hypergraph;
pub use mask::ContextMask;
pub use oracle::{DeterministicAssignment, FeasibilityResult, Limits, NcWitness};
pub use rank::RankResult;

/// Crate-wide error type. Messages name the violated invariant; the CLI maps
/// cap breaches and input failures onto distinct exit codes.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Malformed domain objects: missing tables, unknown identifiers, bad
    /// outcome arity, unparsable input.
    #[error("structural error: {0}")]
    Structure(String),
    /// An exact marginal or merge disagreed where the consistency condition
    /// requires equality.
    #[error("consistency violation: {0}")]
    Consistency(String),
    /// Alphabet or input/output shape mismatch between operands.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// The operation needs structure the argument does not carry
    /// (factorization, graph scenario, permutation-supported tables).
    #[error("unsupported structure: {0}")]
    Unsupported(String),
    /// A numeric argument is outside its documented domain.
    #[error("range error: {0}")]
    Range(String),
    /// The deterministic-assignment space exceeds the configured cap.
    #[error("assignment cap exceeded: {product} global assignments > cap {cap}")]
    AssignmentCap { product: u128, cap: u64 },
    /// A combinatorial size cap was hit (context count, edge count, vertex
    /// count for exact search).
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    /// A requested target is provably unachievable (e.g. fewer forests than
    /// the arboricity).
    #[error("infeasible request: {0}")]
    Infeasible(String),
    /// The behavior failed validation where a validated input is required.
    #[error("validation failed: {0}")]
    Validation(String),
}

impl Error {
    /// True for resource-cap errors (CLI exit code 3); other errors are
    /// input/validation failures (exit code 2).
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::AssignmentCap { .. } | Error::SizeCap(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
