//! Centralized numeric tolerances.
//!
//! Every tolerance used for validation or testing lives here so that the
//! trade-offs are visible in one place and individual modules cannot drift
//! apart. Values are split by purpose, not by module: construction-time
//! validation is strict (1e-9), derived-quantity assertions allow one extra
//! digit of accumulated error (1e-8), and information quantities computed
//! through eigendecompositions get 1e-7.

/// Construction-time validation: norms, unitarity, Kraus completeness,
/// trace-one and Hermiticity checks, probability normalization.
pub const VALIDATION: f64 = 1e-9;

/// Derived-quantity comparisons in property suites (distances, overlaps,
/// entropies recomputed along an independent route).
pub const PROPERTY: f64 = 1e-8;

/// Information quantities (entropies, conditional mutual information).
/// Conditional mutual information more negative than -INFO is reported as a
/// numerical failure; values in [-INFO, 0) are clamped to 0.
pub const INFO: f64 = 1e-7;

/// Measurement branches below this probability are pruned during execution.
pub const PRUNE: f64 = 1e-12;

/// Message states closer than this in trace distance are grouped as equal
/// when a protocol tree is extracted from a quantum protocol.
pub const MESSAGE_EQ: f64 = 1e-7;

/// Non-orthogonalized message families must keep every pairwise inner
/// product above this magnitude.
pub const NONORTH_MIN: f64 = 1e-10;

/// Eigenvalues of density matrices are clamped into [0,1] after
/// decomposition; a violation beyond VALIDATION before clamping is an error.
pub const EIGENVALUE_SLACK: f64 = 1e-9;

/// Default cap on the number of amplitudes a single register group may hold
/// (2^22). Exceeding it is a resource error, not a silent approximation.
pub const DEFAULT_DIM_BUDGET: usize = 1 << 22;

/// Default cap on live branches during quantum protocol execution.
pub const DEFAULT_BRANCH_BUDGET: usize = 1 << 22;
