//! Exact simulation and privacy analysis of two-party communication protocols,
//! classical and quantum.
//!
//! The crate is organized around a few core ideas:
//!
//! - [`qstate`]: dense complex linear algebra for pure states, density matrices,
//!   channels and measurements over arbitrary (not only qubit) subsystem splits.
//! - [`infotheory`]: Shannon/von Neumann entropies, classical-quantum states kept
//!   in block form, conditional mutual information, and the continuity and
//!   encoding bounds used by the privacy analysis.
//! - [`model`]: protocol representations (communication matrices, deterministic
//!   message trees, seed mixtures, quantum round protocols) and exact execution
//!   engines for them.
//! - [`privacy`]: privacy loss in bits (conditional mutual information of a
//!   player's view against the other input), worst-case and expected leakage in
//!   trace norm, and the bounds tying the two together.
//! - [`structure`]: the combinatorial characterization of privately computable
//!   functions (forbidden submatrices, equivalence-class decomposition, protocol
//!   synthesis, protocol-tree extraction).
//! - [`protocols`]: concrete protocol constructions operating at specific
//!   privacy/leakage trade-off points, with exact evaluators for their headline
//!   figures.
//! - [`oracle`]: independent brute-force baselines (rectangle bounds, exhaustive
//!   privacy recomputation) used to cross-validate the analytic paths.

pub mod tol;

pub mod qstate;

pub mod infotheory;
pub mod model;
pub mod oracle;
pub mod privacy;
pub mod protocols;
pub mod structure;

pub mod random;

mod error;

pub use error::{Error, Result};
