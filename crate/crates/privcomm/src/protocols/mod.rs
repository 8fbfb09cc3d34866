//! Concrete protocol constructions at specific privacy/leakage trade-off
//! points.
//!
//! Each construction comes in two layers: a builder producing an executable
//! protocol object for the exact engines, and an analysis path computing the
//! headline figures (error, per-round leakage, communication) from closed
//! forms that stay tractable far beyond engine-simulable sizes. Tests tie the
//! two layers together on small instances.

mod and_gate;
mod disjoint;
mod idmin;
mod nonorth;

pub use and_gate::{and_analysis, and_protocol, and_protocol_with_rounds, and_round_count, AndAnalysis};
pub use disjoint::{
    disjointness_analysis, disjointness_matrix, disjointness_protocol, disjointness_stage_plan,
    disjointness_transcript_loss, Cut, DisjointnessAnalysis, GroverStagePlan,
};
pub use idmin::{
    adapted_query_schedule, idmin_leaky_adapted, idmin_leaky_uniform, idmin_matrix, idmin_private,
    uniform_query_schedule, LevelKind, LevelPlan, QuerySchedule,
};
pub use nonorth::nonorthogonalize;
