//! Measurement workbench for coreference resolution and event plausibility.
//!
//! The crate is organized around file-in/file-out evaluation tasks:
//!
//! - [`corpus`]: parsers and serializers for the supported input formats
//!   (CoNLL coreference columns, CoNLL-U dependency trees, JSON-lines
//!   documents, TSV triple counts, concept hierarchies, score grids).
//! - [`metrics`]: the MUC, B-cubed and entity-CEAF coreference scores plus
//!   their combined summary report.
//! - [`typing`]: rule-based classification of mentions into contested
//!   coreference constructions (nested, generic, compound, copular).
//! - [`disagg`]: disaggregated (per-type) scoring, generalization gaps and
//!   paired permutation testing.
//! - [`pcr`]: a pronominal coreference benchmark: instance extraction from
//!   annotated documents, accuracy scoring, ensembling and prompt rendering.
//! - [`plaus`]: classical event-plausibility models over subject-verb-object
//!   counts (n-gram, PMI, selectional association, role-conditioned,
//!   exemplar) and pseudo-disambiguation pair generation.
//! - [`consistency`]: plausibility-consistency diagnostics along hypernym
//!   chains (concavity deviation, local extrema rate, prefix-max transforms)
//!   and AUC over labeled events.
//!
//! Everything that draws randomness takes an explicit seed and derives
//! per-item substreams (see [`seeding`]), so results are reproducible
//! byte-for-byte and invariant to worker-thread count.

pub mod consistency;
pub mod corpus;
pub mod disagg;
pub mod metrics;
pub mod pcr;
pub mod plaus;
pub mod seeding;
pub mod typing;
