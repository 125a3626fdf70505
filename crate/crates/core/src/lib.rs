//! Deterministic identifiability of low-dimensional subspaces from their
//! coordinate projections.
//!
//! An `r`-dimensional subspace of `R^d` is observed only through its
//! restrictions to subsets of coordinates, recorded as the columns of a
//! binary sampling pattern. The subspace is pinned down (for almost every
//! subspace) exactly when every set of `n` columns touches at least `n + r`
//! rows. This crate checks that condition, recovers the subspace when it
//! holds, and uses the same machinery to certify low-rank matrix
//! completions against held-out data.
//!
//! * [`pattern`]: sampling patterns, the expansion condition, splitting
//!   wide columns, random patterns.
//! * [`graph`]: the bipartite row/column graph, matchings, row connectivity.
//! * [`identify`]: recovery from projections.
//! * [`completion`]: fitting, completion conditions, validation certificates.
//! * [`experiments`]: Monte-Carlo success rates.
//! * [`cli`]: the `subident` command-line tool.
//!
//! Indices are 0-based in the library and 1-based in files written for
//! people (CLI output, edge lists).

pub mod cli;
pub mod completion;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod identify;
pub mod linalg;
pub mod mask;
pub mod pattern;
pub mod rng;
mod textio;

pub use completion::{Candidate, ObservedMatrix, ValidationCertificate, Verdict};
pub use error::{Error, Result};
pub use graph::BipartiteGraph;
pub use identify::{ObservationSet, ProjectionObservation, RecoveryResult, RecoveryStatus};
pub use linalg::{Matrix, Subspace, Tolerances};
pub use mask::Mask;
pub use pattern::{ConditionVerdict, SamplingPattern};
