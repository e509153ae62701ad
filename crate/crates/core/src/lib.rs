//! Near-minimal-genus embeddings of random bipartite graphs.
//!
//! The construction pipeline orients every edge at random, matches
//! arc-disjoint closed trails of length `2i + 2` in the orientation and in
//! its reverse, strips trails that form blossoms, and glues the survivors
//! into a rotation system whose genus is an upper bound. Euler-formula
//! bounds give the matching lower bound, and an exhaustive rotation-system
//! search provides ground truth on small graphs.
//!
//! Modules:
//!
//! - [`bigraph`]: graphs, digraphs, random and standard bipartite graphs.
//! - [`embedding`]: rotation systems, face tracing and embedding genus.
//! - [`trails`]: closed-trail enumeration, trail hypergraphs and matchings.
//! - [`blossom`]: blossom detection, removal and rotation assembly.
//! - [`estimator`]: the end-to-end pipeline, bounds and theory predictors.
//! - [`oracle`]: exact genus by exhaustive search plus hill climbing.

pub mod bigraph;
pub mod blossom;
pub mod embedding;
pub mod error;
pub mod estimator;
pub mod oracle;
pub mod trails;

pub use bigraph::{BipartiteGraph, Dart, Digraph, GenParams, Graph};
pub use embedding::{FaceSet, RotationSystem};
pub use error::{Error, Result};
pub use estimator::{EstimateConfig, GenusEstimate};
