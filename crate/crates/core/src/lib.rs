//! Unsupervised social-bot detection.
//!
//! The pipeline builds a three-relation behavioral-similarity graph over user
//! accounts (posting-type distribution, posting influence, follow-to-follower
//! ratio), partitions it into communities by minimizing two-dimensional
//! structural entropy, co-ranks users and relations with a tensor power
//! iteration, and labels each community bot or human from its influence and
//! cohesion scores.

pub mod config;
pub mod entropy;
pub mod eval;
pub mod graph;
pub mod ingest;
pub mod label;
pub mod multirank;
pub mod pipeline;
pub mod synth;

pub use config::{PipelineConfig, Preset};
pub use entropy::EncodingTree;
pub use graph::{GraphConfig, MultiRelationalGraph};
pub use ingest::{BehaviorFeatures, TruthLabel, UserRecord};
pub use label::{CommunityVerdict, Label};
pub use multirank::StationaryDistribution;
pub use pipeline::{run_detect, DetectionReport};
