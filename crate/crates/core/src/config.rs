//! Pipeline configuration and named presets.

use serde::{Deserialize, Serialize};

/// All tunables of the detection pipeline in one place.
///
/// Defaults match the published settings: ξ = 0.1, p = 0.15, ρ = 0.004,
/// π = 0.4, θ = 1.0, ω = 1:1:1. φ has no published value; 1.0 means an
/// account must follow at least as many users as follow it back before it
/// can participate in the follow-ratio relation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// Similarity threshold shared by the three edge rules.
    pub xi: f64,
    /// Follow-ratio floor: both endpoints need ff > phi for a relation-3 edge.
    pub phi: f64,
    /// Scale ratio for parallel merge operators per round.
    pub p: f64,
    /// Stop threshold for the stationary-distribution iteration.
    pub rho: f64,
    /// Weight of the cohesion term in the community evaluation score.
    pub pi: f64,
    /// Communities with evaluation score strictly above theta are bots.
    pub theta: f64,
    /// Per-relation weights applied when aggregating degrees and volumes.
    pub omega: [f64; 3],
    /// RNG seed for synthetic-corpus generation.
    pub seed: Option<u64>,
    /// Use edge weights instead of the binary indicator when tensorizing.
    pub weighted_tensor: bool,
    /// Iteration cap for the power iteration.
    pub max_iterations: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            xi: 0.1,
            phi: 1.0,
            p: 0.15,
            rho: 0.004,
            pi: 0.4,
            theta: 1.0,
            omega: [1.0, 1.0, 1.0],
            seed: None,
            weighted_tensor: false,
            max_iterations: 10_000,
        }
    }
}

/// Dataset-flavored overrides shipped as named presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Sparse spam-account corpora: ξ = 0.01, p = 0.05, θ = 0.60.
    Pronbots,
    /// Self-declared bot corpora: π = 0.6, θ = 0.55.
    Botwiki,
}

impl Preset {
    pub fn apply(self, cfg: &mut PipelineConfig) {
        match self {
            Preset::Pronbots => {
                cfg.xi = 0.01;
                cfg.p = 0.05;
                cfg.theta = 0.60;
            }
            Preset::Botwiki => {
                cfg.pi = 0.6;
                cfg.theta = 0.55;
            }
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pronbots" => Ok(Preset::Pronbots),
            "botwiki" => Ok(Preset::Botwiki),
            other => Err(format!("unknown preset: {other}")),
        }
    }
}
