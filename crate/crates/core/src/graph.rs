//! Construction of the weighted three-relation similarity graph.
//!
//! Relation 1 links users with similar posting-type distributions, relation 2
//! users with similar posting influence, relation 3 users with similar
//! follow-to-follower ratios. Every pair of users is scanned once; the
//! O(N²) enumeration is the intended construction, not a shortcut target.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const NUM_RELATIONS: usize = 3;

/// Undirected weighted edge, stored once with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub i: u32,
    pub j: u32,
    pub w: f64,
}

/// N vertices with three independent sparse edge sets and per-relation
/// weights ω used when aggregating degrees, volumes, and cuts.
#[derive(Debug, Clone)]
pub struct MultiRelationalGraph {
    pub n: usize,
    pub edges: [Vec<Edge>; NUM_RELATIONS],
    pub omega: [f64; NUM_RELATIONS],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphConfig {
    /// Similarity threshold shared by the three relations.
    pub xi: f64,
    /// Per-relation override of xi; `None` entries fall back to `xi`.
    pub xi_per_relation: [Option<f64>; NUM_RELATIONS],
    /// Follow-ratio floor for relation 3.
    pub phi: f64,
    pub omega: [f64; NUM_RELATIONS],
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig {
            xi: 0.1,
            xi_per_relation: [None; NUM_RELATIONS],
            phi: 1.0,
            omega: [1.0, 1.0, 1.0],
        }
    }
}

impl GraphConfig {
    fn xi_for(&self, relation: usize) -> f64 {
        self.xi_per_relation[relation].unwrap_or(self.xi)
    }
}

/// Similarity of two posting-type distributions under the Manhattan distance.
/// Returns `1 - d` when the distance d is below xi, otherwise no edge.
pub fn posting_type_weight(pt_i: &[f64; 3], pt_j: &[f64; 3], xi: f64) -> Option<f64> {
    let d: f64 = pt_i.iter().zip(pt_j).map(|(a, b)| (a - b).abs()).sum();
    (d < xi).then_some(1.0 - d)
}

/// Similarity of posting influence via the deviation ratio
/// `|inf_i - inf_j| / max(inf_i, inf_j)`. Two users with zero influence are
/// identical by convention (the ratio is 0/0 there).
pub fn influence_weight(inf_i: f64, inf_j: f64, xi: f64) -> Option<f64> {
    let max = inf_i.max(inf_j);
    let delta = if max == 0.0 {
        0.0
    } else {
        (inf_i - inf_j).abs() / max
    };
    (delta < xi).then_some(1.0 - delta)
}

/// Similarity of follow-to-follower ratios; both ratios must clear the
/// floor phi before an edge is considered.
pub fn ff_weight(ff_i: f64, ff_j: f64, xi: f64, phi: f64) -> Option<f64> {
    if ff_i <= phi || ff_j <= phi {
        return None;
    }
    let delta = (ff_i - ff_j).abs() / ff_i.max(ff_j);
    (delta < xi).then_some(1.0 - delta)
}

use crate::ingest::BehaviorFeatures;

/// Evaluates all three weight rules for every unordered pair of users.
pub fn build_graph(features: &[BehaviorFeatures], cfg: &GraphConfig) -> MultiRelationalGraph {
    let n = features.len();
    let xi = [cfg.xi_for(0), cfg.xi_for(1), cfg.xi_for(2)];

    // Per-source rows are independent; compute them in parallel and
    // concatenate in i order so the result is thread-count independent.
    let rows: Vec<[Vec<Edge>; NUM_RELATIONS]> = (0..n as u32)
        .into_par_iter()
        .map(|i| {
            let fi = &features[i as usize];
            let mut row: [Vec<Edge>; NUM_RELATIONS] = Default::default();
            for j in (i + 1)..n as u32 {
                let fj = &features[j as usize];
                if let Some(w) = posting_type_weight(&fi.pt, &fj.pt, xi[0]) {
                    row[0].push(Edge { i, j, w });
                }
                if let Some(w) = influence_weight(fi.inf, fj.inf, xi[1]) {
                    row[1].push(Edge { i, j, w });
                }
                if let Some(w) = ff_weight(fi.ff, fj.ff, xi[2], cfg.phi) {
                    row[2].push(Edge { i, j, w });
                }
            }
            row
        })
        .collect();

    let mut edges: [Vec<Edge>; NUM_RELATIONS] = Default::default();
    for row in rows {
        for (k, mut bucket) in row.into_iter().enumerate() {
            edges[k].append(&mut bucket);
        }
    }
    MultiRelationalGraph {
        n,
        edges,
        omega: cfg.omega,
    }
}

impl MultiRelationalGraph {
    /// Tab-separated "i j k w" edge list, relations numbered from 1,
    /// weights printed at 9 significant digits.
    pub fn write_edge_list(&self, out: &mut impl std::io::Write) -> std::io::Result<()> {
        for (k, edges) in self.edges.iter().enumerate() {
            for e in edges {
                writeln!(out, "{}\t{}\t{}\t{:.9}", e.i, e.j, k + 1, e.w)?;
            }
        }
        Ok(())
    }

    pub fn edge_count(&self) -> usize {
        self.edges.iter().map(Vec::len).sum()
    }
}
