//! Structural entropy of the multi-relational graph and its greedy
//! minimization via parallel merge operators.
//!
//! The encoding tree here is always two-level: a root, one node per
//! community, and the user vertices as leaves. Minimizing the structural
//! entropy of that tree yields the community partition.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::graph::MultiRelationalGraph;

#[derive(Debug, Error)]
pub enum EntropyError {
    #[error("empty graph: total volume is zero")]
    EmptyGraph,
    #[error("encoding tree covers {tree} vertices but the graph has {graph}")]
    VertexMismatch { tree: usize, graph: usize },
    #[error("inconsistent merge statistics: {0}")]
    InconsistentStats(String),
}

/// One community of the two-level encoding tree with cached statistics.
///
/// `vol` is the sum of aggregated member degrees, `cut` the aggregated
/// weight of edges leaving the community, `sum_dlogd` the cached
/// Σ d_i·log2(d_i) over members that makes the merge delta O(1).
#[derive(Debug, Clone, Serialize)]
pub struct CommunityNode {
    pub members: Vec<u32>,
    pub vol: f64,
    pub cut: f64,
    pub sum_dlogd: f64,
}

/// Two-level partition of the graph's vertices.
#[derive(Debug, Clone, Serialize)]
pub struct EncodingTree {
    pub communities: Vec<CommunityNode>,
    /// Community id of each vertex.
    pub leaf_of: Vec<u32>,
}

/// Aggregated degree of every vertex: d_i = Σ_k ω_k · (incident relation-k weights).
pub fn aggregated_degrees(g: &MultiRelationalGraph) -> Vec<f64> {
    let mut d = vec![0.0; g.n];
    for (k, edges) in g.edges.iter().enumerate() {
        let omega = g.omega[k];
        for e in edges {
            d[e.i as usize] += omega * e.w;
            d[e.j as usize] += omega * e.w;
        }
    }
    d
}

fn xlog2x_over(d: f64, denom: f64) -> f64 {
    // 0·log 0 = 0 convention.
    if d <= 0.0 {
        0.0
    } else {
        d * (d / denom).log2()
    }
}

/// One-dimensional structural entropy in bits: the uncertainty of the graph
/// without any layering.
pub fn one_dim_entropy(g: &MultiRelationalGraph) -> Result<f64, EntropyError> {
    let degrees = aggregated_degrees(g);
    let vol: f64 = degrees.iter().sum();
    if vol <= 0.0 {
        return Err(EntropyError::EmptyGraph);
    }
    Ok(-degrees.iter().map(|&d| xlog2x_over(d, vol)).sum::<f64>() / vol)
}

/// Entropy contribution of one community given its cached statistics.
fn community_entropy(vol: f64, cut: f64, sum_dlogd: f64, vol_g: f64) -> f64 {
    if vol <= 0.0 {
        return 0.0;
    }
    let root_term = -(cut / vol_g) * (vol / vol_g).log2();
    let leaf_term = -(sum_dlogd - vol * vol.log2()) / vol_g;
    root_term + leaf_term
}

impl EncodingTree {
    /// Builds a tree from an explicit partition, computing all statistics
    /// from scratch.
    pub fn from_partition(
        g: &MultiRelationalGraph,
        partition: &[Vec<u32>],
    ) -> Result<Self, EntropyError> {
        let covered: usize = partition.iter().map(Vec::len).sum();
        if covered != g.n {
            return Err(EntropyError::VertexMismatch {
                tree: covered,
                graph: g.n,
            });
        }
        let mut leaf_of = vec![u32::MAX; g.n];
        for (cid, members) in partition.iter().enumerate() {
            for &v in members {
                leaf_of[v as usize] = cid as u32;
            }
        }
        if leaf_of.contains(&u32::MAX) {
            return Err(EntropyError::VertexMismatch {
                tree: covered,
                graph: g.n,
            });
        }
        let degrees = aggregated_degrees(g);
        let mut communities: Vec<CommunityNode> = partition
            .iter()
            .map(|members| CommunityNode {
                members: members.clone(),
                vol: members.iter().map(|&v| degrees[v as usize]).sum(),
                cut: 0.0,
                sum_dlogd: members
                    .iter()
                    .map(|&v| {
                        let d = degrees[v as usize];
                        if d > 0.0 {
                            d * d.log2()
                        } else {
                            0.0
                        }
                    })
                    .sum(),
            })
            .collect();
        for (k, edges) in g.edges.iter().enumerate() {
            let omega = g.omega[k];
            for e in edges {
                let (ca, cb) = (leaf_of[e.i as usize], leaf_of[e.j as usize]);
                if ca != cb {
                    communities[ca as usize].cut += omega * e.w;
                    communities[cb as usize].cut += omega * e.w;
                }
            }
        }
        Ok(EncodingTree {
            communities,
            leaf_of,
        })
    }

    /// Singleton partition: every vertex its own community.
    pub fn singletons(g: &MultiRelationalGraph) -> Self {
        let partition: Vec<Vec<u32>> = (0..g.n as u32).map(|v| vec![v]).collect();
        EncodingTree::from_partition(g, &partition).expect("singleton partition always covers")
    }

    pub fn num_communities(&self) -> usize {
        self.communities.len()
    }

    /// JSON dump with per-community members, volume, cut, and entropy term.
    pub fn write_json(
        &self,
        g: &MultiRelationalGraph,
        out: &mut impl std::io::Write,
    ) -> std::io::Result<()> {
        #[derive(Serialize)]
        struct CommunityDump<'a> {
            id: usize,
            members: &'a [u32],
            vol: f64,
            cut: f64,
            entropy: f64,
        }
        #[derive(Serialize)]
        struct TreeDump<'a> {
            communities: Vec<CommunityDump<'a>>,
        }
        let vol_g: f64 = aggregated_degrees(g).iter().sum();
        let dump = TreeDump {
            communities: self
                .communities
                .iter()
                .enumerate()
                .map(|(id, c)| CommunityDump {
                    id,
                    members: &c.members,
                    vol: c.vol,
                    cut: c.cut,
                    entropy: if vol_g > 0.0 {
                        community_entropy(c.vol, c.cut, c.sum_dlogd, vol_g)
                    } else {
                        0.0
                    },
                })
                .collect(),
        };
        serde_json::to_writer_pretty(&mut *out, &dump)?;
        out.write_all(b"\n")
    }
}

/// Structural entropy of the graph under a two-level encoding tree, in bits.
pub fn structural_entropy(t: &EncodingTree, g: &MultiRelationalGraph) -> Result<f64, EntropyError> {
    if t.leaf_of.len() != g.n {
        return Err(EntropyError::VertexMismatch {
            tree: t.leaf_of.len(),
            graph: g.n,
        });
    }
    let vol_g: f64 = aggregated_degrees(g).iter().sum();
    if vol_g <= 0.0 {
        return Err(EntropyError::EmptyGraph);
    }
    Ok(t.communities
        .iter()
        .map(|c| community_entropy(c.vol, c.cut, c.sum_dlogd, vol_g))
        .sum())
}

/// Entropy change of merging communities a and b, computed in O(1) from
/// their cached statistics. `cross` is the aggregated weight of edges
/// between them. The merge is admissible when the result is ≤ 0.
pub fn merge_delta(
    a: &CommunityNode,
    b: &CommunityNode,
    cross: f64,
    vol_g: f64,
) -> Result<f64, EntropyError> {
    if cross < 0.0 {
        return Err(EntropyError::InconsistentStats(format!(
            "negative cross weight {cross}"
        )));
    }
    if vol_g <= 0.0 {
        return Err(EntropyError::EmptyGraph);
    }
    let merged_cut = a.cut + b.cut - 2.0 * cross;
    if merged_cut < -1e-9 {
        return Err(EntropyError::InconsistentStats(format!(
            "merged cut {merged_cut} < 0 (cross exceeds member cuts)"
        )));
    }
    let merged_vol = a.vol + b.vol;
    let merged_sum = a.sum_dlogd + b.sum_dlogd;
    Ok(
        community_entropy(merged_vol, merged_cut.max(0.0), merged_sum, vol_g)
            - community_entropy(a.vol, a.cut, a.sum_dlogd, vol_g)
            - community_entropy(b.vol, b.cut, b.sum_dlogd, vol_g),
    )
}

struct MergeState {
    node: CommunityNode,
    /// Aggregated cross weight to each neighboring community.
    neighbors: BTreeMap<usize, f64>,
    alive: bool,
}

/// Greedy structural-entropy minimization by rounds of parallel merges.
///
/// Each round scores every connected community pair, keeps pairs whose
/// entropy reduction is positive and above the median of positive
/// reductions, caps the batch at ceil((current−1)·p), and applies a
/// greedy disjoint matching in descending-reduction order. Ties break on
/// ascending community id pairs so identical inputs yield identical trees.
pub fn optimize_tree(g: &MultiRelationalGraph, p: f64) -> EncodingTree {
    optimize_tree_traced(g, p).0
}

/// As [`optimize_tree`], additionally returning the structural entropy of
/// the partition after each round (index 0 is the singleton partition).
pub fn optimize_tree_traced(g: &MultiRelationalGraph, p: f64) -> (EncodingTree, Vec<f64>) {
    assert!(
        p > 0.0 && p < 1.0,
        "merge schedule ratio p must be in (0,1)"
    );
    let degrees = aggregated_degrees(g);
    let vol_g: f64 = degrees.iter().sum();

    let mut states: Vec<MergeState> = (0..g.n)
        .map(|v| {
            let d = degrees[v];
            MergeState {
                node: CommunityNode {
                    members: vec![v as u32],
                    vol: d,
                    cut: d,
                    sum_dlogd: if d > 0.0 { d * d.log2() } else { 0.0 },
                },
                neighbors: BTreeMap::new(),
                alive: true,
            }
        })
        .collect();
    for (k, edges) in g.edges.iter().enumerate() {
        let omega = g.omega[k];
        for e in edges {
            *states[e.i as usize]
                .neighbors
                .entry(e.j as usize)
                .or_insert(0.0) += omega * e.w;
            *states[e.j as usize]
                .neighbors
                .entry(e.i as usize)
                .or_insert(0.0) += omega * e.w;
        }
    }

    let partition_entropy = |states: &[MergeState]| -> f64 {
        states
            .iter()
            .filter(|s| s.alive)
            .map(|s| community_entropy(s.node.vol, s.node.cut, s.node.sum_dlogd, vol_g))
            .sum()
    };

    let mut trace = Vec::new();
    if vol_g > 0.0 {
        trace.push(partition_entropy(&states));
    }
    let mut current_num = g.n;

    if vol_g > 0.0 {
        loop {
            // Candidates are the connected community pairs, in id order.
            let candidates: Vec<(usize, usize)> = states
                .iter()
                .enumerate()
                .filter(|(_, s)| s.alive)
                .flat_map(|(a, s)| {
                    s.neighbors
                        .iter()
                        .filter(move |&(&b, _)| b > a)
                        .map(move |(&b, _)| (a, b))
                })
                .collect();
            if candidates.is_empty() {
                break;
            }

            let scored: Vec<(f64, usize, usize)> = candidates
                .par_iter()
                .map(|&(a, b)| {
                    let cross = states[a].neighbors[&b];
                    let delta = merge_delta(&states[a].node, &states[b].node, cross, vol_g)
                        .expect("cross weights are maintained consistently");
                    (-delta, a, b)
                })
                .filter(|&(reduction, _, _)| reduction > 0.0)
                .collect();
            if scored.is_empty() {
                break;
            }

            // Median filter over the positive reductions. A single candidate
            // passes outright, and when ties leave nothing strictly above
            // the median we fall back to the whole positive set; otherwise
            // an admissible merge could stall the loop.
            let mut selected = if scored.len() == 1 {
                scored.clone()
            } else {
                let mut values: Vec<f64> = scored.iter().map(|s| s.0).collect();
                values.sort_by(|x, y| x.partial_cmp(y).unwrap());
                let mid = values.len() / 2;
                let median = if values.len() % 2 == 1 {
                    values[mid]
                } else {
                    0.5 * (values[mid - 1] + values[mid])
                };
                let above: Vec<_> = scored
                    .iter()
                    .copied()
                    .filter(|&(r, _, _)| r > median)
                    .collect();
                if above.is_empty() {
                    scored.clone()
                } else {
                    above
                }
            };
            selected.sort_by(|x, y| {
                y.0.partial_cmp(&x.0)
                    .unwrap()
                    .then_with(|| (x.1, x.2).cmp(&(y.1, y.2)))
            });
            let max_operate = (((current_num as f64) - 1.0) * p).ceil() as usize;
            selected.truncate(max_operate.max(1));

            // Greedy disjoint matching: a community merges at most once per round.
            let mut merged_this_round = vec![false; states.len()];
            let mut applied = 0usize;
            for (_, a, b) in selected {
                if merged_this_round[a] || merged_this_round[b] {
                    continue;
                }
                merged_this_round[a] = true;
                merged_this_round[b] = true;
                merge_communities(&mut states, a, b);
                applied += 1;
            }
            if applied == 0 {
                break;
            }
            current_num -= applied;
            trace.push(partition_entropy(&states));
        }
    }

    // Compact alive communities, ordered by smallest member id.
    let mut alive: Vec<CommunityNode> = states
        .into_iter()
        .filter(|s| s.alive)
        .map(|s| s.node)
        .collect();
    for c in &mut alive {
        c.members.sort_unstable();
    }
    alive.sort_by_key(|c| c.members[0]);
    let mut leaf_of = vec![0u32; g.n];
    for (cid, c) in alive.iter().enumerate() {
        for &v in &c.members {
            leaf_of[v as usize] = cid as u32;
        }
    }
    (
        EncodingTree {
            communities: alive,
            leaf_of,
        },
        trace,
    )
}

/// Merges community b into a and rewires the cross-weight map.
fn merge_communities(states: &mut [MergeState], a: usize, b: usize) {
    let cross = states[a].neighbors.get(&b).copied().unwrap_or(0.0);
    let b_node = std::mem::replace(
        &mut states[b].node,
        CommunityNode {
            members: Vec::new(),
            vol: 0.0,
            cut: 0.0,
            sum_dlogd: 0.0,
        },
    );
    let b_neighbors = std::mem::take(&mut states[b].neighbors);
    states[b].alive = false;

    {
        let node = &mut states[a].node;
        node.members.extend(b_node.members);
        node.vol += b_node.vol;
        node.cut = (node.cut + b_node.cut - 2.0 * cross).max(0.0);
        node.sum_dlogd += b_node.sum_dlogd;
    }
    states[a].neighbors.remove(&b);
    for (nbr, w) in b_neighbors {
        if nbr == a {
            continue;
        }
        *states[a].neighbors.entry(nbr).or_insert(0.0) += w;
        states[nbr].neighbors.remove(&b);
        *states[nbr].neighbors.entry(a).or_insert(0.0) += w;
    }
}
