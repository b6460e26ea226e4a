//! Co-ranking of users and relations via tensor power iteration.
//!
//! The graph is tensorized into transition tensors O (vertex-normalized)
//! and S (relation-normalized). Rows with no outgoing edge under a relation
//! fall back to the uniform 1/N distribution, and ordered vertex pairs
//! connected under no relation fall back to 1/3 across relations; both
//! fallbacks are applied analytically instead of materializing dense rows.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{MultiRelationalGraph, NUM_RELATIONS};

#[derive(Debug, Error)]
pub enum MultiRankError {
    #[error(
        "power iteration did not converge within {iterations} iterations (residual {residual})"
    )]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("graph has no vertices")]
    EmptyGraph,
}

/// Sparse transition structure of the tensorized graph.
#[derive(Debug, Clone)]
pub struct TransitionTensors {
    pub n: usize,
    /// Per relation, per vertex: outgoing (neighbor, entry weight) pairs.
    /// In binary mode every entry weight is 1.
    out: [Vec<Vec<(u32, f64)>>; NUM_RELATIONS],
    /// Per relation, per vertex: the row sum Σ_j a(i,j,k); 0 marks dangling.
    row_sum: [Vec<f64>; NUM_RELATIONS],
    /// Per relation: vertices with no relation-k edges.
    dangling: [Vec<u32>; NUM_RELATIONS],
    /// Unordered connected pairs with per-relation entry weights.
    pairs: Vec<(u32, u32, [f64; NUM_RELATIONS])>,
}

/// Builds the transition tensors. With `use_weights` false the adjacency is
/// the binary edge indicator; with it true the stored edge weights are used.
pub fn tensorize(g: &MultiRelationalGraph, use_weights: bool) -> TransitionTensors {
    let n = g.n;
    let mut out: [Vec<Vec<(u32, f64)>>; NUM_RELATIONS] =
        std::array::from_fn(|_| vec![Vec::new(); n]);
    let mut row_sum: [Vec<f64>; NUM_RELATIONS] = std::array::from_fn(|_| vec![0.0; n]);
    let mut pair_index: HashMap<(u32, u32), usize> = HashMap::new();
    let mut pairs: Vec<(u32, u32, [f64; NUM_RELATIONS])> = Vec::new();

    for (k, edges) in g.edges.iter().enumerate() {
        for e in edges {
            let a = if use_weights { e.w } else { 1.0 };
            out[k][e.i as usize].push((e.j, a));
            out[k][e.j as usize].push((e.i, a));
            row_sum[k][e.i as usize] += a;
            row_sum[k][e.j as usize] += a;
            let idx = *pair_index.entry((e.i, e.j)).or_insert_with(|| {
                pairs.push((e.i, e.j, [0.0; NUM_RELATIONS]));
                pairs.len() - 1
            });
            pairs[idx].2[k] = a;
        }
    }
    pairs.sort_by_key(|&(i, j, _)| (i, j));

    let dangling = std::array::from_fn(|k| {
        (0..n as u32)
            .filter(|&v| row_sum[k][v as usize] == 0.0)
            .collect()
    });
    TransitionTensors {
        n,
        out,
        row_sum,
        dangling,
        pairs,
    }
}

impl TransitionTensors {
    pub fn dangling(&self, relation: usize) -> &[u32] {
        &self.dangling[relation]
    }
}

/// One coupled power-iteration update, including the analytic fallback
/// contributions and the renormalization of both distributions.
#[allow(clippy::needless_range_loop)]
pub fn step(
    t: &TransitionTensors,
    x: &[f64],
    y: &[f64; NUM_RELATIONS],
) -> (Vec<f64>, [f64; NUM_RELATIONS]) {
    let n = t.n;
    let mut x_new = vec![0.0; n];
    for k in 0..NUM_RELATIONS {
        if y[k] == 0.0 {
            continue;
        }
        for i in 0..n {
            let row = t.row_sum[k][i];
            if row == 0.0 {
                continue;
            }
            let scale = x[i] * y[k] / row;
            if scale == 0.0 {
                continue;
            }
            for &(j, a) in &t.out[k][i] {
                x_new[j as usize] += scale * a;
            }
        }
        // Dangling rows spread their mass uniformly over all vertices.
        let dangling_mass: f64 = t.dangling[k].iter().map(|&v| x[v as usize]).sum();
        if dangling_mass > 0.0 {
            let share = y[k] * dangling_mass / n as f64;
            for entry in x_new.iter_mut() {
                *entry += share;
            }
        }
    }

    let mut y_new = [0.0; NUM_RELATIONS];
    let mut connected_mass = 0.0;
    for &(i, j, entries) in &t.pairs {
        let prod = 2.0 * x[i as usize] * x[j as usize];
        let total: f64 = entries.iter().sum();
        for k in 0..NUM_RELATIONS {
            if entries[k] > 0.0 {
                y_new[k] += prod * entries[k] / total;
            }
        }
        connected_mass += prod;
    }
    // Unconnected ordered pairs contribute 1/3 to every relation.
    // Σ_{i≠j unconnected} x_i x_j = (Σx)² − Σx² − Σ_{connected} x_i x_j.
    let sum_x: f64 = x.iter().sum();
    let sum_x2: f64 = x.iter().map(|&v| v * v).sum();
    let fallback_mass = (sum_x * sum_x - sum_x2 - connected_mass).max(0.0);
    for entry in y_new.iter_mut() {
        *entry += fallback_mass / NUM_RELATIONS as f64;
    }

    // Both are probability distributions; renormalize so the fallback
    // terms cannot leak mass.
    let sx: f64 = x_new.iter().sum();
    if sx > 0.0 {
        for entry in x_new.iter_mut() {
            *entry /= sx;
        }
    } else {
        x_new = vec![1.0 / n as f64; n];
    }
    let sy: f64 = y_new.iter().sum();
    if sy > 0.0 {
        for entry in y_new.iter_mut() {
            *entry /= sy;
        }
    } else {
        y_new = [1.0 / NUM_RELATIONS as f64; NUM_RELATIONS];
    }
    (x_new, y_new)
}

/// Stationary co-ranking distribution: per-user influence x (sums to 1) and
/// per-relation influence y (sums to 1).
#[derive(Debug, Clone, Serialize)]
pub struct StationaryDistribution {
    pub x: Vec<f64>,
    pub y: [f64; NUM_RELATIONS],
    pub iterations: usize,
    pub residual: f64,
}

/// Runs the coupled power iteration from the uniform start until the L1
/// residual Σ|x_new−x| + Σ|y_new−y| drops below rho.
pub fn iterate_stationary(
    t: &TransitionTensors,
    rho: f64,
    max_iterations: usize,
) -> Result<StationaryDistribution, MultiRankError> {
    iterate_stationary_from(t, rho, max_iterations, None)
}

/// As [`iterate_stationary`] but with an explicit strictly positive start
/// for x (it is normalized internally).
pub fn iterate_stationary_from(
    t: &TransitionTensors,
    rho: f64,
    max_iterations: usize,
    x0: Option<&[f64]>,
) -> Result<StationaryDistribution, MultiRankError> {
    let n = t.n;
    if n == 0 {
        return Err(MultiRankError::EmptyGraph);
    }
    let mut x = match x0 {
        Some(v) => {
            let s: f64 = v.iter().sum();
            v.iter().map(|&e| e / s).collect::<Vec<f64>>()
        }
        None => vec![1.0 / n as f64; n],
    };
    let mut y = [1.0 / NUM_RELATIONS as f64; NUM_RELATIONS];

    for iteration in 1..=max_iterations {
        let (x_new, y_new) = step(t, &x, &y);
        let residual: f64 = x_new
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            + y_new
                .iter()
                .zip(&y)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>();
        x = x_new;
        y = y_new;
        if residual < rho {
            return Ok(StationaryDistribution {
                x,
                y,
                iterations: iteration,
                residual,
            });
        }
    }
    let residual = f64::INFINITY;
    Err(MultiRankError::NoConvergence {
        iterations: max_iterations,
        residual,
    })
}

/// JSON dump: per-user (id, x) pairs plus the 3-entry y array.
pub fn write_stationary_json(
    dist: &StationaryDistribution,
    ids: &[String],
    out: &mut impl std::io::Write,
) -> std::io::Result<()> {
    #[derive(Serialize)]
    struct Dump<'a> {
        users: Vec<(&'a str, f64)>,
        y: [f64; NUM_RELATIONS],
        iterations: usize,
        residual: f64,
    }
    let dump = Dump {
        users: ids
            .iter()
            .map(String::as_str)
            .zip(dist.x.iter().copied())
            .collect(),
        y: dist.y,
        iterations: dist.iterations,
        residual: dist.residual,
    };
    serde_json::to_writer_pretty(&mut *out, &dump)?;
    out.write_all(b"\n")
}
