//! Community scoring and bot/human labeling.
//!
//! A community's evaluation score blends its influence (mean stationary
//! mass of its members, normalized by the root's) with its cohesion (the
//! community node's entropy term, normalized by the sum over all
//! communities). Scores strictly above theta mark bot communities.

use serde::{Deserialize, Serialize};

use crate::entropy::{aggregated_degrees, EncodingTree};
use crate::graph::MultiRelationalGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Human,
    Bot,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CommunityVerdict {
    pub id: usize,
    pub size: usize,
    pub influence: f64,
    pub cohesion: f64,
    pub ev: f64,
    pub label: Label,
}

/// Mean stationary mass of each community's members, in community-id order.
pub fn community_influence(t: &EncodingTree, x: &[f64]) -> Vec<f64> {
    t.communities
        .iter()
        .map(|c| {
            let sum: f64 = c.members.iter().map(|&v| x[v as usize]).sum();
            sum / c.members.len() as f64
        })
        .collect()
}

/// Cohesion of each community: −(cut/vol_G)·log2(vol/vol_G), zero for
/// cut-free or zero-volume communities.
pub fn community_cohesion(t: &EncodingTree, g: &MultiRelationalGraph) -> Vec<f64> {
    let vol_g: f64 = aggregated_degrees(g).iter().sum();
    t.communities
        .iter()
        .map(|c| {
            if c.vol <= 0.0 || c.cut <= 0.0 || vol_g <= 0.0 {
                0.0
            } else {
                -(c.cut / vol_g) * (c.vol / vol_g).log2()
            }
        })
        .collect()
}

/// Scores every community and labels it bot when the score strictly
/// exceeds theta. `sizes` carries the member count per community; the root
/// influence is the size-weighted mean of the community influences. When no
/// community has positive cohesion the cohesion term is 0 for all.
pub fn score_and_label(
    influences: &[f64],
    cohesions: &[f64],
    sizes: &[usize],
    pi: f64,
    theta: f64,
) -> Vec<CommunityVerdict> {
    let total_users: usize = sizes.iter().sum();
    let root_influence = influences
        .iter()
        .zip(sizes)
        .map(|(inf, &s)| inf * s as f64)
        .sum::<f64>()
        / total_users.max(1) as f64;
    let cohesion_total: f64 = cohesions.iter().sum();
    influences
        .iter()
        .zip(cohesions)
        .zip(sizes)
        .enumerate()
        .map(|(id, ((&influence, &cohesion), &size))| {
            let influence_share = if root_influence > 0.0 {
                influence / root_influence
            } else {
                0.0
            };
            let cohesion_share = if cohesion_total > 0.0 {
                cohesion / cohesion_total
            } else {
                0.0
            };
            let ev = (1.0 - pi) * influence_share + pi * cohesion_share;
            CommunityVerdict {
                id,
                size,
                influence,
                cohesion,
                ev,
                label: if ev > theta { Label::Bot } else { Label::Human },
            }
        })
        .collect()
}
