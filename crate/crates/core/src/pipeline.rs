//! End-to-end orchestration: ingest → graph → entropy minimization →
//! co-ranking → labeling → optional metrics.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::PipelineConfig;
use crate::entropy::{self, EncodingTree};
use crate::eval::{self, Metrics};
use crate::graph::{build_graph, GraphConfig, MultiRelationalGraph};
use crate::ingest::{extract_features, TruthLabel, UserRecord};
use crate::label::{self, CommunityVerdict, Label};
use crate::multirank::{self, StationaryDistribution};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("no valid users: every record was empty or skipped")]
    NoValidUsers,
    #[error("power iteration failed: {0}")]
    MultiRank(#[from] multirank::MultiRankError),
    #[error("entropy stage failed: {0}")]
    Entropy(#[from] entropy::EntropyError),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UserVerdict {
    pub id: String,
    pub community: usize,
    pub ev: f64,
    pub label: Label,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth_label: Option<TruthLabel>,
}

/// Full pipeline output: per-user verdicts, per-community summaries, and
/// metrics when the corpus carries truth labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectionReport {
    pub users: Vec<UserVerdict>,
    pub communities: Vec<CommunityVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub metrics: Option<Metrics>,
    pub skipped_users: usize,
}

/// Intermediate artifacts kept around for dumps and inspection.
pub struct DetectionArtifacts {
    pub graph: MultiRelationalGraph,
    pub tree: EncodingTree,
    pub stationary: StationaryDistribution,
    pub ids: Vec<String>,
}

pub fn run_detect(
    records: &[UserRecord],
    cfg: &PipelineConfig,
) -> Result<DetectionReport, PipelineError> {
    run_detect_with_artifacts(records, cfg).map(|(report, _)| report)
}

pub fn run_detect_with_artifacts(
    records: &[UserRecord],
    cfg: &PipelineConfig,
) -> Result<(DetectionReport, DetectionArtifacts), PipelineError> {
    let mut ids = Vec::new();
    let mut truth = Vec::new();
    let mut features = Vec::new();
    let mut skipped_users = 0usize;
    for record in records {
        match extract_features(record) {
            Some(f) => {
                ids.push(record.id.clone());
                truth.push(record.truth_label);
                features.push(f);
            }
            None => {
                log::warn!("skipping user {:?}: no authored posts", record.id);
                skipped_users += 1;
            }
        }
    }
    if features.is_empty() {
        return Err(PipelineError::NoValidUsers);
    }

    let graph_cfg = GraphConfig {
        xi: cfg.xi,
        xi_per_relation: [None; 3],
        phi: cfg.phi,
        omega: cfg.omega,
    };
    let graph = build_graph(&features, &graph_cfg);

    let degrees = entropy::aggregated_degrees(&graph);
    let tree = if degrees.iter().sum::<f64>() > 0.0 {
        entropy::optimize_tree(&graph, cfg.p)
    } else {
        EncodingTree::singletons(&graph)
    };

    let tensors = multirank::tensorize(&graph, cfg.weighted_tensor);
    let stationary = multirank::iterate_stationary(&tensors, cfg.rho, cfg.max_iterations)?;

    let influences = label::community_influence(&tree, &stationary.x);
    let cohesions = label::community_cohesion(&tree, &graph);
    let sizes: Vec<usize> = tree.communities.iter().map(|c| c.members.len()).collect();
    let mut communities =
        label::score_and_label(&influences, &cohesions, &sizes, cfg.pi, cfg.theta);

    // Zero-volume communities are isolated vertices with no behavioral
    // similarity to anyone; they are labeled human regardless of score.
    for (verdict, node) in communities.iter_mut().zip(&tree.communities) {
        if node.vol <= 0.0 {
            verdict.label = Label::Human;
        }
    }

    let users: Vec<UserVerdict> = ids
        .iter()
        .enumerate()
        .map(|(v, id)| {
            let community = tree.leaf_of[v] as usize;
            UserVerdict {
                id: id.clone(),
                community,
                ev: communities[community].ev,
                label: communities[community].label,
                truth_label: truth[v],
            }
        })
        .collect();

    let metrics = compute_metrics(&users);
    Ok((
        DetectionReport {
            users,
            communities,
            metrics,
            skipped_users,
        },
        DetectionArtifacts {
            graph,
            tree,
            stationary,
            ids,
        },
    ))
}

/// Metrics over the labeled subset of users; AUC uses each user's
/// community evaluation score as the predicted value and is omitted when
/// the truth contains a single class.
fn compute_metrics(users: &[UserVerdict]) -> Option<Metrics> {
    let labeled: Vec<&UserVerdict> = users.iter().filter(|u| u.truth_label.is_some()).collect();
    if labeled.is_empty() {
        return None;
    }
    let pred: Vec<Label> = labeled.iter().map(|u| u.label).collect();
    let truth: Vec<Label> = labeled
        .iter()
        .map(|u| match u.truth_label.unwrap() {
            TruthLabel::Bot => Label::Bot,
            TruthLabel::Human => Label::Human,
        })
        .collect();
    let mut metrics = eval::confusion_metrics(&pred, &truth).ok()?;
    let scores: Vec<f64> = labeled.iter().map(|u| u.ev).collect();
    metrics.auc = eval::roc_points(&scores, &truth).ok().map(|(_, auc)| auc);
    Some(metrics)
}

/// ROC points of a finished report, when truth labels allow them.
pub fn report_roc(report: &DetectionReport) -> Option<Vec<(f64, f64)>> {
    let labeled: Vec<&UserVerdict> = report
        .users
        .iter()
        .filter(|u| u.truth_label.is_some())
        .collect();
    let truth: Vec<Label> = labeled
        .iter()
        .map(|u| match u.truth_label.unwrap() {
            TruthLabel::Bot => Label::Bot,
            TruthLabel::Human => Label::Human,
        })
        .collect();
    let scores: Vec<f64> = labeled.iter().map(|u| u.ev).collect();
    eval::roc_points(&scores, &truth)
        .ok()
        .map(|(points, _)| points)
}
