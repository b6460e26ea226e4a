//! Classification metrics against ground truth. Bot is the positive class.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::label::Label;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("prediction and truth lengths differ: {pred} vs {truth}")]
    LengthMismatch { pred: usize, truth: usize },
    #[error("AUC undefined: truth contains only one class")]
    SingleClass,
    #[error("empty input")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub tp: usize,
    pub tn: usize,
    pub fp: usize,
    pub fn_: usize,
    pub acc: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub auc: Option<f64>,
}

pub fn confusion_metrics(pred: &[Label], truth: &[Label]) -> Result<Metrics, EvalError> {
    if pred.len() != truth.len() {
        return Err(EvalError::LengthMismatch {
            pred: pred.len(),
            truth: truth.len(),
        });
    }
    if pred.is_empty() {
        return Err(EvalError::Empty);
    }
    let (mut tp, mut tn, mut fp, mut fn_) = (0usize, 0usize, 0usize, 0usize);
    for (&p, &t) in pred.iter().zip(truth) {
        match (p, t) {
            (Label::Bot, Label::Bot) => tp += 1,
            (Label::Human, Label::Human) => tn += 1,
            (Label::Bot, Label::Human) => fp += 1,
            (Label::Human, Label::Bot) => fn_ += 1,
        }
    }
    let total = (tp + tn + fp + fn_) as f64;
    let precision = if tp + fp > 0 {
        tp as f64 / (tp + fp) as f64
    } else {
        0.0
    };
    let recall = if tp + fn_ > 0 {
        tp as f64 / (tp + fn_) as f64
    } else {
        0.0
    };
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(Metrics {
        tp,
        tn,
        fp,
        fn_,
        acc: (tp + tn) as f64 / total,
        precision,
        recall,
        f1,
        auc: None,
    })
}

/// Standard ROC threshold sweep using the scores as predicted values.
/// Equal scores are grouped into a single threshold step; AUC is the
/// trapezoid-rule area. Points come out in increasing-fpr order.
pub fn roc_points(scores: &[f64], truth: &[Label]) -> Result<(Vec<(f64, f64)>, f64), EvalError> {
    if scores.len() != truth.len() {
        return Err(EvalError::LengthMismatch {
            pred: scores.len(),
            truth: truth.len(),
        });
    }
    let positives = truth.iter().filter(|&&t| t == Label::Bot).count();
    let negatives = truth.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(EvalError::SingleClass);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap());

    let mut points = vec![(0.0, 0.0)];
    let mut auc = 0.0;
    let (mut tp, mut fp) = (0usize, 0usize);
    let (mut prev_fpr, mut prev_tpr) = (0.0f64, 0.0f64);
    let mut idx = 0;
    while idx < order.len() {
        let threshold = scores[order[idx]];
        while idx < order.len() && scores[order[idx]] == threshold {
            match truth[order[idx]] {
                Label::Bot => tp += 1,
                Label::Human => fp += 1,
            }
            idx += 1;
        }
        let fpr = fp as f64 / negatives as f64;
        let tpr = tp as f64 / positives as f64;
        auc += (fpr - prev_fpr) * (tpr + prev_tpr) / 2.0;
        points.push((fpr, tpr));
        prev_fpr = fpr;
        prev_tpr = tpr;
    }
    Ok((points, auc))
}

/// ROC CSV with a header and 6-decimal fixed precision per point.
pub fn write_roc_csv(points: &[(f64, f64)], out: &mut impl std::io::Write) -> std::io::Result<()> {
    writeln!(out, "fpr,tpr")?;
    for (fpr, tpr) in points {
        writeln!(out, "{fpr:.6},{tpr:.6}")?;
    }
    Ok(())
}
