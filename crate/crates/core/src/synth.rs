//! Synthetic corpus generation for desk-scale benchmarking.
//!
//! Bots are drawn from a few tight behavioral archetypes: near-identical
//! posting-type distributions, uniformly low posting influence, and high
//! follow-to-follower ratios. Humans draw every feature from wide
//! independent distributions, so they connect sparsely while bots form
//! dense similarity clusters.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ingest::{TruthLabel, UserRecord};

struct Archetype {
    pt: [f64; 3],
    inf: f64,
    ff: f64,
}

// Both archetypes share the same influence level so every bot pair is
// linked under the influence relation; the cross-archetype edges give
// each bot community a substantial cut and hence high cohesion.
// Posting-type and follow-ratio levels differ per archetype.
const ARCHETYPES: [Archetype; 2] = [
    Archetype {
        pt: [0.90, 0.05, 0.05],
        inf: 1.0,
        ff: 6.0,
    },
    Archetype {
        pt: [0.05, 0.85, 0.10],
        inf: 1.0,
        ff: 12.0,
    },
];

fn jitter(rng: &mut ChaCha8Rng, spread: f64) -> f64 {
    1.0 + rng.gen_range(-spread..spread)
}

fn bot_record(idx: usize, rng: &mut ChaCha8Rng) -> UserRecord {
    let archetype = &ARCHETYPES[idx % ARCHETYPES.len()];
    let total = 400.0;
    let n_original = (total * archetype.pt[0] * jitter(rng, 0.01))
        .round()
        .max(0.0) as u64;
    let n_retweet = (total * archetype.pt[1] * jitter(rng, 0.01))
        .round()
        .max(0.0) as u64;
    let n_comment = (total * archetype.pt[2] * jitter(rng, 0.01))
        .round()
        .max(0.0) as u64;
    let inf = archetype.inf * jitter(rng, 0.02);
    let n_followers = rng.gen_range(10u64..50);
    let target_ff = archetype.ff * jitter(rng, 0.02);
    let n_following = ((target_ff * (n_followers as f64 + 1.0)).round() as u64).saturating_sub(1);
    UserRecord {
        id: format!("bot{idx:04}"),
        n_original,
        n_retweet,
        n_comment,
        avg_comments_recv: inf * 0.3,
        avg_likes_recv: inf * 0.5,
        avg_retweets_recv: inf * 0.2,
        n_following,
        n_followers,
        truth_label: Some(TruthLabel::Bot),
    }
}

fn human_record(idx: usize, rng: &mut ChaCha8Rng) -> UserRecord {
    // Wide independent draws: posting mix over the whole simplex, follow
    // ratios mostly below the floor. Influence sits on a geometric ladder
    // well above the bot level, so deviation ratios between any two humans
    // (or a human and a bot) stay far over the similarity threshold.
    let raw = [
        rng.gen_range(0.05f64..1.0),
        rng.gen_range(0.05f64..1.0),
        rng.gen_range(0.05f64..1.0),
    ];
    let total_posts = rng.gen_range(40.0f64..400.0);
    let sum: f64 = raw.iter().sum();
    let n_original = ((raw[0] / sum) * total_posts).round() as u64;
    let n_retweet = ((raw[1] / sum) * total_posts).round() as u64;
    let n_comment = (((raw[2] / sum) * total_posts).round() as u64).max(1);
    let inf = 50.0 * 1.35f64.powi(idx as i32 % 64) * jitter(rng, 0.05);
    let n_followers = rng.gen_range(50u64..5000);
    let n_following = rng.gen_range(5u64..2000);
    UserRecord {
        id: format!("human{idx:04}"),
        n_original,
        n_retweet,
        n_comment,
        avg_comments_recv: inf * 0.4,
        avg_likes_recv: inf * 0.4,
        avg_retweets_recv: inf * 0.2,
        n_following,
        n_followers,
        truth_label: Some(TruthLabel::Human),
    }
}

/// Deterministic synthetic corpus: `n_bots` bot records followed by
/// `n_humans` human records.
pub fn gen_synthetic(n_bots: usize, n_humans: usize, seed: u64) -> Vec<UserRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::with_capacity(n_bots + n_humans);
    for idx in 0..n_bots {
        records.push(bot_record(idx, &mut rng));
    }
    for idx in 0..n_humans {
        records.push(human_record(idx, &mut rng));
    }
    records
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, GraphConfig};
    use crate::ingest::extract_features;

    #[test]
    fn generation_is_deterministic() {
        let a = gen_synthetic(200, 100, 7);
        let b = gen_synthetic(200, 100, 7);
        assert_eq!(a, b);
    }

    #[test]
    fn zero_bots_yields_only_humans() {
        let records = gen_synthetic(0, 2, 1);
        assert_eq!(records.len(), 2);
        assert!(records
            .iter()
            .all(|r| r.truth_label == Some(TruthLabel::Human)));
    }

    #[test]
    fn bots_are_more_similar_than_humans() {
        let records = gen_synthetic(60, 60, 42);
        let mean_weight = |records: &[UserRecord]| {
            let features: Vec<_> = records.iter().filter_map(extract_features).collect();
            let g = build_graph(&features, &GraphConfig::default());
            let n = features.len() as f64;
            let total: f64 = g
                .edges
                .iter()
                .flat_map(|edges| edges.iter().map(|e| e.w))
                .sum();
            total / (n * (n - 1.0) / 2.0)
        };
        let bot_mean = mean_weight(&records[..60]);
        let human_mean = mean_weight(&records[60..]);
        assert!(
            bot_mean > human_mean,
            "bot mean {bot_mean} vs human mean {human_mean}"
        );
    }
}
