//! Acceptance suite: one test per release criterion, each printing a
//! pass line (run with `cargo test --test acceptance -- --nocapture`).

mod common;

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use botdetect::config::PipelineConfig;
use botdetect::entropy::{
    merge_delta, one_dim_entropy, optimize_tree, optimize_tree_traced, structural_entropy,
    EncodingTree,
};
use botdetect::eval::{confusion_metrics, roc_points};
use botdetect::graph::{Edge, MultiRelationalGraph};
use botdetect::label::Label;
use botdetect::multirank::{iterate_stationary, step, tensorize};
use botdetect::pipeline::run_detect;
use botdetect::synth::gen_synthetic;

use common::{brute_entropy, min_entropy_partition, random_graph, set_partitions, DenseReference};

fn random_nonempty_graph(rng: &mut ChaCha8Rng, n: usize) -> MultiRelationalGraph {
    loop {
        let g = random_graph(rng, n, 3, 0.5);
        if g.edge_count() > 0 {
            return g;
        }
    }
}

fn single_relation(n: usize, edges: &[(u32, u32, f64)]) -> MultiRelationalGraph {
    MultiRelationalGraph {
        n,
        edges: [
            edges.iter().map(|&(i, j, w)| Edge { i, j, w }).collect(),
            Vec::new(),
            Vec::new(),
        ],
        omega: [1.0, 1.0, 1.0],
    }
}

#[test]
fn acceptance_1_entropy_matches_brute_force_on_all_partitions() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for _ in 0..200 {
        let n = rng.gen_range(2..=6);
        let g = random_nonempty_graph(&mut rng, n);
        for partition in set_partitions(n) {
            let tree = EncodingTree::from_partition(&g, &partition).unwrap();
            let ours = structural_entropy(&tree, &g).unwrap();
            let oracle = brute_entropy(&g, &partition);
            assert!(
                (ours - oracle).abs() < 1e-9,
                "n={n} partition={partition:?}: {ours} vs {oracle}"
            );
        }
    }
    println!("ACCEPTANCE 1 entropy vs brute force on 200 random graphs: PASS");
}

#[test]
fn acceptance_2_merge_delta_equals_entropy_difference() {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut checked = 0;
    while checked < 200 {
        let n = rng.gen_range(3..=6);
        let g = random_nonempty_graph(&mut rng, n);
        let partitions = set_partitions(n);
        let partition = &partitions[rng.gen_range(0..partitions.len())];
        if partition.len() < 2 {
            continue;
        }
        let a = rng.gen_range(0..partition.len());
        let b = loop {
            let b = rng.gen_range(0..partition.len());
            if b != a {
                break b;
            }
        };
        let before_tree = EncodingTree::from_partition(&g, partition).unwrap();
        let mut merged: Vec<Vec<u32>> = partition
            .iter()
            .enumerate()
            .filter(|&(idx, _)| idx != a && idx != b)
            .map(|(_, block)| block.clone())
            .collect();
        let mut joint = partition[a].clone();
        joint.extend_from_slice(&partition[b]);
        merged.push(joint);
        let after_tree = EncodingTree::from_partition(&g, &merged).unwrap();

        let vol_g: f64 = botdetect::entropy::aggregated_degrees(&g).iter().sum();
        let mut cross = 0.0;
        for (k, edges) in g.edges.iter().enumerate() {
            for e in edges {
                let ca = before_tree.leaf_of[e.i as usize] as usize;
                let cb = before_tree.leaf_of[e.j as usize] as usize;
                if (ca == a && cb == b) || (ca == b && cb == a) {
                    cross += g.omega[k] * e.w;
                }
            }
        }
        let delta = merge_delta(
            &before_tree.communities[a],
            &before_tree.communities[b],
            cross,
            vol_g,
        )
        .unwrap();
        let oracle = structural_entropy(&after_tree, &g).unwrap()
            - structural_entropy(&before_tree, &g).unwrap();
        assert!(
            (delta - oracle).abs() < 1e-9,
            "partition={partition:?} a={a} b={b}: {delta} vs {oracle}"
        );
        checked += 1;
    }
    println!("ACCEPTANCE 2 merge delta identity on 200 random instances: PASS");
}

#[test]
fn acceptance_3_optimizer_sanity() {
    // Two unit-weight triangles joined by a weak bridge: the brute-force
    // minimum over all partitions of 6 vertices is the two triangles, and
    // the greedy optimizer must land exactly there.
    let triangles = single_relation(
        6,
        &[
            (0, 1, 1.0),
            (1, 2, 1.0),
            (0, 2, 1.0),
            (3, 4, 1.0),
            (4, 5, 1.0),
            (3, 5, 1.0),
            (2, 3, 0.1),
        ],
    );
    let (best, best_h) = min_entropy_partition(&triangles);
    let mut best_sorted: Vec<Vec<u32>> = best;
    best_sorted.sort();
    assert_eq!(best_sorted, vec![vec![0, 1, 2], vec![3, 4, 5]]);
    let tree = optimize_tree(&triangles, 0.15);
    let mut greedy: Vec<Vec<u32>> = tree.communities.iter().map(|c| c.members.clone()).collect();
    greedy.sort();
    assert_eq!(greedy, best_sorted);
    assert!((structural_entropy(&tree, &triangles).unwrap() - best_h).abs() < 1e-9);

    // K4: the exhaustive minimum over all 15 partitions is a perfect
    // two-pair split at 5/3 bits (the one-block partition costs 2 bits);
    // the greedy optimizer reaches that enumerated minimum.
    let mut k4_edges = Vec::new();
    for i in 0..4u32 {
        for j in (i + 1)..4 {
            k4_edges.push((i, j, 1.0));
        }
    }
    let k4 = single_relation(4, &k4_edges);
    let (_, k4_min) = min_entropy_partition(&k4);
    assert!((k4_min - 5.0 / 3.0).abs() < 1e-9);
    let k4_tree = optimize_tree(&k4, 0.15);
    assert_eq!(k4_tree.num_communities(), 2);
    assert!(k4_tree.communities.iter().all(|c| c.members.len() == 2));
    assert!((structural_entropy(&k4_tree, &k4).unwrap() - k4_min).abs() < 1e-9);

    // Fuzz: entropy is non-increasing across rounds on 1000 random graphs.
    for seed in 0..1000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(303 + seed);
        let n = rng.gen_range(2..=30);
        let density = rng.gen_range(0.05..0.5);
        let g = random_graph(&mut rng, n, 3, density);
        if g.edge_count() == 0 {
            continue;
        }
        let (tree, trace) = optimize_tree_traced(&g, 0.15);
        for w in trace.windows(2) {
            assert!(w[1] <= w[0] + 1e-9, "seed {seed}: entropy increased");
        }
        // On small graphs, additionally check the oracle bound and that the
        // reported entropy is the brute-force evaluation of the partition.
        if n <= 6 {
            let partition: Vec<Vec<u32>> =
                tree.communities.iter().map(|c| c.members.clone()).collect();
            let greedy_h = structural_entropy(&tree, &g).unwrap();
            assert!((greedy_h - brute_entropy(&g, &partition)).abs() < 1e-9);
            let (_, min_h) = min_entropy_partition(&g);
            assert!(greedy_h >= min_h - 1e-9);
        }
    }
    println!("ACCEPTANCE 3 optimizer sanity (triangles, K4, 1000-seed fuzz): PASS");
}

#[test]
fn acceptance_4_multirank_sparse_matches_dense_reference() {
    let rho = 0.004;
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for trial in 0..100 {
        let n = rng.gen_range(2..=20);
        let density = rng.gen_range(0.1..0.6);
        let g = random_graph(&mut rng, n, 3, density);
        let tensors = tensorize(&g, false);
        let dense = DenseReference::new(&g);

        let mut x_sparse = vec![1.0 / n as f64; n];
        let mut y_sparse = [1.0 / 3.0; 3];
        let mut x_dense = x_sparse.clone();
        let mut y_dense = y_sparse;
        let mut iterations = 0usize;
        loop {
            iterations += 1;
            let (xs, ys) = step(&tensors, &x_sparse, &y_sparse);
            let (xd, yd) = dense.step(&x_dense, &y_dense);
            for (a, b) in xs.iter().zip(&xd) {
                assert!(
                    (a - b).abs() < 1e-8,
                    "trial {trial} iter {iterations}: x diverged"
                );
            }
            for (a, b) in ys.iter().zip(&yd) {
                assert!(
                    (a - b).abs() < 1e-8,
                    "trial {trial} iter {iterations}: y diverged"
                );
            }
            let residual: f64 = xs
                .iter()
                .zip(&x_sparse)
                .map(|(a, b)| (a - b).abs())
                .sum::<f64>()
                + ys.iter()
                    .zip(&y_sparse)
                    .map(|(a, b)| (a - b).abs())
                    .sum::<f64>();
            x_sparse = xs;
            y_sparse = ys;
            x_dense = xd;
            y_dense = yd;
            if residual < rho {
                break;
            }
            assert!(iterations < 10_000, "trial {trial}: no convergence");
        }

        let dist = iterate_stationary(&tensors, rho, 10_000).unwrap();
        assert!(dist.residual < rho);
        assert!((dist.x.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!((dist.y.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert_eq!(dist.iterations, iterations);
        for (a, b) in dist.x.iter().zip(&x_sparse) {
            assert!((a - b).abs() < 1e-12);
        }
    }
    println!("ACCEPTANCE 4 sparse/dense co-ranking equivalence on 100 graphs: PASS");
}

#[test]
fn acceptance_5_one_dimensional_entropy_pins() {
    let cycle = single_relation(4, &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)]);
    assert!((one_dim_entropy(&cycle).unwrap() - 2.0).abs() < 1e-12);
    let pair = single_relation(2, &[(0, 1, 1.0)]);
    assert!((one_dim_entropy(&pair).unwrap() - 1.0).abs() < 1e-12);
    println!("ACCEPTANCE 5 one-dimensional entropy pins: PASS");
}

#[test]
fn acceptance_6_synthetic_end_to_end_benchmark() {
    let records = gen_synthetic(200, 100, 7);
    let start = Instant::now();
    let report = run_detect(&records, &PipelineConfig::default()).unwrap();
    let elapsed = start.elapsed();
    let metrics = report
        .metrics
        .expect("synthetic corpus carries truth labels");
    let auc = metrics.auc.expect("both classes present");
    assert!(metrics.f1 >= 0.90, "F1 {} < 0.90", metrics.f1);
    assert!(auc >= 0.95, "AUC {auc} < 0.95");
    assert!(
        elapsed.as_secs_f64() < 30.0,
        "pipeline took {:.1}s",
        elapsed.as_secs_f64()
    );
    println!(
        "ACCEPTANCE 6 synthetic benchmark (F1={:.4}, AUC={:.4}, {:.2}s): PASS",
        metrics.f1,
        auc,
        elapsed.as_secs_f64()
    );
}

#[test]
fn acceptance_7_metrics_pins() {
    use Label::{Bot, Human};
    let pred = [Bot, Bot, Bot, Human, Human];
    let truth = [Bot, Bot, Human, Human, Human];
    let m = confusion_metrics(&pred, &truth).unwrap();
    assert_eq!((m.tp, m.tn, m.fp, m.fn_), (2, 2, 1, 0));
    assert!((m.acc - 0.8).abs() < 1e-9);
    assert!((m.precision - 2.0 / 3.0).abs() < 1e-9);
    assert!((m.recall - 1.0).abs() < 1e-9);
    assert!((m.f1 - 0.8).abs() < 1e-9);
    let (_, auc) = roc_points(&[0.9, 0.8, 0.3, 0.2], &[Bot, Human, Bot, Human]).unwrap();
    assert!((auc - 0.75).abs() < 1e-9);
    println!("ACCEPTANCE 7 metrics pins: PASS");
}

#[test]
fn acceptance_8_default_config_matches_published_settings() {
    let cfg = PipelineConfig::default();
    assert_eq!(cfg.xi, 0.1);
    assert_eq!(cfg.p, 0.15);
    assert_eq!(cfg.rho, 0.004);
    assert_eq!(cfg.pi, 0.4);
    assert_eq!(cfg.omega, [1.0, 1.0, 1.0]);
    println!("ACCEPTANCE 8 default config equals published settings: PASS");
}

#[test]
fn acceptance_9_pipeline_is_deterministic_across_runs() {
    let records = gen_synthetic(120, 60, 7);
    let cfg = PipelineConfig::default();
    let run = || {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap();
        let report = pool.install(|| run_detect(&records, &cfg).unwrap());
        serde_json::to_vec(&report).unwrap()
    };
    assert_eq!(run(), run());
    println!("ACCEPTANCE 9 byte-identical outputs across runs: PASS");
}
