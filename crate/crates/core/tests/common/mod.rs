//! Independent oracles shared by the integration suites. Everything here
//! recomputes results from first principles on the raw edge lists, on
//! purpose duplicating none of the library's cached-statistics code paths.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use botdetect::graph::{Edge, MultiRelationalGraph, NUM_RELATIONS};

/// All set partitions of {0..n-1}.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<u32>>> {
    fn recurse(v: u32, n: u32, current: &mut Vec<Vec<u32>>, out: &mut Vec<Vec<Vec<u32>>>) {
        if v == n {
            out.push(current.clone());
            return;
        }
        for idx in 0..current.len() {
            current[idx].push(v);
            recurse(v + 1, n, current, out);
            current[idx].pop();
        }
        current.push(vec![v]);
        recurse(v + 1, n, current, out);
        current.pop();
    }
    let mut out = Vec::new();
    recurse(0, n as u32, &mut Vec::new(), &mut out);
    out
}

/// Brute-force structural entropy of a partition, computed directly from
/// the edge lists: per-community root term plus per-leaf terms.
pub fn brute_entropy(g: &MultiRelationalGraph, partition: &[Vec<u32>]) -> f64 {
    let mut degree = vec![0.0; g.n];
    for (k, edges) in g.edges.iter().enumerate() {
        for e in edges {
            degree[e.i as usize] += g.omega[k] * e.w;
            degree[e.j as usize] += g.omega[k] * e.w;
        }
    }
    let vol_g: f64 = degree.iter().sum();
    let mut community_of = vec![0usize; g.n];
    for (cid, block) in partition.iter().enumerate() {
        for &v in block {
            community_of[v as usize] = cid;
        }
    }
    let mut total = 0.0;
    for (cid, block) in partition.iter().enumerate() {
        let vol: f64 = block.iter().map(|&v| degree[v as usize]).sum();
        if vol <= 0.0 {
            continue;
        }
        let mut cut = 0.0;
        for (k, edges) in g.edges.iter().enumerate() {
            for e in edges {
                let inside_i = community_of[e.i as usize] == cid;
                let inside_j = community_of[e.j as usize] == cid;
                if inside_i != inside_j {
                    cut += g.omega[k] * e.w;
                }
            }
        }
        total += -(cut / vol_g) * (vol / vol_g).log2();
        for &v in block {
            let d = degree[v as usize];
            if d > 0.0 {
                total += -(d / vol_g) * (d / vol).log2();
            }
        }
    }
    total
}

/// Exhaustive minimum-entropy partition.
pub fn min_entropy_partition(g: &MultiRelationalGraph) -> (Vec<Vec<u32>>, f64) {
    set_partitions(g.n)
        .into_iter()
        .map(|p| {
            let h = brute_entropy(g, &p);
            (p, h)
        })
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap()
}

/// Random multi-relational graph: up to `max_relations` non-empty edge
/// sets, each edge kept with probability `density`, weights in (0, 1].
pub fn random_graph(
    rng: &mut ChaCha8Rng,
    n: usize,
    max_relations: usize,
    density: f64,
) -> MultiRelationalGraph {
    let relations = rng.gen_range(1..=max_relations);
    let mut edges: [Vec<Edge>; NUM_RELATIONS] = Default::default();
    for bucket in edges.iter_mut().take(relations) {
        for i in 0..n as u32 {
            for j in (i + 1)..n as u32 {
                if rng.gen_bool(density) {
                    bucket.push(Edge {
                        i,
                        j,
                        w: rng.gen_range(0.05..=1.0),
                    });
                }
            }
        }
    }
    MultiRelationalGraph {
        n,
        edges,
        omega: [1.0, 1.0, 1.0],
    }
}

/// Dense reference for the co-ranking iteration: materializes every entry
/// of the O and S tensors, fallbacks included, and runs the textbook
/// update with the same renormalization rule as the sparse path.
pub struct DenseReference {
    n: usize,
    o: Vec<Vec<[f64; NUM_RELATIONS]>>,
    s: Vec<Vec<[f64; NUM_RELATIONS]>>,
}

impl DenseReference {
    pub fn new(g: &MultiRelationalGraph) -> Self {
        let n = g.n;
        let mut a = vec![vec![[0.0f64; NUM_RELATIONS]; n]; n];
        for (k, edges) in g.edges.iter().enumerate() {
            for e in edges {
                a[e.i as usize][e.j as usize][k] = 1.0;
                a[e.j as usize][e.i as usize][k] = 1.0;
            }
        }
        let mut o = vec![vec![[0.0f64; NUM_RELATIONS]; n]; n];
        let mut s = vec![vec![[0.0f64; NUM_RELATIONS]; n]; n];
        for i in 0..n {
            for k in 0..NUM_RELATIONS {
                let row: f64 = (0..n).map(|j| a[i][j][k]).sum();
                for j in 0..n {
                    o[i][j][k] = if row > 0.0 {
                        a[i][j][k] / row
                    } else {
                        1.0 / n as f64
                    };
                }
            }
            for j in 0..n {
                if i == j {
                    continue;
                }
                let over_relations: f64 = a[i][j].iter().sum();
                for k in 0..NUM_RELATIONS {
                    s[i][j][k] = if over_relations > 0.0 {
                        a[i][j][k] / over_relations
                    } else {
                        1.0 / NUM_RELATIONS as f64
                    };
                }
            }
        }
        DenseReference { n, o, s }
    }

    #[allow(clippy::needless_range_loop)]
    pub fn step(&self, x: &[f64], y: &[f64; NUM_RELATIONS]) -> (Vec<f64>, [f64; NUM_RELATIONS]) {
        let n = self.n;
        let mut x_new = vec![0.0; n];
        for j in 0..n {
            for i in 0..n {
                for k in 0..NUM_RELATIONS {
                    x_new[j] += self.o[i][j][k] * x[i] * y[k];
                }
            }
        }
        let mut y_new = [0.0; NUM_RELATIONS];
        for k in 0..NUM_RELATIONS {
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        y_new[k] += self.s[i][j][k] * x[i] * x[j];
                    }
                }
            }
        }
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
}
