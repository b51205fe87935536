#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use dualmarg_core::{Graph, ModelParams};

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Uniform on `[-1, 1]` with a small neighbourhood of zero removed.
pub fn signed_nonzero(rng: &mut ChaCha20Rng) -> f64 {
    loop {
        let x: f64 = rng.random_range(-1.0..=1.0);
        if x.abs() > 1e-3 {
            return x;
        }
    }
}

pub fn positive(rng: &mut ChaCha20Rng) -> f64 {
    rng.random_range(0.01..=1.0)
}

pub fn random_ising(graph: &Graph, rng: &mut ChaCha20Rng) -> ModelParams {
    let j = (0..graph.edge_count())
        .map(|_| signed_nonzero(rng))
        .collect();
    let h = (0..graph.vertex_count())
        .map(|_| signed_nonzero(rng))
        .collect();
    ModelParams::ising(j, h)
}

/// Positive couplings and fields.
pub fn random_ferromagnet(graph: &Graph, rng: &mut ChaCha20Rng) -> ModelParams {
    let j = (0..graph.edge_count()).map(|_| positive(rng)).collect();
    let h = (0..graph.vertex_count()).map(|_| positive(rng)).collect();
    ModelParams::ising(j, h)
}

pub fn small_topologies() -> Vec<(&'static str, Graph)> {
    vec![
        ("triangle", Graph::cycle(3).unwrap()),
        ("4-cycle", Graph::cycle(4).unwrap()),
        ("3x3 periodic", Graph::grid(3, 3, true).unwrap()),
    ]
}

pub fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| {
            assert_eq!(x.len(), y.len());
            x.iter().zip(y).map(|(p, q)| (p - q).abs())
        })
        .fold(0.0, f64::max)
}

/// Rooted trees on `n` vertices as level sequences, by the successor rule of
/// Beyer and Hedetniemi. The root has level 1.
fn rooted_level_sequences(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut l: Vec<usize> = (1..=n).collect();
    loop {
        out.push(l.clone());
        let Some(p) = (0..n).rev().find(|&i| l[i] > 2) else {
            break;
        };
        let q = (0..p).rev().find(|&i| l[i] == l[p] - 1).unwrap();
        for i in p..n {
            l[i] = l[i - (p - q)];
        }
    }
    out
}

fn edges_from_levels(levels: &[usize]) -> Vec<(usize, usize)> {
    (1..levels.len())
        .map(|i| {
            let parent = (0..i).rev().find(|&j| levels[j] == levels[i] - 1).unwrap();
            (parent, i)
        })
        .collect()
}

fn encode(adj: &[Vec<usize>], v: usize, parent: usize) -> String {
    let mut children: Vec<String> = adj[v]
        .iter()
        .filter(|&&u| u != parent)
        .map(|&u| encode(adj, u, v))
        .collect();
    children.sort();
    format!("({})", children.concat())
}

/// Canonical string of a free tree: the smallest center-rooted encoding.
fn canonical(n: usize, edges: &[(usize, usize)]) -> String {
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut removed = vec![false; n];
    let mut remaining = n;
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1).collect();
    while remaining > 2 {
        remaining -= layer.len();
        layer.iter().for_each(|&v| removed[v] = true);
        let mut next = Vec::new();
        for &v in &layer {
            for &u in &adj[v] {
                if removed[u] {
                    continue;
                }
                degree[u] -= 1;
                if degree[u] == 1 {
                    next.push(u);
                }
            }
        }
        layer = next;
    }
    layer
        .iter()
        .map(|&c| encode(&adj, c, usize::MAX))
        .min()
        .unwrap()
}

/// One representative of every unlabeled tree on `n` vertices.
pub fn free_trees(n: usize) -> Vec<Graph> {
    let mut seen = BTreeMap::new();
    for levels in rooted_level_sequences(n) {
        let edges = edges_from_levels(&levels);
        seen.entry(canonical(n, &edges)).or_insert(edges);
    }
    seen.into_values()
        .map(|edges| Graph::from_edges(n, edges).unwrap())
        .collect()
}
