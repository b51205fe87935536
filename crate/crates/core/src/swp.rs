//! Subgraphs-world process: a Markov chain over edge subsets `W ⊆ E` with
//! stationary weight
//!
//! ```text
//! w(W) = Π_{v ∈ odd(W)} tanh(βH_v) · Π_{e ∈ W} tanh(βJ_e)
//! ```
//!
//! where `odd(W)` are the vertices of odd degree in `W`. These subsets are
//! exactly the configurations of the dual Ising model (`ỹ_e = 1` iff
//! `e ∈ W`), and after factoring out `Π 2cosh` the weights agree, so the
//! inclusion frequency of an edge estimates the dual marginal `π_d,e(1)`.
//!
//! The kernel is single-edge-toggle Metropolis. It targets the same law as
//! the composite-move chain of Jerrum and Sinclair but carries no proven
//! polynomial mixing bound.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::exact::DEFAULT_BUDGET;
use crate::graph::Graph;
use crate::model::{ModelKind, ModelParams};
use crate::sum::CompensatedSum;

/// Number of batches for batch-means standard errors.
pub const BATCHES: usize = 50;

/// `ln tanh` of every coupling and field, validated positive.
#[derive(Debug, Clone)]
pub struct SwpWeights {
    edge: Vec<f64>,
    vertex: Vec<f64>,
}

impl SwpWeights {
    pub fn new(graph: &Graph, params: &ModelParams) -> Result<Self> {
        params.validate(graph)?;
        if params.kind != ModelKind::Ising {
            return Err(Error::Mode(
                "the subgraphs-world process needs an Ising model".into(),
            ));
        }
        if let Some(j) = params.couplings.iter().find(|&&j| !(j > 0.0)) {
            return Err(Error::Domain(format!(
                "subgraphs-world process needs positive couplings, found {j}"
            )));
        }
        if let Some(h) = params.fields.iter().find(|&&h| !(h > 0.0)) {
            return Err(Error::Domain(format!(
                "subgraphs-world process needs a positive field, found {h}"
            )));
        }
        Ok(SwpWeights {
            edge: params.couplings.iter().map(|j| j.tanh().ln()).collect(),
            vertex: params.fields.iter().map(|h| h.tanh().ln()).collect(),
        })
    }

    fn log_weight(&self, graph: &Graph, subset: &[bool]) -> f64 {
        let mut acc = CompensatedSum::new();
        for (e, _) in subset.iter().enumerate().filter(|(_, &s)| s) {
            acc.add(self.edge[e]);
        }
        for v in 0..graph.vertex_count() {
            if odd_degree(graph, subset, v) {
                acc.add(self.vertex[v]);
            }
        }
        acc.value()
    }
}

fn odd_degree(graph: &Graph, subset: &[bool], v: usize) -> bool {
    graph.incident(v).iter().filter(|&&e| subset[e]).count() % 2 == 1
}

/// `Π_{v ∈ odd(W)} tanh(βH_v) · Π_{e ∈ W} tanh(βJ_e)`.
pub fn swp_weight(subset: &[bool], graph: &Graph, params: &ModelParams) -> Result<f64> {
    if subset.len() != graph.edge_count() {
        return Err(Error::InvalidParams(format!(
            "subset of length {} for {} edges",
            subset.len(),
            graph.edge_count()
        )));
    }
    let w = SwpWeights::new(graph, params)?;
    Ok(w.log_weight(graph, subset).exp())
}

/// Current subset with cached vertex degrees and log-weight.
#[derive(Debug, Clone, PartialEq)]
pub struct SwpState {
    pub subset: Vec<bool>,
    pub degree: Vec<u32>,
    pub odd_count: usize,
    pub log_weight: f64,
}

impl SwpState {
    pub fn empty(graph: &Graph) -> Self {
        SwpState {
            subset: vec![false; graph.edge_count()],
            degree: vec![0; graph.vertex_count()],
            odd_count: 0,
            log_weight: 0.0,
        }
    }

    /// Change of log-weight if edge `e` were toggled.
    fn toggle_delta(&self, graph: &Graph, weights: &SwpWeights, e: usize) -> f64 {
        let (i, j) = graph.edge(e);
        let sign = |v: usize| {
            if self.degree[v].is_multiple_of(2) {
                1.0
            } else {
                -1.0
            }
        };
        let edge_term = if self.subset[e] {
            -weights.edge[e]
        } else {
            weights.edge[e]
        };
        edge_term + sign(i) * weights.vertex[i] + sign(j) * weights.vertex[j]
    }

    fn toggle(&mut self, graph: &Graph, delta: f64, e: usize) {
        let (i, j) = graph.edge(e);
        let adding = !self.subset[e];
        self.subset[e] = adding;
        for v in [i, j] {
            if adding {
                self.degree[v] += 1;
            } else {
                self.degree[v] -= 1;
            }
            if self.degree[v] % 2 == 1 {
                self.odd_count += 1;
            } else {
                self.odd_count -= 1;
            }
        }
        self.log_weight += delta;
    }
}

/// A seeded chain.
pub struct SwpChain<'a> {
    graph: &'a Graph,
    weights: SwpWeights,
    pub state: SwpState,
    rng: ChaCha20Rng,
    pub steps: u64,
    pub accepted: u64,
}

impl<'a> SwpChain<'a> {
    pub fn new(graph: &'a Graph, params: &ModelParams, seed: u64) -> Result<Self> {
        if graph.edge_count() == 0 {
            return Err(Error::InvalidParams("graph has no edges".into()));
        }
        Ok(SwpChain {
            graph,
            weights: SwpWeights::new(graph, params)?,
            state: SwpState::empty(graph),
            rng: ChaCha20Rng::seed_from_u64(seed),
            steps: 0,
            accepted: 0,
        })
    }

    /// One Metropolis step: propose toggling a uniformly chosen edge and
    /// accept with probability `min(1, w(W') / w(W))`. Returns the proposed
    /// edge and whether it was accepted.
    pub fn step(&mut self) -> (usize, bool) {
        let e = self.rng.random_range(0..self.graph.edge_count());
        let delta = self.state.toggle_delta(self.graph, &self.weights, e);
        let u: f64 = self.rng.random();
        let accept = delta >= 0.0 || u < delta.exp();
        if accept {
            self.state.toggle(self.graph, delta, e);
            self.accepted += 1;
        }
        self.steps += 1;
        (e, accept)
    }

    pub fn sweep(&mut self) {
        for _ in 0..self.graph.edge_count() {
            self.step();
        }
    }

    pub fn recomputed_log_weight(&self) -> f64 {
        self.weights.log_weight(self.graph, &self.state.subset)
    }
}

/// Inclusion-frequency estimate of `π_d,e(1)` for every edge.
#[derive(Debug, Clone, PartialEq)]
pub struct SwpEstimate {
    pub p_hat: Vec<f64>,
    pub std_err: Vec<f64>,
    pub seed: u64,
    pub sweeps: u64,
    pub burn_in: u64,
    /// Total Metropolis steps, burn-in included.
    pub steps: u64,
    /// Recorded samples: one per post-burn-in sweep.
    pub samples: u64,
    pub acceptance_rate: f64,
}

impl SwpEstimate {
    /// Dual edge marginals `[1 - p̂, p̂]`.
    pub fn dual_marginals(&self) -> Vec<Vec<f64>> {
        self.p_hat.iter().map(|&p| vec![1.0 - p, p]).collect()
    }
}

/// Runs `burn_in` sweeps, then records the subset after each of `sweeps`
/// sweeps. A sweep is `|E|` steps.
pub fn swp_estimate(
    graph: &Graph,
    params: &ModelParams,
    sweeps: u64,
    burn_in: u64,
    seed: u64,
) -> Result<SwpEstimate> {
    if sweeps == 0 {
        return Err(Error::InvalidParams("need at least one sweep".into()));
    }
    let mut chain = SwpChain::new(graph, params, seed)?;
    for _ in 0..burn_in {
        chain.sweep();
    }
    let m = graph.edge_count();
    let batches = BATCHES.min(sweeps as usize) as u64;
    let batch_len = sweeps / batches;
    let mut totals = vec![0u64; m];
    let mut batch_counts = vec![0u64; m];
    let mut batch_means: Vec<Vec<f64>> = vec![Vec::with_capacity(batches as usize); m];
    for s in 0..sweeps {
        chain.sweep();
        for (e, &inside) in chain.state.subset.iter().enumerate() {
            let x = u64::from(inside);
            totals[e] += x;
            batch_counts[e] += x;
        }
        // leftover sweeps beyond batches * batch_len count toward p_hat only
        if (s + 1) % batch_len == 0 && (s + 1) / batch_len <= batches {
            for e in 0..m {
                batch_means[e].push(batch_counts[e] as f64 / batch_len as f64);
                batch_counts[e] = 0;
            }
        }
    }
    let p_hat: Vec<f64> = totals.iter().map(|&t| t as f64 / sweeps as f64).collect();
    let std_err = batch_means
        .iter()
        .map(|means| {
            let b = means.len() as f64;
            if means.len() < 2 {
                return f64::NAN;
            }
            let mean = means.iter().sum::<f64>() / b;
            let var = means.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (b - 1.0);
            (var / b).sqrt()
        })
        .collect();
    Ok(SwpEstimate {
        p_hat,
        std_err,
        seed,
        sweeps,
        burn_in,
        steps: chain.steps,
        samples: sweeps,
        acceptance_rate: chain.accepted as f64 / chain.steps as f64,
    })
}

/// Exact inclusion probability of each edge under the subgraphs-world
/// distribution, by summing over all `2^|E|` subsets.
pub fn swp_exact_small(graph: &Graph, params: &ModelParams) -> Result<Vec<f64>> {
    let m = graph.edge_count();
    let states = 2f64.powi(m as i32);
    if states > DEFAULT_BUDGET as f64 {
        return Err(Error::BudgetExceeded {
            states,
            budget: DEFAULT_BUDGET,
        });
    }
    let weights = SwpWeights::new(graph, params)?;
    let mut z = CompensatedSum::new();
    let mut inclusion = vec![CompensatedSum::new(); m];
    let mut subset = vec![false; m];
    for code in 0u64..(1u64 << m) {
        for (e, s) in subset.iter_mut().enumerate() {
            *s = (code >> e) & 1 == 1;
        }
        let w = weights.log_weight(graph, &subset).exp();
        z.add(w);
        for (acc, _) in inclusion.iter_mut().zip(&subset).filter(|(_, &s)| s) {
            acc.add(w);
        }
    }
    let z = z.value();
    Ok(inclusion.iter().map(|s| s.value() / z).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn triangle() -> (Graph, ModelParams) {
        let g = Graph::cycle(3).unwrap();
        let p = ModelParams::ising_uniform(&g, 0.5, 0.3);
        (g, p)
    }

    #[test]
    fn weight_examples() {
        let (g, p) = triangle();
        assert_eq!(swp_weight(&[false; 3], &g, &p).unwrap(), 1.0);
        let one = swp_weight(&[true, false, false], &g, &p).unwrap();
        assert_relative_eq!(
            one,
            0.3f64.tanh().powi(2) * 0.5f64.tanh(),
            max_relative = 1e-14
        );
        assert_relative_eq!(one, 0.039217, epsilon = 1e-6);
        let all = swp_weight(&[true; 3], &g, &p).unwrap();
        assert_relative_eq!(all, 0.5f64.tanh().powi(3), max_relative = 1e-14);
        assert_relative_eq!(all, 0.098_686_2, epsilon = 1e-7);
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        let g = Graph::cycle(3).unwrap();
        let p = ModelParams::ising_uniform(&g, 0.5, 0.0);
        assert!(matches!(
            swp_weight(&[false; 3], &g, &p),
            Err(Error::Domain(_))
        ));
        let p = ModelParams::ising(vec![0.5, -0.1, 0.5], vec![0.2; 3]);
        assert!(matches!(SwpChain::new(&g, &p, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn exact_inclusion_on_triangle() {
        let (g, p) = triangle();
        let probs = swp_exact_small(&g, &p).unwrap();
        for &x in &probs {
            assert_relative_eq!(x, probs[0], epsilon = 1e-15);
        }
        // independent hand expansion of the eight subsets
        let (th, tj) = (0.3f64.tanh(), 0.5f64.tanh());
        let z = 1.0 + 3.0 * th * th * tj + 3.0 * th * th * tj * tj + tj.powi(3);
        let inc = th * th * tj + 2.0 * th * th * tj * tj + tj.powi(3);
        assert_relative_eq!(probs[0], inc / z, max_relative = 1e-14);
        assert_relative_eq!(probs[0], 0.13705, epsilon = 1e-5);
    }

    #[test]
    fn toggles_move_odd_count_by_even_steps() {
        let g = Graph::grid(3, 3, false).unwrap();
        let p = ModelParams::ising_uniform(&g, 0.4, 0.2);
        let mut chain = SwpChain::new(&g, &p, 11).unwrap();
        for _ in 0..2000 {
            let before = chain.state.odd_count as i64;
            chain.step();
            let change = chain.state.odd_count as i64 - before;
            assert!([-2, 0, 2].contains(&change));
            let odd = (0..g.vertex_count())
                .filter(|&v| chain.state.degree[v] % 2 == 1)
                .count();
            assert_eq!(odd, chain.state.odd_count);
        }
    }

    #[test]
    fn incremental_weight_does_not_drift() {
        let g = Graph::grid(3, 3, true).unwrap();
        let p = ModelParams::ising(
            (0..18).map(|e| 0.1 + 0.05 * e as f64).collect(),
            (0..9).map(|v| 0.05 + 0.1 * v as f64).collect(),
        );
        let mut chain = SwpChain::new(&g, &p, 5).unwrap();
        for _ in 0..100_000 {
            chain.step();
        }
        assert!((chain.state.log_weight - chain.recomputed_log_weight()).abs() < 1e-9);
    }

    #[test]
    fn first_move_acceptance() {
        let (g, p) = triangle();
        let expected = (0.3f64.tanh().powi(2) * 0.5f64.tanh()).min(1.0);
        let mut accepted = 0u32;
        let trials = 200_000;
        for seed in 0..trials {
            let mut chain = SwpChain::new(&g, &p, seed as u64).unwrap();
            accepted += u32::from(chain.step().1);
        }
        let rate = accepted as f64 / trials as f64;
        let se = (expected * (1.0 - expected) / trials as f64).sqrt();
        assert!((rate - expected).abs() < 4.0 * se, "{rate} vs {expected}");
    }

    #[test]
    fn vanishing_coupling_suppresses_edge() {
        let g = Graph::cycle(3).unwrap();
        let p = ModelParams::ising(vec![1e-6, 0.5, 0.5], vec![0.3; 3]);
        let est = swp_estimate(&g, &p, 5_000, 100, 1).unwrap();
        assert!(est.p_hat[0] < 1e-3);
        assert!(est.p_hat[1] > 0.01);
    }

    #[test]
    fn estimate_is_reproducible() {
        let (g, p) = triangle();
        let a = swp_estimate(&g, &p, 2_000, 10, 42).unwrap();
        let b = swp_estimate(&g, &p, 2_000, 10, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.steps, 2_010 * 3);
        assert!(a.p_hat.iter().all(|p| (0.0..=1.0).contains(p)));
    }
}
