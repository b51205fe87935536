//! Loopy sum-product belief propagation on the primal and dual factor graphs.
//!
//! Every factor here evaluates its table on a signed sum of its scope,
//! `T(Σ c_k x_k mod q)` with `c_k = ±1`. That covers the three kinds used:
//! unary factors (`φ_v`, `ψ̃_e`), pairwise difference factors
//! (`ψ_e(x_i - x_j)`) and the dual vertex factors `φ̃_v(x̃_v)`. The equality
//! and zero-sum indicator nodes of the normal realization are folded into
//! these reduced graphs, which have the same marginals.
//!
//! Factor-to-variable messages of a sum factor need the distribution of the
//! other terms' sum: a circular convolution, computed as a product in the
//! DFT domain with leave-one-out prefix/suffix products.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::dft;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{Domain, FactorSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    Unary,
    PairwiseDifference,
    Sum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub kind: FactorKind,
    pub scope: Vec<usize>,
    /// `+1` or `-1` per scope entry.
    pub coefficients: Vec<i8>,
    pub table: Vec<f64>,
}

/// Bipartite variable/factor graph with per-edge and per-vertex lookup of
/// the factor whose belief is that site's marginal.
#[derive(Debug, Clone)]
pub struct FactorGraph {
    pub q: usize,
    pub domain: Domain,
    pub variable_count: usize,
    pub factors: Vec<Factor>,
    /// Factor whose belief is the marginal of graph edge `e`.
    pub edge_factor: Vec<usize>,
    /// Factor whose belief is the marginal of graph vertex `v`.
    pub vertex_factor: Vec<usize>,
    /// For each variable, the `(factor, slot)` pairs it appears in.
    adjacency: Vec<Vec<(usize, usize)>>,
    /// Start of each factor's slots in the flat message arrays.
    offsets: Vec<usize>,
}

impl FactorGraph {
    fn new(
        q: usize,
        domain: Domain,
        variable_count: usize,
        factors: Vec<Factor>,
        edge_factor: Vec<usize>,
        vertex_factor: Vec<usize>,
    ) -> Self {
        let mut adjacency = vec![Vec::new(); variable_count];
        let mut offsets = Vec::with_capacity(factors.len() + 1);
        let mut slot_total = 0;
        for (f, factor) in factors.iter().enumerate() {
            offsets.push(slot_total);
            slot_total += factor.scope.len();
            for (slot, &v) in factor.scope.iter().enumerate() {
                adjacency[v].push((f, slot));
            }
        }
        offsets.push(slot_total);
        FactorGraph {
            q,
            domain,
            variable_count,
            factors,
            edge_factor,
            vertex_factor,
            adjacency,
            offsets,
        }
    }

    pub fn count(&self, kind: FactorKind) -> usize {
        self.factors.iter().filter(|f| f.kind == kind).count()
    }

    fn slot_count(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    /// True when the bipartite variable/factor graph has no cycles.
    pub fn is_acyclic(&self) -> bool {
        let n = self.variable_count + self.factors.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for (f, factor) in self.factors.iter().enumerate() {
            for &v in &factor.scope {
                let a = find(&mut parent, v);
                let b = find(&mut parent, self.variable_count + f);
                if a == b {
                    return false;
                }
                parent[a] = b;
            }
        }
        true
    }
}

/// Variables are the vertices; one pairwise factor per edge, one unary factor
/// per vertex.
pub fn build_primal_fg(graph: &Graph, factors: &FactorSet) -> Result<FactorGraph> {
    if factors.domain != Domain::Primal {
        return Err(Error::Mode(
            "primal factor graph needs primal factors".into(),
        ));
    }
    factors.check_graph(graph)?;
    let real = factors.to_real()?;
    let mut fg_factors = Vec::with_capacity(graph.edge_count() + graph.vertex_count());
    for (&(i, j), table) in graph.edges().iter().zip(real.edges) {
        fg_factors.push(Factor {
            kind: FactorKind::PairwiseDifference,
            scope: vec![i, j],
            coefficients: vec![1, -1],
            table,
        });
    }
    for (v, table) in real.vertices.into_iter().enumerate() {
        fg_factors.push(Factor {
            kind: FactorKind::Unary,
            scope: vec![v],
            coefficients: vec![1],
            table,
        });
    }
    let m = graph.edge_count();
    Ok(FactorGraph::new(
        factors.q,
        Domain::Primal,
        graph.vertex_count(),
        fg_factors,
        (0..m).collect(),
        (m..m + graph.vertex_count()).collect(),
    ))
}

/// Variables are the edges; one unary factor per edge and one sum factor per
/// vertex over its incident edges. Requires nonnegative dual tables.
pub fn build_dual_fg(graph: &Graph, dual_factors: &FactorSet) -> Result<FactorGraph> {
    if dual_factors.domain != Domain::Dual {
        return Err(Error::Mode("dual factor graph needs dual factors".into()));
    }
    dual_factors.check_graph(graph)?;
    let real = dual_factors.to_real()?;
    if real.has_negative_entry() {
        return Err(Error::Domain(
            "dual factors take negative values, so the dual model has no probability \
             distribution; only signed marginal functions exist"
                .into(),
        ));
    }
    let m = graph.edge_count();
    let mut fg_factors = Vec::with_capacity(m + graph.vertex_count());
    for (e, table) in real.edges.into_iter().enumerate() {
        fg_factors.push(Factor {
            kind: FactorKind::Unary,
            scope: vec![e],
            coefficients: vec![1],
            table,
        });
    }
    for (v, table) in real.vertices.into_iter().enumerate() {
        let scope = graph.incident(v).to_vec();
        let coefficients = scope
            .iter()
            .map(|&e| if graph.edge(e).1 == v { 1 } else { -1 })
            .collect();
        fg_factors.push(Factor {
            kind: FactorKind::Sum,
            scope,
            coefficients,
            table,
        });
    }
    Ok(FactorGraph::new(
        dual_factors.q,
        Domain::Dual,
        m,
        fg_factors,
        (0..m).collect(),
        (m..m + graph.vertex_count()).collect(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BpConfig {
    /// Weight of the previous message in each update, in `[0, 1)`.
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// Random positive initial messages when set; uniform otherwise.
    pub seed: Option<u64>,
}

impl Default for BpConfig {
    fn default() -> Self {
        BpConfig {
            damping: 0.5,
            tol: 1e-9,
            max_iter: 10_000,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BpReport {
    pub domain: Domain,
    pub variable_beliefs: Vec<Vec<f64>>,
    /// Belief of each factor over its label `Σ c_k x_k`.
    pub factor_beliefs: Vec<Vec<f64>>,
    pub edge_marginals: Vec<Vec<f64>>,
    pub vertex_marginals: Vec<Vec<f64>>,
    pub converged: bool,
    pub iterations: usize,
    pub final_delta: f64,
}

fn normalize(v: &mut [f64]) -> Result<()> {
    let s: f64 = v.iter().sum();
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Numeric(format!("message with total mass {s}")));
    }
    v.iter_mut().for_each(|x| *x /= s);
    Ok(())
}

/// Distribution of `c·x` given the distribution of `x`.
fn oriented(message: &[f64], coefficient: i8) -> Vec<f64> {
    let q = message.len();
    if coefficient > 0 {
        message.to_vec()
    } else {
        (0..q).map(|y| message[(q - y) % q]).collect()
    }
}

/// Messages from a sum-kind factor to each slot, given the incoming
/// variable-to-factor messages.
pub fn sum_factor_messages(
    table: &[f64],
    coefficients: &[i8],
    incoming: &[Vec<f64>],
) -> Vec<Vec<f64>> {
    let q = table.len();
    let d = incoming.len();
    let spectra: Vec<Vec<Complex64>> = incoming
        .iter()
        .zip(coefficients)
        .map(|(m, &c)| dft::forward_real(&oriented(m, c)))
        .collect();
    let one = vec![Complex64::new(1.0, 0.0); q];
    let mut prefix = Vec::with_capacity(d + 1);
    prefix.push(one.clone());
    for s in &spectra {
        let last: &Vec<Complex64> = prefix.last().unwrap();
        prefix.push(last.iter().zip(s).map(|(a, b)| a * b).collect());
    }
    let mut suffix = vec![one; d + 1];
    for k in (0..d).rev() {
        suffix[k] = suffix[k + 1]
            .iter()
            .zip(&spectra[k])
            .map(|(a, b)| a * b)
            .collect();
    }
    (0..d)
        .map(|k| {
            let others: Vec<Complex64> = prefix[k]
                .iter()
                .zip(&suffix[k + 1])
                .map(|(a, b)| a * b)
                .collect();
            let dist = dft::inverse(&others);
            let ck = coefficients[k];
            (0..q)
                .map(|x| {
                    let cx = if ck > 0 { x } else { (q - x) % q };
                    let v: f64 = (0..q).map(|y| table[(cx + y) % q] * dist[y].re).sum();
                    v.max(0.0)
                })
                .collect()
        })
        .collect()
}

/// Factor belief over the label `Σ c_k x_k`.
fn sum_factor_belief(table: &[f64], coefficients: &[i8], incoming: &[Vec<f64>]) -> Vec<f64> {
    let q = table.len();
    let mut spectrum = vec![Complex64::new(1.0, 0.0); q];
    for (m, &c) in incoming.iter().zip(coefficients) {
        for (s, z) in spectrum.iter_mut().zip(dft::forward_real(&oriented(m, c))) {
            *s *= z;
        }
    }
    let dist = dft::inverse(&spectrum);
    table
        .iter()
        .zip(dist)
        .map(|(t, p)| (t * p.re).max(0.0))
        .collect()
}

/// Message state of one BP run.
pub struct BeliefPropagation<'a> {
    fg: &'a FactorGraph,
    damping: f64,
    /// factor-to-variable, indexed by flat slot
    to_var: Vec<Vec<f64>>,
    /// variable-to-factor, indexed by flat slot
    to_factor: Vec<Vec<f64>>,
}

impl<'a> BeliefPropagation<'a> {
    pub fn new(fg: &'a FactorGraph, config: &BpConfig) -> Result<Self> {
        if !(0.0..1.0).contains(&config.damping) {
            return Err(Error::InvalidParams(format!(
                "damping {} outside [0, 1)",
                config.damping
            )));
        }
        let q = fg.q;
        let slots = fg.slot_count();
        let to_var = match config.seed {
            None => vec![vec![1.0 / q as f64; q]; slots],
            Some(seed) => {
                let mut rng = ChaCha20Rng::seed_from_u64(seed);
                (0..slots)
                    .map(|_| {
                        let mut m: Vec<f64> = (0..q).map(|_| rng.random_range(0.1..1.0)).collect();
                        normalize(&mut m).map(|_| m)
                    })
                    .collect::<Result<_>>()?
            }
        };
        let mut bp = BeliefPropagation {
            fg,
            damping: config.damping,
            to_var,
            to_factor: vec![vec![1.0 / q as f64; q]; slots],
        };
        bp.update_variable_messages()?;
        Ok(bp)
    }

    fn update_variable_messages(&mut self) -> Result<()> {
        let q = self.fg.q;
        for adj in &self.fg.adjacency {
            for &(f, slot) in adj {
                let mut m = vec![1.0; q];
                for &(g, other) in adj {
                    if (g, other) == (f, slot) {
                        continue;
                    }
                    let incoming = &self.to_var[self.fg.offsets[g] + other];
                    m.iter_mut().zip(incoming).for_each(|(a, b)| *a *= b);
                }
                normalize(&mut m)?;
                self.to_factor[self.fg.offsets[f] + slot] = m;
            }
        }
        Ok(())
    }

    /// One flooding iteration; returns the largest change of any
    /// factor-to-variable message.
    pub fn step(&mut self) -> Result<f64> {
        let mut delta: f64 = 0.0;
        for (f, factor) in self.fg.factors.iter().enumerate() {
            let start = self.fg.offsets[f];
            let end = self.fg.offsets[f + 1];
            let outgoing = sum_factor_messages(
                &factor.table,
                &factor.coefficients,
                &self.to_factor[start..end],
            );
            for (slot, mut m) in outgoing.into_iter().enumerate() {
                normalize(&mut m)?;
                let old = &mut self.to_var[start + slot];
                for (o, n) in old.iter_mut().zip(&m) {
                    let updated = (1.0 - self.damping) * n + self.damping * *o;
                    delta = delta.max((updated - *o).abs());
                    *o = updated;
                }
                normalize(old)?;
            }
        }
        self.update_variable_messages()?;
        Ok(delta)
    }

    pub fn messages_to_variables(&self) -> &[Vec<f64>] {
        &self.to_var
    }

    pub fn variable_beliefs(&self) -> Result<Vec<Vec<f64>>> {
        self.fg
            .adjacency
            .iter()
            .map(|adj| {
                let mut b = vec![1.0; self.fg.q];
                for &(f, slot) in adj {
                    let m = &self.to_var[self.fg.offsets[f] + slot];
                    b.iter_mut().zip(m).for_each(|(a, x)| *a *= x);
                }
                normalize(&mut b)?;
                Ok(b)
            })
            .collect()
    }

    pub fn factor_beliefs(&self) -> Result<Vec<Vec<f64>>> {
        self.fg
            .factors
            .iter()
            .enumerate()
            .map(|(f, factor)| {
                let incoming = &self.to_factor[self.fg.offsets[f]..self.fg.offsets[f + 1]];
                let mut b = sum_factor_belief(&factor.table, &factor.coefficients, incoming);
                normalize(&mut b)?;
                Ok(b)
            })
            .collect()
    }
}

/// Flooding sum-product until the largest message change is at most `tol`.
/// Hitting `max_iter` is reported through `converged = false`.
pub fn run_bp(fg: &FactorGraph, config: &BpConfig) -> Result<BpReport> {
    let mut bp = BeliefPropagation::new(fg, config)?;
    let mut iterations = 0;
    let mut final_delta = f64::INFINITY;
    let mut converged = false;
    while iterations < config.max_iter {
        final_delta = bp.step()?;
        iterations += 1;
        if final_delta <= config.tol {
            converged = true;
            break;
        }
    }
    let factor_beliefs = bp.factor_beliefs()?;
    let pick = |sites: &[usize]| sites.iter().map(|&f| factor_beliefs[f].clone()).collect();
    Ok(BpReport {
        domain: fg.domain,
        variable_beliefs: bp.variable_beliefs()?,
        edge_marginals: pick(&fg.edge_factor),
        vertex_marginals: pick(&fg.vertex_factor),
        factor_beliefs,
        converged,
        iterations,
        final_delta,
    })
}

/// Per-edge beliefs: of `y_e` in the primal domain, of `ỹ_e` in the dual.
pub fn bp_edge_marginals(report: &BpReport, domain: Domain) -> Result<Vec<Vec<f64>>> {
    if report.domain != domain {
        return Err(Error::Mode(format!(
            "report is from the {} domain, not {}",
            report.domain.as_str(),
            domain.as_str()
        )));
    }
    Ok(report.edge_marginals.clone())
}
