//! Brute-force enumeration in either domain.
//!
//! The primal domain enumerates vertex assignments (`q^N` states); the dual
//! domain enumerates edge assignments (`q^|E|` states). Both feed the same
//! accumulation, so partition functions, marginals and extrinsic vectors
//! share one code path.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::model::{difference, dual_vertex_labels, Domain, FactorSet, RealFactors};
use crate::sum::CompensatedSum;

/// Default cap on the number of enumerated states.
pub const DEFAULT_BUDGET: u64 = 1 << 24;

/// Partition function and normalized marginals from full enumeration.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    pub domain: Domain,
    pub partition: f64,
    /// Marginal of `y_e` (primal) or `ỹ_e` (dual), one vector per edge.
    pub edge_marginals: Vec<Vec<f64>>,
    /// Marginal of `x_v` (primal) or `x̃_v` (dual), one vector per vertex.
    pub vertex_marginals: Vec<Vec<f64>>,
    /// Set when some marginal entry is negative, i.e. the dual "marginals"
    /// are signed marginal functions rather than probabilities.
    pub signed: bool,
}

/// Extrinsic vector `S_e` (or `S̃_e`): the partition function with edge `e`
/// clamped to each symbol and its own factor left out.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtrinsicVector {
    pub edge: usize,
    pub domain: Domain,
    pub values: Vec<f64>,
}

fn state_count(q: usize, free: usize, budget: u64) -> Result<()> {
    let states = (q as f64).powi(free as i32);
    if states > budget as f64 {
        return Err(Error::BudgetExceeded { states, budget });
    }
    Ok(())
}

/// Calls `visit(edge_labels, vertex_labels)` once per configuration of the
/// free variables of `domain`, in lexicographic order.
fn for_each_configuration<F>(
    graph: &Graph,
    q: usize,
    domain: Domain,
    budget: u64,
    mut visit: F,
) -> Result<()>
where
    F: FnMut(&[usize], &[usize]),
{
    let free = match domain {
        Domain::Primal => graph.vertex_count(),
        Domain::Dual => graph.edge_count(),
    };
    state_count(q, free, budget)?;
    let mut digits = vec![0usize; free];
    let mut edge_labels = vec![0usize; graph.edge_count()];
    let mut vertex_labels = vec![0usize; graph.vertex_count()];
    loop {
        match domain {
            Domain::Primal => {
                for (label, &(i, j)) in edge_labels.iter_mut().zip(graph.edges()) {
                    *label = difference(digits[i], digits[j], q);
                }
                vertex_labels.copy_from_slice(&digits);
            }
            Domain::Dual => {
                edge_labels.copy_from_slice(&digits);
                dual_vertex_labels(graph, &digits, q, &mut vertex_labels);
            }
        }
        visit(&edge_labels, &vertex_labels);

        // odometer increment
        let mut pos = 0;
        loop {
            if pos == free {
                return Ok(());
            }
            digits[pos] += 1;
            if digits[pos] < q {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
    }
}

fn real_factors(graph: &Graph, factors: &FactorSet, domain: Domain) -> Result<RealFactors> {
    if factors.domain != domain {
        return Err(Error::Mode(format!(
            "expected {} factors, got {}",
            domain.as_str(),
            factors.domain.as_str()
        )));
    }
    factors.check_graph(graph)?;
    factors.to_real()
}

fn check_partition(z: f64) -> Result<f64> {
    if z > 0.0 && z.is_finite() {
        Ok(z)
    } else {
        Err(Error::Degenerate(z))
    }
}

fn enumerate(graph: &Graph, f: &RealFactors, budget: u64) -> Result<ExactResult> {
    let q = f.q;
    let mut z = CompensatedSum::new();
    let mut edge_acc = vec![vec![CompensatedSum::new(); q]; graph.edge_count()];
    let mut vertex_acc = vec![vec![CompensatedSum::new(); q]; graph.vertex_count()];
    for_each_configuration(graph, q, f.domain, budget, |ys, xs| {
        let w = ys
            .iter()
            .zip(&f.edges)
            .map(|(&y, t)| t[y])
            .chain(xs.iter().zip(&f.vertices).map(|(&x, t)| t[x]))
            .product::<f64>();
        if w == 0.0 {
            return;
        }
        z.add(w);
        for (acc, &y) in edge_acc.iter_mut().zip(ys) {
            acc[y].add(w);
        }
        for (acc, &x) in vertex_acc.iter_mut().zip(xs) {
            acc[x].add(w);
        }
    })?;
    let z = check_partition(z.value())?;
    let normalize = |acc: Vec<Vec<CompensatedSum>>| -> Vec<Vec<f64>> {
        acc.into_iter()
            .map(|row| row.iter().map(|s| s.value() / z).collect())
            .collect()
    };
    let edge_marginals = normalize(edge_acc);
    let vertex_marginals = normalize(vertex_acc);
    let signed = edge_marginals
        .iter()
        .chain(&vertex_marginals)
        .flatten()
        .any(|&p| p < 0.0);
    Ok(ExactResult {
        domain: f.domain,
        partition: z,
        edge_marginals,
        vertex_marginals,
        signed,
    })
}

/// `Z_p` and primal marginals over all `q^N` vertex assignments.
pub fn primal_exact(graph: &Graph, factors: &FactorSet, budget: u64) -> Result<ExactResult> {
    let f = real_factors(graph, factors, Domain::Primal)?;
    enumerate(graph, &f, budget)
}

/// `Z_d` and dual marginal functions over all `q^|E|` edge assignments.
pub fn dual_exact(graph: &Graph, dual_factors: &FactorSet, budget: u64) -> Result<ExactResult> {
    let f = real_factors(graph, dual_factors, Domain::Dual)?;
    enumerate(graph, &f, budget)
}

/// Dispatches on the domain of the factor set.
pub fn exact(graph: &Graph, factors: &FactorSet, budget: u64) -> Result<ExactResult> {
    match factors.domain {
        Domain::Primal => primal_exact(graph, factors, budget),
        Domain::Dual => dual_exact(graph, factors, budget),
    }
}

/// Extrinsic vector of edge `e` in the domain of `factors`.
pub fn extrinsic(
    graph: &Graph,
    factors: &FactorSet,
    e: usize,
    budget: u64,
) -> Result<ExtrinsicVector> {
    if e >= graph.edge_count() {
        return Err(Error::InvalidParams(format!("edge index {e} out of range")));
    }
    let f = real_factors(graph, factors, factors.domain)?;
    let mut acc = vec![CompensatedSum::new(); f.q];
    for_each_configuration(graph, f.q, f.domain, budget, |ys, xs| {
        let w = ys
            .iter()
            .zip(&f.edges)
            .enumerate()
            .filter(|&(k, _)| k != e)
            .map(|(_, (&y, t))| t[y])
            .chain(xs.iter().zip(&f.vertices).map(|(&x, t)| t[x]))
            .product::<f64>();
        acc[ys[e]].add(w);
    })?;
    Ok(ExtrinsicVector {
        edge: e,
        domain: f.domain,
        values: acc.iter().map(CompensatedSum::value).collect(),
    })
}

/// Measured ratio `Z_d / Z_p` for the given primal factors.
pub fn duality_scale(graph: &Graph, primal_factors: &FactorSet, budget: u64) -> Result<f64> {
    let zp = primal_exact(graph, primal_factors, budget)?.partition;
    let zd = dual_exact(graph, &primal_factors.dual(), budget)?.partition;
    Ok(zd / zp)
}
