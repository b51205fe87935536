//! Ising and Potts models, their local factors, and factor transforms.
//!
//! Inverse temperature is folded into the parameters: couplings are `βJ_e`
//! and fields are `βH_v`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dft;
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Ising,
    Potts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Primal,
    Dual,
}

impl Domain {
    pub fn flip(self) -> Domain {
        match self {
            Domain::Primal => Domain::Dual,
            Domain::Dual => Domain::Primal,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Domain::Primal => "primal",
            Domain::Dual => "dual",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Attachment {
    Edge(usize),
    Vertex(usize),
}

/// Per-edge couplings and per-vertex fields of a model on a fixed graph.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub kind: ModelKind,
    pub q: usize,
    pub couplings: Vec<f64>,
    pub fields: Vec<f64>,
}

impl ModelParams {
    pub fn ising(couplings: Vec<f64>, fields: Vec<f64>) -> Self {
        ModelParams {
            kind: ModelKind::Ising,
            q: 2,
            couplings,
            fields,
        }
    }

    /// Homogeneous Ising model.
    pub fn ising_uniform(graph: &Graph, coupling: f64, field: f64) -> Self {
        Self::ising(
            vec![coupling; graph.edge_count()],
            vec![field; graph.vertex_count()],
        )
    }

    /// Zero-field Potts model.
    pub fn potts(q: usize, couplings: Vec<f64>, vertex_count: usize) -> Self {
        ModelParams {
            kind: ModelKind::Potts,
            q,
            couplings,
            fields: vec![0.0; vertex_count],
        }
    }

    pub fn validate(&self, graph: &Graph) -> Result<()> {
        if self.q < 2 {
            return Err(Error::InvalidParams(format!(
                "alphabet order {} < 2",
                self.q
            )));
        }
        if self.kind == ModelKind::Ising && self.q != 2 {
            return Err(Error::Mode(format!(
                "Ising model requires q = 2, got {}",
                self.q
            )));
        }
        if self.couplings.len() != graph.edge_count() {
            return Err(Error::InvalidParams(format!(
                "{} couplings for {} edges",
                self.couplings.len(),
                graph.edge_count()
            )));
        }
        if self.fields.len() != graph.vertex_count() {
            return Err(Error::InvalidParams(format!(
                "{} fields for {} vertices",
                self.fields.len(),
                graph.vertex_count()
            )));
        }
        if let Some(x) = self
            .couplings
            .iter()
            .chain(&self.fields)
            .find(|x| !x.is_finite())
        {
            return Err(Error::InvalidParams(format!("non-finite parameter {x}")));
        }
        Ok(())
    }

    pub fn is_ferromagnetic(&self) -> bool {
        self.couplings.iter().all(|&j| j >= 0.0)
    }

    pub fn has_nonnegative_field(&self) -> bool {
        self.fields.iter().all(|&h| h >= 0.0)
    }

    /// Primal factors for this model kind.
    pub fn factors(&self, graph: &Graph) -> Result<FactorSet> {
        match self.kind {
            ModelKind::Ising => ising_factors(graph, self),
            ModelKind::Potts => potts_factors(graph, self),
        }
    }
}

/// A length-q weight table attached to an edge or a vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorTable {
    pub values: Vec<Complex64>,
    pub domain: Domain,
    pub attachment: Attachment,
}

impl FactorTable {
    pub fn real(values: &[f64], domain: Domain, attachment: Attachment) -> Self {
        FactorTable {
            values: values.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
            domain,
            attachment,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    /// The table as real numbers; fails if any imaginary part survived truncation.
    pub fn to_real(&self) -> Result<Vec<f64>> {
        dft::real_parts(&self.values, 0.0).map_err(|(index, imag)| Error::NotReal { index, imag })
    }
}

/// q-point DFT of a factor table. Imaginary parts below 1e-12 are dropped so
/// that tables with real transforms come out exactly real, and entries at
/// rounding level are set to zero.
pub fn dft_q(table: &FactorTable) -> FactorTable {
    let mut values = if table.is_real() {
        let re: Vec<f64> = table.values.iter().map(|v| v.re).collect();
        dft::forward_real(&re)
    } else {
        dft::forward(&table.values)
    };
    dft::truncate_imaginary(&mut values);
    dft::flush_rounding(&mut values);
    FactorTable {
        values,
        domain: table.domain.flip(),
        attachment: table.attachment,
    }
}

/// All local factors of a model in one domain.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorSet {
    pub q: usize,
    pub domain: Domain,
    pub edges: Vec<FactorTable>,
    pub vertices: Vec<FactorTable>,
}

impl FactorSet {
    /// Builds a factor set from explicit real tables.
    pub fn from_real(
        q: usize,
        domain: Domain,
        edges: &[Vec<f64>],
        vertices: &[Vec<f64>],
    ) -> Result<Self> {
        let check = |t: &Vec<f64>| -> Result<()> {
            if t.len() != q {
                return Err(Error::InvalidParams(format!(
                    "factor table of length {} for q = {q}",
                    t.len()
                )));
            }
            if domain == Domain::Primal && t.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
                return Err(Error::InvalidParams(
                    "primal factor tables must be finite and nonnegative".into(),
                ));
            }
            Ok(())
        };
        for t in edges.iter().chain(vertices) {
            check(t)?;
        }
        Ok(FactorSet {
            q,
            domain,
            edges: edges
                .iter()
                .enumerate()
                .map(|(e, t)| FactorTable::real(t, domain, Attachment::Edge(e)))
                .collect(),
            vertices: vertices
                .iter()
                .enumerate()
                .map(|(v, t)| FactorTable::real(t, domain, Attachment::Vertex(v)))
                .collect(),
        })
    }

    /// Every table replaced by its DFT.
    pub fn dual(&self) -> FactorSet {
        FactorSet {
            q: self.q,
            domain: self.domain.flip(),
            edges: self.edges.iter().map(dft_q).collect(),
            vertices: self.vertices.iter().map(dft_q).collect(),
        }
    }

    pub fn to_real(&self) -> Result<RealFactors> {
        Ok(RealFactors {
            q: self.q,
            domain: self.domain,
            edges: self
                .edges
                .iter()
                .map(FactorTable::to_real)
                .collect::<Result<_>>()?,
            vertices: self
                .vertices
                .iter()
                .map(FactorTable::to_real)
                .collect::<Result<_>>()?,
        })
    }

    pub fn check_graph(&self, graph: &Graph) -> Result<()> {
        if self.edges.len() != graph.edge_count() || self.vertices.len() != graph.vertex_count() {
            return Err(Error::InvalidParams(format!(
                "factor set has {} edge and {} vertex tables; graph has {} edges and {} vertices",
                self.edges.len(),
                self.vertices.len(),
                graph.edge_count(),
                graph.vertex_count()
            )));
        }
        if let Some(t) = self
            .edges
            .iter()
            .chain(&self.vertices)
            .find(|t| t.len() != self.q)
        {
            return Err(Error::InvalidParams(format!(
                "table {:?} has length {} for q = {}",
                t.attachment,
                t.len(),
                self.q
            )));
        }
        Ok(())
    }
}

/// Real-valued view of a factor set; the form the inference engines consume.
#[derive(Debug, Clone, PartialEq)]
pub struct RealFactors {
    pub q: usize,
    pub domain: Domain,
    pub edges: Vec<Vec<f64>>,
    pub vertices: Vec<Vec<f64>>,
}

impl RealFactors {
    pub fn has_negative_entry(&self) -> bool {
        self.edges
            .iter()
            .chain(&self.vertices)
            .flatten()
            .any(|&v| v < 0.0)
    }
}

/// `ψ_e = [e^{βJ}, e^{-βJ}]`, `φ_v = [e^{βH}, e^{-βH}]`.
pub fn ising_factors(graph: &Graph, params: &ModelParams) -> Result<FactorSet> {
    if params.q != 2 {
        return Err(Error::Mode(format!(
            "Ising factors need q = 2, got {}",
            params.q
        )));
    }
    params.validate(graph)?;
    let pair = |t: f64| vec![t.exp(), (-t).exp()];
    let edges: Vec<Vec<f64>> = params.couplings.iter().map(|&j| pair(j)).collect();
    let vertices: Vec<Vec<f64>> = params.fields.iter().map(|&h| pair(h)).collect();
    FactorSet::from_real(2, Domain::Primal, &edges, &vertices)
}

/// `ψ_e = [e^{βJ}, 1, ..., 1]` with all-ones vertex tables.
pub fn potts_factors(graph: &Graph, params: &ModelParams) -> Result<FactorSet> {
    params.validate(graph)?;
    if params.fields.iter().any(|&h| h != 0.0) {
        return Err(Error::Unsupported(
            "Potts models are only supported without an external field".into(),
        ));
    }
    let q = params.q;
    let edges: Vec<Vec<f64>> = params
        .couplings
        .iter()
        .map(|&j| {
            let mut t = vec![1.0; q];
            t[0] = j.exp();
            t
        })
        .collect();
    let vertices = vec![vec![1.0; q]; graph.vertex_count()];
    FactorSet::from_real(q, Domain::Primal, &edges, &vertices)
}

/// Label of primal edge `(i, j)`: `y = x_i - x_j mod q`.
#[inline]
pub fn difference(xi: usize, xj: usize, q: usize) -> usize {
    (xi + q - xj) % q
}

/// Dual vertex labels: for every vertex, the sum of the labels of edges
/// entering it minus the labels of edges leaving it, mod q. Edge `(i, j)`
/// leaves `i` and enters `j`. For q = 2 this is the plain sum.
pub fn dual_vertex_labels(graph: &Graph, edge_labels: &[usize], q: usize, out: &mut [usize]) {
    out.iter_mut().for_each(|x| *x = 0);
    for (&(i, j), &y) in graph.edges().iter().zip(edge_labels) {
        out[i] = (out[i] + q - y) % q;
        out[j] = (out[j] + y) % q;
    }
}

/// A full assignment of the free variables of one domain: vertices in the
/// primal domain, edges in the dual domain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub domain: Domain,
    pub assignment: Vec<usize>,
}

impl Configuration {
    pub fn primal(assignment: Vec<usize>) -> Self {
        Configuration {
            domain: Domain::Primal,
            assignment,
        }
    }

    pub fn dual(assignment: Vec<usize>) -> Self {
        Configuration {
            domain: Domain::Dual,
            assignment,
        }
    }

    pub fn validate(&self, graph: &Graph, q: usize) -> Result<()> {
        let expected = match self.domain {
            Domain::Primal => graph.vertex_count(),
            Domain::Dual => graph.edge_count(),
        };
        if self.assignment.len() != expected {
            return Err(Error::InvalidParams(format!(
                "{} configuration has length {}, expected {expected}",
                self.domain.as_str(),
                self.assignment.len()
            )));
        }
        if let Some(a) = self.assignment.iter().find(|&&a| a >= q) {
            return Err(Error::InvalidParams(format!(
                "symbol {a} outside alphabet of size {q}"
            )));
        }
        Ok(())
    }

    /// `y_e` (primal) or `ỹ_e` (dual) for every edge.
    pub fn edge_labels(&self, graph: &Graph, q: usize) -> Vec<usize> {
        match self.domain {
            Domain::Primal => graph
                .edges()
                .iter()
                .map(|&(i, j)| difference(self.assignment[i], self.assignment[j], q))
                .collect(),
            Domain::Dual => self.assignment.clone(),
        }
    }

    /// `x_v` (primal) or `x̃_v` (dual) for every vertex.
    pub fn vertex_labels(&self, graph: &Graph, q: usize) -> Vec<usize> {
        match self.domain {
            Domain::Primal => self.assignment.clone(),
            Domain::Dual => {
                let mut out = vec![0; graph.vertex_count()];
                dual_vertex_labels(graph, &self.assignment, q, &mut out);
                out
            }
        }
    }
}

/// Dimensionless energy `βH(x)` of a primal configuration.
pub fn hamiltonian(config: &Configuration, graph: &Graph, params: &ModelParams) -> Result<f64> {
    if config.domain != Domain::Primal {
        return Err(Error::Mode(
            "the Hamiltonian is defined on primal configurations".into(),
        ));
    }
    params.validate(graph)?;
    config.validate(graph, params.q)?;
    let x = &config.assignment;
    let delta = |a: usize| if a == 0 { 1.0 } else { 0.0 };
    let energy = match params.kind {
        ModelKind::Ising => {
            let bonds: f64 = graph
                .edges()
                .iter()
                .zip(&params.couplings)
                .map(|(&(i, j), &jc)| jc * (2.0 * delta(difference(x[i], x[j], 2)) - 1.0))
                .sum();
            let sites: f64 = x
                .iter()
                .zip(&params.fields)
                .map(|(&xv, &h)| h * (2.0 * delta(xv) - 1.0))
                .sum();
            -bonds - sites
        }
        ModelKind::Potts => -graph
            .edges()
            .iter()
            .zip(&params.couplings)
            .map(|(&(i, j), &jc)| jc * delta(difference(x[i], x[j], params.q)))
            .sum::<f64>(),
    };
    Ok(energy)
}
