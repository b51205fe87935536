//! Undirected simple graphs carrying the model topology.
//!
//! Edges are stored with their orientation `(i, j)` as given; the orientation
//! fixes the sign convention of the difference variable `y_e = x_i - x_j`.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Declarative description of a graph, as read from model files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum GraphSpec {
    Grid {
        rows: usize,
        cols: usize,
        #[serde(default)]
        periodic: bool,
    },
    Complete {
        n: usize,
    },
    Edges {
        n: usize,
        edges: Vec<(usize, usize)>,
    },
}

/// A connected graph without self-loops or parallel edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    incidence: Vec<Vec<usize>>,
}

impl Graph {
    /// Validates an explicit edge list.
    pub fn from_edges(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidGraphSpec(
                "graph needs at least one vertex".into(),
            ));
        }
        let mut seen = HashSet::with_capacity(edges.len());
        let mut incidence = vec![Vec::new(); vertex_count];
        for (index, &(i, j)) in edges.iter().enumerate() {
            if i >= vertex_count || j >= vertex_count {
                return Err(Error::VertexOutOfRange(i, j, vertex_count));
            }
            if i == j {
                return Err(Error::SelfLoop(i, j));
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(Error::DuplicateEdge(i, j));
            }
            incidence[i].push(index);
            incidence[j].push(index);
        }
        let graph = Graph {
            vertex_count,
            edges,
            incidence,
        };
        if let Some(v) = graph.first_unreachable() {
            return Err(Error::Disconnected(v));
        }
        Ok(graph)
    }

    /// `rows x cols` square lattice, optionally with periodic boundaries.
    ///
    /// Vertex `(r, c)` has index `r * cols + c`. Horizontal bonds are listed
    /// before vertical ones.
    pub fn grid(rows: usize, cols: usize, periodic: bool) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidGraphSpec(
                "grid needs positive dimensions".into(),
            ));
        }
        let at = |r: usize, c: usize| r * cols + c;
        let mut edges = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push((at(r, c), at(r, c + 1)));
                } else if periodic {
                    edges.push((at(r, c), at(r, 0)));
                }
            }
        }
        for r in 0..rows {
            for c in 0..cols {
                if r + 1 < rows {
                    edges.push((at(r, c), at(r + 1, c)));
                } else if periodic {
                    edges.push((at(r, c), at(0, c)));
                }
            }
        }
        Self::from_edges(rows * cols, edges)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let edges = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .collect();
        Self::from_edges(n, edges)
    }

    pub fn cycle(n: usize) -> Result<Self> {
        let edges = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::from_edges(n, edges)
    }

    pub fn path(n: usize) -> Result<Self> {
        let edges = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_edges(n, edges)
    }

    pub fn from_spec(spec: &GraphSpec) -> Result<Self> {
        match spec {
            GraphSpec::Grid {
                rows,
                cols,
                periodic,
            } => Self::grid(*rows, *cols, *periodic),
            GraphSpec::Complete { n } => Self::complete(*n),
            GraphSpec::Edges { n, edges } => Self::from_edges(*n, edges.clone()),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    /// Indices of the edges incident to `v`.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incidence[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incidence[v].len()
    }

    /// Cycle rank `|E| - |V| + 1` of the connected graph.
    pub fn cycle_rank(&self) -> usize {
        self.edges.len() + 1 - self.vertex_count
    }

    pub fn is_tree(&self) -> bool {
        self.edges.len() + 1 == self.vertex_count
    }

    fn first_unreachable(&self) -> Option<usize> {
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &e in &self.incidence[v] {
                let (i, j) = self.edges[e];
                let w = if i == v { j } else { i };
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.iter().position(|s| !s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_grid_has_two_edges_per_site() {
        let g = Graph::grid(3, 3, true).unwrap();
        assert_eq!(g.vertex_count(), 9);
        assert_eq!(g.edge_count(), 18);
        assert!((0..9).all(|v| g.degree(v) == 4));

        let g = Graph::grid(4, 4, true).unwrap();
        assert_eq!(g.edge_count(), 32);
    }

    #[test]
    fn open_grid_edge_count() {
        let g = Graph::grid(3, 3, false).unwrap();
        assert_eq!(g.edge_count(), 12);
    }

    #[test]
    fn tiny_periodic_grid_doubles_bonds() {
        assert!(matches!(
            Graph::grid(2, 2, true),
            Err(Error::DuplicateEdge(_, _))
        ));
        assert!(matches!(
            Graph::grid(1, 3, true),
            Err(Error::SelfLoop(0, 0))
        ));
    }

    #[test]
    fn complete_graph() {
        let g = Graph::complete(10).unwrap();
        assert_eq!(g.edge_count(), 45);
        assert_eq!(g.cycle_rank(), 36);
    }

    #[test]
    fn rejects_bad_edge_lists() {
        assert_eq!(
            Graph::from_edges(3, vec![(0, 1), (1, 1)]),
            Err(Error::SelfLoop(1, 1))
        );
        assert_eq!(
            Graph::from_edges(3, vec![(0, 1), (1, 2), (1, 0)]),
            Err(Error::DuplicateEdge(1, 0))
        );
        assert_eq!(
            Graph::from_edges(4, vec![(0, 1), (2, 3)]),
            Err(Error::Disconnected(2))
        );
        assert_eq!(
            Graph::from_edges(2, vec![(0, 5)]),
            Err(Error::VertexOutOfRange(0, 5, 2))
        );
    }

    #[test]
    fn spec_round_trip() {
        let spec: GraphSpec =
            serde_json::from_str(r#"{"kind":"grid","rows":3,"cols":4,"periodic":true}"#).unwrap();
        let g = Graph::from_spec(&spec).unwrap();
        assert_eq!(g.edge_count(), 24);
        let spec: GraphSpec =
            serde_json::from_str(r#"{"kind":"edges","n":3,"edges":[[0,1],[1,2]]}"#).unwrap();
        assert!(Graph::from_spec(&spec).unwrap().is_tree());
    }
}
