//! JSON model files.
//!
//! ```json
//! {
//!   "graph": {"kind": "grid", "rows": 4, "cols": 4, "periodic": true},
//!   "model": "ising",
//!   "couplings": {"kind": "halfnormal", "sigma2": 0.25},
//!   "fields": 0.15,
//!   "seed": 7
//! }
//! ```
//!
//! `couplings` and `fields` accept a constant, a per-site array, or a random
//! specification (`halfnormal` with `sigma2`, `uniform` with `min`/`max`).
//! A random specification may carry its own `seed`; otherwise the file-level
//! `seed` is used. Couplings and fields draw from separate streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, GraphSpec};
use crate::model::{ModelKind, ModelParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RandomSpec {
    Halfnormal {
        sigma2: f64,
        #[serde(default)]
        seed: Option<u64>,
    },
    Uniform {
        min: f64,
        max: f64,
        #[serde(default)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamSpec {
    Constant(f64),
    PerSite(Vec<f64>),
    Random(RandomSpec),
}

impl Default for ParamSpec {
    fn default() -> Self {
        ParamSpec::Constant(0.0)
    }
}

/// Stream selector mixed into the seed so couplings and fields differ.
const COUPLING_STREAM: u64 = 0;
const FIELD_STREAM: u64 = 1;

impl ParamSpec {
    /// Expands to `count` values; `seed` is used by random specs without
    /// their own seed.
    pub fn resolve(&self, count: usize, seed: u64, stream: u64) -> Result<Vec<f64>> {
        match self {
            ParamSpec::Constant(x) => Ok(vec![*x; count]),
            ParamSpec::PerSite(v) => {
                if v.len() != count {
                    return Err(Error::InvalidParams(format!(
                        "array of {} values for {count} sites",
                        v.len()
                    )));
                }
                Ok(v.clone())
            }
            ParamSpec::Random(r) => r.sample(count, seed, stream),
        }
    }
}

impl RandomSpec {
    pub fn sample(&self, count: usize, default_seed: u64, stream: u64) -> Result<Vec<f64>> {
        let seed = match self {
            RandomSpec::Halfnormal { seed, .. } | RandomSpec::Uniform { seed, .. } => {
                seed.unwrap_or(default_seed)
            }
        };
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        match *self {
            RandomSpec::Halfnormal { sigma2, .. } => {
                if !(sigma2 >= 0.0) || !sigma2.is_finite() {
                    return Err(Error::InvalidParams(format!(
                        "variance {sigma2} must be >= 0"
                    )));
                }
                let normal = Normal::new(0.0, sigma2.sqrt())
                    .map_err(|e| Error::InvalidParams(e.to_string()))?;
                Ok((0..count).map(|_| normal.sample(&mut rng).abs()).collect())
            }
            RandomSpec::Uniform { min, max, .. } => {
                if !(min <= max) || !min.is_finite() || !max.is_finite() {
                    return Err(Error::InvalidParams(format!("empty range [{min}, {max}]")));
                }
                Ok((0..count)
                    .map(|_| {
                        let u: f64 = rng.random();
                        min + (max - min) * u
                    })
                    .collect())
            }
        }
    }
}

fn default_q() -> usize {
    2
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub graph: GraphSpec,
    pub model: ModelKind,
    #[serde(default = "default_q")]
    pub q: usize,
    pub couplings: ParamSpec,
    #[serde(default)]
    pub fields: ParamSpec,
    #[serde(default)]
    pub seed: u64,
}

impl ModelFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidParams(format!("model file: {e}")))
    }

    /// Builds the graph and parameters with the file's own seed.
    pub fn build(&self) -> Result<(Graph, ModelParams)> {
        self.build_with_seed(self.seed)
    }

    pub fn build_with_seed(&self, seed: u64) -> Result<(Graph, ModelParams)> {
        let graph = Graph::from_spec(&self.graph)?;
        let params = self.params_for(&graph, &self.couplings, seed)?;
        Ok((graph, params))
    }

    /// Parameters on `graph` with `couplings` overriding the file's coupling spec.
    pub fn params_for(
        &self,
        graph: &Graph,
        couplings: &ParamSpec,
        seed: u64,
    ) -> Result<ModelParams> {
        let couplings = couplings.resolve(graph.edge_count(), seed, COUPLING_STREAM)?;
        let fields = self
            .fields
            .resolve(graph.vertex_count(), seed, FIELD_STREAM)?;
        let params = match self.model {
            ModelKind::Ising => {
                if self.q != 2 {
                    return Err(Error::Mode(format!(
                        "Ising model requires q = 2, got {}",
                        self.q
                    )));
                }
                ModelParams::ising(couplings, fields)
            }
            ModelKind::Potts => ModelParams {
                kind: ModelKind::Potts,
                q: self.q,
                couplings,
                fields,
            },
        };
        params.validate(graph)?;
        Ok(params)
    }
}
