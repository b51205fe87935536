//! Exact, message-passing and Monte Carlo marginals of Ising and Potts
//! models in the primal and Fourier-dual normal factor graph, and the local
//! mappings between them.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bp;
pub mod config;
pub mod dft;
pub mod error;
pub mod exact;
pub mod experiment;
pub mod graph;
pub mod mapping;
pub mod model;
pub mod onsager;
pub mod output;
pub mod sum;
pub mod swp;

pub use bp::{build_dual_fg, build_primal_fg, run_bp, BpConfig, BpReport, FactorGraph};
pub use config::{ModelFile, ParamSpec, RandomSpec};
pub use error::{Error, Result};
pub use exact::{
    dual_exact, duality_scale, exact, extrinsic, primal_exact, ExactResult, DEFAULT_BUDGET,
};
pub use experiment::{
    emit_curves, relative_error, run_experiment, CurveKind, ErrorRecord, ExperimentSpec, Grid,
    Method,
};
pub use graph::{Graph, GraphSpec};
pub use mapping::{
    critical_coupling, ising_bounds, ising_critical_coupling, ising_fixed_point,
    map_edge_marginals, map_vertex_marginals, potts_critical_coupling, potts_fixed_point,
    Direction, FixedPoint, IsingBounds, MappingMatrix,
};
pub use model::{Configuration, Domain, FactorSet, FactorTable, ModelKind, ModelParams};
pub use onsager::onsager_internal_energy;
pub use swp::{swp_estimate, swp_exact_small, SwpEstimate};
