//! Relative-error sweeps against the enumeration oracle, and closed-form curves.
//!
//! An experiment file looks like
//!
//! ```json
//! {
//!   "model": "k10.json",
//!   "methods": ["bp-primal", "bp-dual+map"],
//!   "sweep": {"variable": "coupling_max", "start": 0.1, "stop": 0.65, "step": 0.05},
//!   "realizations": 50,
//!   "seed": 1
//! }
//! ```
//!
//! `model` is a path (relative to the experiment file) or an inline model.
//! The sweep variable replaces the model's couplings: `coupling` sets every
//! coupling to the grid value, `sigma2` draws half-normal couplings with that
//! variance, and `coupling_max` draws uniform couplings on
//! `[coupling_min, value]`. Realization `r` uses seed `seed + r`.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bp::{build_dual_fg, build_primal_fg, run_bp, BpConfig};
use crate::config::{ModelFile, ParamSpec, RandomSpec};
use crate::error::{Error, Result};
use crate::exact::primal_exact;
use crate::graph::Graph;
use crate::mapping::{
    ising_bounds, ising_critical_coupling, ising_fixed_point, map_edge_marginals,
    potts_critical_coupling, potts_fixed_point, Direction,
};
use crate::model::{ModelKind, ModelParams};
use crate::output::{fmt_f64, CsvTable};
use crate::swp::swp_estimate;

/// Largest state space the oracle is allowed to enumerate.
pub const ORACLE_LIMIT: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "exact")]
    Exact,
    #[serde(rename = "bp-primal")]
    BpPrimal,
    #[serde(rename = "bp-dual+map")]
    BpDualMap,
    #[serde(rename = "swp+map")]
    SwpMap,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::BpPrimal => "bp-primal",
            Method::BpDualMap => "bp-dual+map",
            Method::SwpMap => "swp+map",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Coupling,
    Sigma2,
    CouplingMax,
}

impl SweepVariable {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepVariable::Coupling => "coupling",
            SweepVariable::Sigma2 => "sigma2",
            SweepVariable::CouplingMax => "coupling_max",
        }
    }
}

/// Strictly increasing list of finite sweep values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridSpec", into = "GridSpec")]
pub struct Grid {
    values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum GridSpec {
    Values { values: Vec<f64> },
    Range { start: f64, stop: f64, step: f64 },
}

impl TryFrom<GridSpec> for Grid {
    type Error = Error;

    fn try_from(spec: GridSpec) -> Result<Grid> {
        match spec {
            GridSpec::Values { values } => Grid::new(values),
            GridSpec::Range { start, stop, step } => Grid::range(start, stop, step),
        }
    }
}

impl From<Grid> for GridSpec {
    fn from(grid: Grid) -> GridSpec {
        GridSpec::Values {
            values: grid.values,
        }
    }
}

impl Grid {
    pub fn new(values: Vec<f64>) -> Result<Grid> {
        if values.is_empty() {
            return Err(Error::InvalidExperiment("empty grid".into()));
        }
        if let Some(x) = values.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidExperiment(format!(
                "grid value {x} is not finite"
            )));
        }
        if let Some(w) = values.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::InvalidExperiment(format!(
                "grid is not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        Ok(Grid { values })
    }

    /// `start, start + step, ...` up to `stop` inclusive (with a small
    /// allowance for rounding in `stop`).
    pub fn range(start: f64, stop: f64, step: f64) -> Result<Grid> {
        if !(step > 0.0) || !start.is_finite() || !stop.is_finite() || !step.is_finite() {
            return Err(Error::InvalidExperiment(format!(
                "bad range {start}:{step}:{stop}"
            )));
        }
        if stop < start {
            return Err(Error::InvalidExperiment(format!(
                "range stop {stop} < start {start}"
            )));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        // rounded so that e.g. 0.1 + 2 * 0.05 prints as 0.2
        let values = (0..=n)
            .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
            .collect();
        Grid::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub variable: SweepVariable,
    #[serde(flatten)]
    pub grid: Grid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelSource {
    Path(String),
    Inline(ModelFile),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BpSettings {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for BpSettings {
    fn default() -> Self {
        let c = BpConfig::default();
        BpSettings {
            damping: c.damping,
            tol: c.tol,
            max_iter: c.max_iter,
        }
    }
}

impl BpSettings {
    pub fn config(&self) -> BpConfig {
        BpConfig {
            damping: self.damping,
            tol: self.tol,
            max_iter: self.max_iter,
            seed: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SwpSettings {
    pub sweeps: u64,
    pub burn_in: u64,
}

impl Default for SwpSettings {
    fn default() -> Self {
        SwpSettings {
            sweeps: 10_000,
            burn_in: 1_000,
        }
    }
}

fn default_coupling_min() -> f64 {
    0.05
}

fn default_realizations() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub model: ModelSource,
    pub methods: Vec<Method>,
    pub sweep: Sweep,
    #[serde(default = "default_coupling_min")]
    pub coupling_min: f64,
    #[serde(default = "default_realizations")]
    pub realizations: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub bp: BpSettings,
    #[serde(default)]
    pub swp: SwpSettings,
    #[serde(default)]
    pub out: Option<String>,
}

impl ExperimentSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text)
            .map_err(|e| Error::InvalidExperiment(format!("experiment file: {e}")))
    }

    /// Reads the spec and resolves a model path relative to the spec's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidExperiment(format!("{}: {e}", path.display())))?;
        let mut spec = Self::from_json(&text)?;
        if let ModelSource::Path(p) = &spec.model {
            let model_path = path.parent().unwrap_or(Path::new(".")).join(p);
            let text = std::fs::read_to_string(&model_path)
                .map_err(|e| Error::InvalidExperiment(format!("{}: {e}", model_path.display())))?;
            spec.model = ModelSource::Inline(ModelFile::from_json(&text)?);
        }
        Ok(spec)
    }

    fn model_file(&self) -> Result<&ModelFile> {
        match &self.model {
            ModelSource::Inline(m) => Ok(m),
            ModelSource::Path(p) => Err(Error::InvalidExperiment(format!(
                "model path '{p}' was not resolved"
            ))),
        }
    }

    fn couplings_at(&self, value: f64) -> ParamSpec {
        match self.sweep.variable {
            SweepVariable::Coupling => ParamSpec::Constant(value),
            SweepVariable::Sigma2 => ParamSpec::Random(RandomSpec::Halfnormal {
                sigma2: value,
                seed: None,
            }),
            SweepVariable::CouplingMax => ParamSpec::Random(RandomSpec::Uniform {
                min: self.coupling_min,
                max: value,
                seed: None,
            }),
        }
    }
}

/// Aggregated relative errors of one method at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRecord {
    pub sweep_value: f64,
    pub method: Method,
    /// Mean over all (edge, realization) pairs.
    pub mean: f64,
    pub std: f64,
    pub median: f64,
    /// Standard deviation of the per-realization mean errors.
    pub realization_std: f64,
    pub samples: usize,
    pub realizations: usize,
    /// Realizations where BP stopped at `max_iter`.
    pub unconverged: usize,
    pub seed: u64,
}

/// `|est(0) - exact(0)| / exact(0)`.
pub fn relative_error(estimate: &[f64], exact: &[f64]) -> Result<f64> {
    let (Some(&e), Some(&x)) = (estimate.first(), exact.first()) else {
        return Err(Error::InvalidParams("empty marginal vector".into()));
    };
    if !(x > 0.0) {
        return Err(Error::Domain(format!("exact value {x} is not positive")));
    }
    Ok((e - x).abs() / x)
}

struct Instance {
    value_index: usize,
    seed: u64,
    graph: Graph,
    params: ModelParams,
}

struct Outcome {
    /// Per method (in spec order): per-edge relative errors and convergence.
    errors: Vec<(Vec<f64>, bool)>,
}

fn validate(spec: &ExperimentSpec, model: &ModelFile) -> Result<()> {
    if spec.methods.is_empty() {
        return Err(Error::InvalidExperiment("no methods".into()));
    }
    if spec.realizations == 0 {
        return Err(Error::InvalidExperiment("realizations must be >= 1".into()));
    }
    let values = spec.sweep.grid.values();
    match spec.sweep.variable {
        SweepVariable::Sigma2 => {
            if values[0] < 0.0 {
                return Err(Error::InvalidExperiment(format!(
                    "negative variance {}",
                    values[0]
                )));
            }
        }
        SweepVariable::CouplingMax => {
            if values[0] < spec.coupling_min {
                return Err(Error::InvalidExperiment(format!(
                    "coupling maximum {} below minimum {}",
                    values[0], spec.coupling_min
                )));
            }
        }
        SweepVariable::Coupling => {}
    }
    let graph = Graph::from_spec(&model.graph)?;
    let states = (model.q as f64).powi(graph.vertex_count() as i32);
    if states > ORACLE_LIMIT as f64 {
        return Err(Error::BudgetExceeded {
            states,
            budget: ORACLE_LIMIT,
        });
    }
    if spec.methods.contains(&Method::SwpMap) && model.model != ModelKind::Ising {
        return Err(Error::Mode("swp+map requires an Ising model".into()));
    }
    Ok(())
}

fn check_methods(spec: &ExperimentSpec, inst: &Instance, value: f64) -> Result<()> {
    let p = &inst.params;
    for &m in &spec.methods {
        match m {
            Method::BpDualMap if !(p.is_ferromagnetic() && p.has_nonnegative_field()) => {
                return Err(Error::Mode(format!(
                    "bp-dual+map needs nonnegative couplings and fields (sweep value {value}, seed {})",
                    inst.seed
                )));
            }
            Method::SwpMap
                if !(p.couplings.iter().all(|&j| j > 0.0) && p.fields.iter().all(|&h| h > 0.0)) =>
            {
                return Err(Error::Mode(format!(
                    "swp+map needs positive couplings and fields (sweep value {value}, seed {})",
                    inst.seed
                )));
            }
            _ => {}
        }
    }
    Ok(())
}

fn run_instance(spec: &ExperimentSpec, inst: &Instance) -> Result<Outcome> {
    let factors = inst.params.factors(&inst.graph)?;
    let oracle = primal_exact(&inst.graph, &factors, ORACLE_LIMIT)?;
    let bp_config = spec.bp.config();
    let mut errors = Vec::with_capacity(spec.methods.len());
    for &method in &spec.methods {
        let (estimate, converged) = match method {
            Method::Exact => (oracle.edge_marginals.clone(), true),
            Method::BpPrimal => {
                let fg = build_primal_fg(&inst.graph, &factors)?;
                let report = run_bp(&fg, &bp_config)?;
                (report.edge_marginals, report.converged)
            }
            Method::BpDualMap => {
                let fg = build_dual_fg(&inst.graph, &factors.dual())?;
                let report = run_bp(&fg, &bp_config)?;
                let mapped =
                    map_edge_marginals(&factors, &report.edge_marginals, Direction::DualToPrimal)?;
                check_normalized(&mapped)?;
                (mapped, report.converged)
            }
            Method::SwpMap => {
                let est = swp_estimate(
                    &inst.graph,
                    &inst.params,
                    spec.swp.sweeps,
                    spec.swp.burn_in,
                    inst.seed,
                )?;
                let mapped =
                    map_edge_marginals(&factors, &est.dual_marginals(), Direction::DualToPrimal)?;
                (mapped, true)
            }
        };
        let errs = estimate
            .iter()
            .zip(&oracle.edge_marginals)
            .map(|(e, x)| relative_error(e, x))
            .collect::<Result<Vec<f64>>>()?;
        errors.push((errs, converged));
    }
    Ok(Outcome { errors })
}

fn check_normalized(marginals: &[Vec<f64>]) -> Result<()> {
    for (e, m) in marginals.iter().enumerate() {
        let s: f64 = m.iter().sum();
        if (s - 1.0).abs() > 1e-9 {
            return Err(Error::Numeric(format!(
                "mapped marginal of edge {e} sums to {s}"
            )));
        }
    }
    Ok(())
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Runs every (grid point, realization, method) and aggregates per
/// (grid point, method). All instances are built and checked before any
/// inference runs.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<ErrorRecord>> {
    let model = spec.model_file()?;
    validate(spec, model)?;
    let graph = Graph::from_spec(&model.graph)?;
    let values = spec.sweep.grid.values();

    let mut instances = Vec::with_capacity(values.len() * spec.realizations);
    for (value_index, &value) in values.iter().enumerate() {
        let couplings = spec.couplings_at(value);
        for r in 0..spec.realizations {
            let seed = spec.seed.wrapping_add(r as u64);
            let params = model.params_for(&graph, &couplings, seed)?;
            let inst = Instance {
                value_index,
                seed,
                graph: graph.clone(),
                params,
            };
            check_methods(spec, &inst, value)?;
            instances.push(inst);
        }
    }

    let outcomes = instances
        .par_iter()
        .map(|inst| run_instance(spec, inst))
        .collect::<Result<Vec<Outcome>>>()?;

    let mut records = Vec::with_capacity(values.len() * spec.methods.len());
    for (value_index, &value) in values.iter().enumerate() {
        let group: Vec<&Outcome> = instances
            .iter()
            .zip(&outcomes)
            .filter(|(inst, _)| inst.value_index == value_index)
            .map(|(_, o)| o)
            .collect();
        for (k, &method) in spec.methods.iter().enumerate() {
            let pooled: Vec<f64> = group
                .iter()
                .flat_map(|o| o.errors[k].0.iter().copied())
                .collect();
            let per_realization: Vec<f64> =
                group.iter().map(|o| mean_std(&o.errors[k].0).0).collect();
            let (mean, std) = mean_std(&pooled);
            records.push(ErrorRecord {
                sweep_value: value,
                method,
                mean,
                std,
                median: median(&pooled),
                realization_std: mean_std(&per_realization).1,
                samples: pooled.len(),
                realizations: group.len(),
                unconverged: group.iter().filter(|o| !o.errors[k].1).count(),
                seed: spec.seed,
            });
        }
    }
    Ok(records)
}

pub fn experiment_csv(variable: SweepVariable, records: &[ErrorRecord]) -> String {
    let mut t = CsvTable::new(&[
        "variable",
        "value",
        "method",
        "mean",
        "std",
        "median",
        "realization_std",
        "samples",
        "realizations",
        "unconverged",
        "seed",
    ]);
    for r in records {
        t.row([
            variable.as_str().to_string(),
            fmt_f64(r.sweep_value),
            r.method.as_str().to_string(),
            fmt_f64(r.mean),
            fmt_f64(r.std),
            fmt_f64(r.median),
            fmt_f64(r.realization_std),
            r.samples.to_string(),
            r.realizations.to_string(),
            r.unconverged.to_string(),
            r.seed.to_string(),
        ]);
    }
    t.finish()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    FixedpointIsing,
    FixedpointPotts { q: usize },
    Bounds,
}

/// Closed-form curves over `grid`. Rows are tagged `curve`, plus one
/// `critical` row evaluated at the critical coupling. Grid points with
/// `βJ <= 0` are skipped.
pub fn emit_curves(kind: CurveKind, grid: &Grid) -> Result<String> {
    let (columns, critical): (&[&str], f64) = match kind {
        CurveKind::FixedpointIsing => (&["pi0", "pi1"], ising_critical_coupling()),
        CurveKind::FixedpointPotts { q } => {
            if q < 2 {
                return Err(Error::InvalidParams(format!("alphabet order {q} < 2")));
            }
            (&["pi0", "pi_t"], potts_critical_coupling(q))
        }
        CurveKind::Bounds => (&["primal", "dual"], ising_critical_coupling()),
    };
    let eval = |j: f64| -> Result<[f64; 2]> {
        Ok(match kind {
            CurveKind::FixedpointIsing => {
                let v = ising_fixed_point(j)?.vector;
                [v[0], v[1]]
            }
            CurveKind::FixedpointPotts { q } => {
                let v = potts_fixed_point(j, q)?.vector;
                [v[0], v[1]]
            }
            CurveKind::Bounds => {
                let b = ising_bounds(j)?;
                [b.primal, b.dual]
            }
        })
    };
    let mut header = vec!["row", "beta_j"];
    header.extend_from_slice(columns);
    let mut t = CsvTable::new(&header);
    for &j in grid.values().iter().filter(|&&j| j > 0.0) {
        let [a, b] = eval(j)?;
        t.row(["curve".to_string(), fmt_f64(j), fmt_f64(a), fmt_f64(b)]);
    }
    let [a, b] = eval(critical)?;
    t.row([
        "critical".to_string(),
        fmt_f64(critical),
        fmt_f64(a),
        fmt_f64(b),
    ]);
    Ok(t.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphSpec;

    fn spec(
        methods: Vec<Method>,
        variable: SweepVariable,
        values: Vec<f64>,
        realizations: usize,
    ) -> ExperimentSpec {
        ExperimentSpec {
            model: ModelSource::Inline(ModelFile {
                graph: GraphSpec::Complete { n: 5 },
                model: ModelKind::Ising,
                q: 2,
                couplings: ParamSpec::Constant(0.3),
                fields: ParamSpec::Constant(0.1),
                seed: 0,
            }),
            methods,
            sweep: Sweep {
                variable,
                grid: Grid::new(values).unwrap(),
            },
            coupling_min: 0.05,
            realizations,
            seed: 11,
            bp: BpSettings::default(),
            swp: SwpSettings {
                sweeps: 2_000,
                burn_in: 200,
            },
            out: None,
        }
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn relative_error_arithmetic() {
        assert!((relative_error(&[0.84, 0.16], &[0.8, 0.2]).unwrap() - 0.05).abs() < 1e-15);
        assert_eq!(relative_error(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        let r = relative_error(&[0.7071, 0.2929], &[0.8536, 0.1464]).unwrap();
        assert!((r - 0.1716).abs() < 1e-4);
        assert!(relative_error(&[0.5, 0.5], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn grid_parsing_and_validation() {
        let g = Grid::range(0.05, 0.75, 0.05).unwrap();
        assert_eq!(g.values().len(), 15);
        assert_eq!(g.values()[2], 0.15);
        assert_eq!(*g.values().last().unwrap(), 0.75);
        assert!(Grid::new(vec![0.1, 0.1]).is_err());
        assert!(Grid::new(vec![]).is_err());
        let s: Sweep = serde_json::from_str(r#"{"variable":"sigma2","values":[0.1,0.2]}"#).unwrap();
        assert_eq!(s.grid.values(), &[0.1, 0.2]);
        assert!(
            serde_json::from_str::<Sweep>(r#"{"variable":"sigma2","values":[0.2,0.1]}"#).is_err()
        );
    }

    #[test]
    fn single_point_single_realization() {
        let s = spec(
            vec![Method::BpPrimal],
            SweepVariable::Coupling,
            vec![0.2],
            1,
        );
        let records = run_experiment(&s).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(records[0].samples, 10);
        let csv = experiment_csv(s.sweep.variable, &records);
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn exact_method_has_zero_error() {
        let s = spec(
            vec![Method::Exact],
            SweepVariable::Sigma2,
            vec![0.3, 0.6],
            3,
        );
        for r in run_experiment(&s).unwrap() {
            assert_eq!(r.mean, 0.0);
            assert_eq!(r.realizations, 3);
        }
    }

    #[test]
    fn all_methods_and_determinism() {
        let methods = vec![Method::BpPrimal, Method::BpDualMap, Method::SwpMap];
        let s = spec(methods, SweepVariable::CouplingMax, vec![0.2, 0.4], 2);
        let a = experiment_csv(s.sweep.variable, &run_experiment(&s).unwrap());
        let b = experiment_csv(s.sweep.variable, &run_experiment(&s).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.lines().count(), 7);
    }

    #[test]
    fn rejects_invalid_setups() {
        let mut s = spec(vec![Method::SwpMap], SweepVariable::Coupling, vec![0.2], 1);
        if let ModelSource::Inline(m) = &mut s.model {
            m.fields = ParamSpec::Constant(0.0);
        }
        assert!(matches!(run_experiment(&s), Err(Error::Mode(_))));

        let mut s = spec(
            vec![Method::BpDualMap],
            SweepVariable::Coupling,
            vec![-0.2],
            1,
        );
        assert!(matches!(run_experiment(&s), Err(Error::Mode(_))));
        s.realizations = 0;
        assert!(run_experiment(&s).is_err());

        let mut s = spec(
            vec![Method::BpPrimal],
            SweepVariable::Coupling,
            vec![0.2],
            1,
        );
        if let ModelSource::Inline(m) = &mut s.model {
            m.graph = GraphSpec::Grid {
                rows: 5,
                cols: 5,
                periodic: true,
            };
        }
        assert!(matches!(
            run_experiment(&s),
            Err(Error::BudgetExceeded { .. })
        ));

        let s = spec(
            vec![Method::BpPrimal],
            SweepVariable::CouplingMax,
            vec![0.01],
            1,
        );
        assert!(run_experiment(&s).is_err());
    }

    #[test]
    fn curve_markers() {
        let grid = Grid::range(0.0, 3.0, 0.01).unwrap();
        let csv = emit_curves(CurveKind::FixedpointIsing, &grid).unwrap();
        let last = csv.lines().last().unwrap();
        let cols: Vec<f64> = last
            .split(',')
            .skip(1)
            .map(|x| x.parse().unwrap())
            .collect();
        assert!(last.starts_with("critical,"));
        assert!((cols[0] - 0.4407).abs() < 1e-4);
        assert!((cols[1] - 0.853_553_390_593_273_8).abs() < 1e-12);
        // 0.0 is skipped
        assert_eq!(csv.lines().count(), 1 + 300 + 1);

        let csv = emit_curves(CurveKind::Bounds, &grid).unwrap();
        let cols: Vec<f64> = csv
            .lines()
            .last()
            .unwrap()
            .split(',')
            .skip(1)
            .map(|x| x.parse().unwrap())
            .collect();
        assert!((cols[1] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((cols[2] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);

        let csv = emit_curves(CurveKind::FixedpointPotts { q: 5 }, &grid).unwrap();
        let cols: Vec<f64> = csv
            .lines()
            .last()
            .unwrap()
            .split(',')
            .skip(1)
            .map(|x| x.parse().unwrap())
            .collect();
        assert!((cols[0] - 1.174).abs() < 1e-3);
        assert!((cols[1] - 0.7236).abs() < 1e-4);
    }
}
