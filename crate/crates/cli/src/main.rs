use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use dualmarg_core::bp::{build_dual_fg, build_primal_fg, run_bp, BpConfig};
use dualmarg_core::exact::{dual_exact, primal_exact, DEFAULT_BUDGET};
use dualmarg_core::experiment::{
    emit_curves, experiment_csv, run_experiment, CurveKind, ExperimentSpec, Grid,
};
use dualmarg_core::mapping::{map_edge_marginals, Direction};
use dualmarg_core::output::{edge_marginals_csv, exact_csv, parse_edge_marginals_csv, swp_csv};
use dualmarg_core::swp::swp_estimate;
use dualmarg_core::{Error, Graph, ModelFile, ModelParams};

/// Environment variable holding the worker thread count.
const THREADS_VAR: &str = "DUALMARG_THREADS";

#[derive(Parser)]
#[command(
    name = "dualmarg",
    version,
    about = "Primal and dual marginals of Ising and Potts models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact marginals and partition functions by enumeration
    Exact {
        #[command(flatten)]
        io: ModelIo,
        #[arg(long, value_enum, default_value_t = DomainArg::Both)]
        domain: DomainArg,
        /// Maximum number of configurations to enumerate
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u64,
    },
    /// Loopy belief propagation in either domain
    Bp {
        #[command(flatten)]
        io: ModelIo,
        #[arg(long, value_enum, default_value_t = DomainArg::Primal)]
        domain: DomainArg,
        #[arg(long, default_value_t = 0.5)]
        damping: f64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        /// Seed for random initial messages (uniform when omitted)
        #[arg(long)]
        init_seed: Option<u64>,
        /// Map dual beliefs to primal edge marginals
        #[arg(long)]
        map: bool,
    },
    /// Subgraphs-world Monte Carlo estimate of dual edge marginals
    Swp {
        #[command(flatten)]
        io: ModelIo,
        #[arg(long, default_value_t = 100_000)]
        sweeps: u64,
        #[arg(long, default_value_t = 1_000)]
        burn_in: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Map the estimate to primal edge marginals
        #[arg(long)]
        map: bool,
    },
    /// Map edge marginals read from CSV (columns edge,a,value) between domains
    Map {
        #[command(flatten)]
        io: ModelIo,
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = DirectionArg::DualToPrimal)]
        direction: DirectionArg,
    },
    /// Fixed-point curve of the edge mapping
    Fixedpoint {
        /// Alphabet size; 2 gives the Ising curve, larger values the Potts curve
        #[arg(long, default_value_t = 2)]
        q: usize,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower-bound curves on the primal and dual zero-symbol marginals
    Bounds {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Relative-error sweep against the exact oracle
    Experiment {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct ModelIo {
    /// Model file (JSON)
    model: PathBuf,
    /// Output CSV path; stdout when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = 0.0)]
    start: f64,
    #[arg(long, default_value_t = 3.0)]
    stop: f64,
    #[arg(long, default_value_t = 0.01)]
    step: f64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DomainArg {
    Primal,
    Dual,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    DualToPrimal,
    PrimalToDual,
}

fn load_model(path: &Path) -> anyhow::Result<(Graph, ModelParams)> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(ModelFile::from_json(&text)?.build()?)
}

fn write_output(out: Option<&Path>, csv: &str) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, csv).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}

fn configure_threads() -> anyhow::Result<()> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .with_context(|| format!("{THREADS_VAR}={value} is not a positive integer"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()?;
    Ok(())
}

fn run(cli: Cli) -> anyhow::Result<()> {
    configure_threads()?;
    match cli.command {
        Command::Exact { io, domain, budget } => {
            let (graph, params) = load_model(&io.model)?;
            let factors = params.factors(&graph)?;
            let primal = match domain {
                DomainArg::Dual => None,
                _ => Some(primal_exact(&graph, &factors, budget)?),
            };
            let dual = match domain {
                DomainArg::Primal => None,
                _ => Some(dual_exact(&graph, &factors.dual(), budget)?),
            };
            if let Some(d) = dual.as_ref().filter(|d| d.signed) {
                eprintln!(
                    "note: dual factors are negative; dual marginals are signed (Z_d = {:e})",
                    d.partition
                );
            }
            write_output(
                io.out.as_deref(),
                &exact_csv(primal.as_ref(), dual.as_ref()),
            )
        }
        Command::Bp {
            io,
            domain,
            damping,
            tol,
            max_iter,
            init_seed,
            map,
        } => {
            let (graph, params) = load_model(&io.model)?;
            let factors = params.factors(&graph)?;
            let config = BpConfig {
                damping,
                tol,
                max_iter,
                seed: init_seed,
            };
            let fg = match domain {
                DomainArg::Primal => build_primal_fg(&graph, &factors)?,
                DomainArg::Dual => build_dual_fg(&graph, &factors.dual())?,
                DomainArg::Both => bail!(Error::InvalidParams(
                    "bp runs in one domain: primal or dual".into()
                )),
            };
            let report = run_bp(&fg, &config)?;
            eprintln!(
                "domain={} converged={} iterations={} final_delta={:e}",
                report.domain.as_str(),
                report.converged,
                report.iterations,
                report.final_delta
            );
            let csv = if map {
                if domain != DomainArg::Dual {
                    bail!(Error::InvalidParams(
                        "--map applies to dual-domain BP".into()
                    ));
                }
                let mapped =
                    map_edge_marginals(&factors, &report.edge_marginals, Direction::DualToPrimal)?;
                edge_marginals_csv("pi_p", &mapped)
            } else {
                edge_marginals_csv("belief", &report.edge_marginals)
            };
            write_output(io.out.as_deref(), &csv)
        }
        Command::Swp {
            io,
            sweeps,
            burn_in,
            seed,
            map,
        } => {
            let (graph, params) = load_model(&io.model)?;
            let est = swp_estimate(&graph, &params, sweeps, burn_in, seed)?;
            eprintln!(
                "seed={} sweeps={} burn_in={} steps={} samples={} acceptance={:.6}",
                est.seed, est.sweeps, est.burn_in, est.steps, est.samples, est.acceptance_rate
            );
            let csv = if map {
                let factors = params.factors(&graph)?;
                let mapped =
                    map_edge_marginals(&factors, &est.dual_marginals(), Direction::DualToPrimal)?;
                edge_marginals_csv("pi_p", &mapped)
            } else {
                swp_csv(&est)
            };
            write_output(io.out.as_deref(), &csv)
        }
        Command::Map {
            io,
            input,
            direction,
        } => {
            let (graph, params) = load_model(&io.model)?;
            let factors = params.factors(&graph)?;
            let text = std::fs::read_to_string(&input)
                .with_context(|| format!("reading {}", input.display()))?;
            let marginals = parse_edge_marginals_csv(&text, graph.edge_count(), params.q)?;
            let (direction, name) = match direction {
                DirectionArg::DualToPrimal => (Direction::DualToPrimal, "pi_p"),
                DirectionArg::PrimalToDual => (Direction::PrimalToDual, "pi_d"),
            };
            let mapped = map_edge_marginals(&factors, &marginals, direction)?;
            write_output(io.out.as_deref(), &edge_marginals_csv(name, &mapped))
        }
        Command::Fixedpoint { q, grid, out } => {
            let kind = if q == 2 {
                CurveKind::FixedpointIsing
            } else {
                CurveKind::FixedpointPotts { q }
            };
            let grid = Grid::range(grid.start, grid.stop, grid.step)?;
            write_output(out.as_deref(), &emit_curves(kind, &grid)?)
        }
        Command::Bounds { grid, out } => {
            let grid = Grid::range(grid.start, grid.stop, grid.step)?;
            write_output(out.as_deref(), &emit_curves(CurveKind::Bounds, &grid)?)
        }
        Command::Experiment { config, out } => {
            let spec = ExperimentSpec::load(&config)?;
            let records = run_experiment(&spec)?;
            eprintln!(
                "records={} realizations={} seed={}",
                records.len(),
                spec.realizations,
                spec.seed
            );
            let out = out.or_else(|| {
                spec.out
                    .as_ref()
                    .map(|p| config.parent().unwrap_or(Path::new(".")).join(p))
            });
            write_output(
                out.as_deref(),
                &experiment_csv(spec.sweep.variable, &records),
            )
        }
    }
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(e) if !e.is_validation() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
