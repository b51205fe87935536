//! Local marginal mappings between the primal and the dual domain.
//!
//! For an edge with primal factor `ψ` and dual factor `ψ̃ = DFT(ψ)`, the
//! vectors `π_p(a) / ψ(a)` and `π_d(k) / ψ̃(k)` are a q-point DFT pair:
//!
//! ```text
//! π_p(a) / ψ(a) = Σ_k exp(-2πi·ak/q) · π_d(k) / ψ̃(k)
//! ```
//!
//! The same holds for a vertex with `φ`, `φ̃`. Nothing about the rest of the
//! graph enters, so a whole set of estimated marginals can be carried across
//! at once.
//!
//! Three evaluation paths exist: the closed 2x2 form for q = 2, an O(q)
//! reduced form for Potts-symmetric tables (all non-zero symbols share one
//! value), and the full complex DFT path, which is also exposed for
//! validation.

use num_complex::Complex64;

use crate::dft;
use crate::error::{Error, Result};
use crate::model::{FactorSet, ModelKind};

/// Tolerance on imaginary parts and on the symmetry of reduced-path inputs.
const MAP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    DualToPrimal,
    PrimalToDual,
}

/// The linear map taking one domain's local marginal to the other's:
/// `diag(ψ) · W_q · diag(1/ψ̃)` for dual-to-primal and its inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct MappingMatrix {
    pub direction: Direction,
    pub entries: Vec<Vec<Complex64>>,
}

impl MappingMatrix {
    pub fn new(factor: &[f64], dual_factor: &[f64], direction: Direction) -> Result<Self> {
        check_tables(factor, dual_factor)?;
        let q = factor.len();
        let entries = (0..q)
            .map(|row| {
                (0..q)
                    .map(|col| match direction {
                        Direction::DualToPrimal => {
                            dft::twiddle(q, row, col) * factor[row] / dual_factor[col]
                        }
                        Direction::PrimalToDual => {
                            dft::twiddle(q, row, col).conj() * dual_factor[row]
                                / (q as f64 * factor[col])
                        }
                    })
                    .collect()
            })
            .collect();
        Ok(MappingMatrix { direction, entries })
    }

    pub fn apply(&self, input: &[f64]) -> Result<Vec<f64>> {
        let out: Vec<Complex64> = self
            .entries
            .iter()
            .map(|row| row.iter().zip(input).map(|(m, &x)| m * x).sum())
            .collect();
        dft::real_parts(&out, MAP_TOLERANCE).map_err(|(index, imag)| Error::NotReal { index, imag })
    }

    /// Real entries; only meaningful for q = 2.
    pub fn real_entries(&self) -> Option<Vec<Vec<f64>>> {
        if self.entries.len() != 2 {
            return None;
        }
        Some(
            self.entries
                .iter()
                .map(|row| row.iter().map(|z| z.re).collect())
                .collect(),
        )
    }
}

fn check_tables(factor: &[f64], dual_factor: &[f64]) -> Result<()> {
    if factor.len() != dual_factor.len() || factor.len() < 2 {
        return Err(Error::InvalidParams(format!(
            "factor tables of lengths {} and {}",
            factor.len(),
            dual_factor.len()
        )));
    }
    if let Some(index) = factor.iter().position(|&v| v == 0.0) {
        return Err(Error::SingularMapping { index });
    }
    if let Some(index) = dual_factor.iter().position(|&v| v == 0.0) {
        return Err(Error::SingularMapping { index });
    }
    Ok(())
}

fn tail_is_constant(values: &[f64]) -> bool {
    let first = values[1];
    values[2..]
        .iter()
        .all(|&v| (v - first).abs() <= MAP_TOLERANCE * first.abs().max(1.0))
}

/// Maps a local marginal across domains through the full complex W_q.
pub fn map_full(
    input: &[f64],
    factor: &[f64],
    dual_factor: &[f64],
    direction: Direction,
) -> Result<Vec<f64>> {
    check_input(input, factor)?;
    MappingMatrix::new(factor, dual_factor, direction)?.apply(input)
}

fn check_input(input: &[f64], factor: &[f64]) -> Result<()> {
    if input.len() != factor.len() {
        return Err(Error::InvalidParams(format!(
            "marginal of length {} for a table of length {}",
            input.len(),
            factor.len()
        )));
    }
    Ok(())
}

/// Maps a local (edge or vertex) marginal across domains.
pub fn map_local(
    input: &[f64],
    factor: &[f64],
    dual_factor: &[f64],
    direction: Direction,
) -> Result<Vec<f64>> {
    check_input(input, factor)?;
    check_tables(factor, dual_factor)?;
    let q = factor.len();
    let (src, dst) = match direction {
        Direction::DualToPrimal => (dual_factor, factor),
        Direction::PrimalToDual => (factor, dual_factor),
    };
    let ratio: Vec<f64> = input.iter().zip(src).map(|(p, f)| p / f).collect();

    if q == 2 {
        let (r0, r1) = (ratio[0], ratio[1]);
        let scale = match direction {
            Direction::DualToPrimal => 1.0,
            Direction::PrimalToDual => 0.5,
        };
        return Ok(vec![dst[0] * scale * (r0 + r1), dst[1] * scale * (r0 - r1)]);
    }

    if tail_is_constant(factor) && tail_is_constant(dual_factor) && tail_is_constant(&ratio) {
        // every non-zero symbol shares one ratio; W_q collapses to 2x2
        let r0 = ratio[0];
        let rt = ratio[1..].iter().sum::<f64>() / (q - 1) as f64;
        let (head, tail) = match direction {
            Direction::DualToPrimal => (r0 + (q - 1) as f64 * rt, r0 - rt),
            Direction::PrimalToDual => {
                ((r0 + (q - 1) as f64 * rt) / q as f64, (r0 - rt) / q as f64)
            }
        };
        let mut out = Vec::with_capacity(q);
        out.push(dst[0] * head);
        out.extend(dst[1..].iter().map(|d| d * tail));
        return Ok(out);
    }

    map_full(input, factor, dual_factor, direction)
}

/// Dual edge marginal to primal edge marginal.
pub fn map_edge_dual_to_primal(pi_d: &[f64], psi: &[f64], psi_dual: &[f64]) -> Result<Vec<f64>> {
    map_local(pi_d, psi, psi_dual, Direction::DualToPrimal)
}

/// Primal edge marginal to dual edge marginal (function).
pub fn map_edge_primal_to_dual(pi_p: &[f64], psi: &[f64], psi_dual: &[f64]) -> Result<Vec<f64>> {
    map_local(pi_p, psi, psi_dual, Direction::PrimalToDual)
}

pub fn map_vertex(
    pi: &[f64],
    phi: &[f64],
    phi_dual: &[f64],
    direction: Direction,
) -> Result<Vec<f64>> {
    map_local(pi, phi, phi_dual, direction)
}

/// Maps every edge marginal of a model; `primal` are the model's primal factors.
pub fn map_edge_marginals(
    primal: &FactorSet,
    marginals: &[Vec<f64>],
    direction: Direction,
) -> Result<Vec<Vec<f64>>> {
    let psi = primal.to_real()?;
    let psi_dual = primal.dual().to_real()?;
    marginals
        .iter()
        .enumerate()
        .map(|(e, m)| map_local(m, &psi.edges[e], &psi_dual.edges[e], direction))
        .collect()
}

/// Maps every vertex marginal of a model.
pub fn map_vertex_marginals(
    primal: &FactorSet,
    marginals: &[Vec<f64>],
    direction: Direction,
) -> Result<Vec<Vec<f64>>> {
    let phi = primal.to_real()?;
    let phi_dual = primal.dual().to_real()?;
    marginals
        .iter()
        .enumerate()
        .map(|(v, m)| map_local(m, &phi.vertices[v], &phi_dual.vertices[v], direction))
        .collect()
}

/// A marginal left unchanged by the edge mapping of a homogeneous
/// ferromagnetic model.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub q: usize,
    pub coupling: f64,
    pub vector: Vec<f64>,
}

fn positive_coupling(coupling: f64) -> Result<()> {
    if coupling > 0.0 && coupling.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "coupling must be positive, got {coupling}"
        )))
    }
}

/// `[e^{βJ} cosh βJ, e^{-βJ} sinh βJ] / (1 + sinh 2βJ)`.
pub fn ising_fixed_point(coupling: f64) -> Result<FixedPoint> {
    positive_coupling(coupling)?;
    // written in u = e^{-2βJ} so large couplings do not overflow
    let u = (-2.0 * coupling).exp();
    let den = 1.0 + 2.0 * u - u * u;
    Ok(FixedPoint {
        q: 2,
        coupling,
        vector: vec![(1.0 + u) / den, u * (1.0 - u) / den],
    })
}

/// Potts fixed point; entries 1..q share one value.
pub fn potts_fixed_point(coupling: f64, q: usize) -> Result<FixedPoint> {
    positive_coupling(coupling)?;
    if q < 2 {
        return Err(Error::InvalidParams(format!("alphabet order {q} < 2")));
    }
    // divided through by e^{2βJ}; s = e^{-βJ}
    let s = (-coupling).exp();
    let m = (q - 1) as f64;
    let den = 1.0 + 2.0 * m * s - m * s * s;
    let mut vector = vec![(s - s * s) / den; q];
    vector[0] = (1.0 + m * s) / den;
    Ok(FixedPoint {
        q,
        coupling,
        vector,
    })
}

/// Lower bounds on `π_p,e(0)` and `π_d,e(0)` for ferromagnetic models in a
/// nonnegative field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsingBounds {
    pub primal: f64,
    pub dual: f64,
}

pub fn ising_bounds(coupling: f64) -> Result<IsingBounds> {
    positive_coupling(coupling)?;
    let u = (-2.0 * coupling).exp();
    Ok(IsingBounds {
        primal: 1.0 / (1.0 + u),
        dual: (1.0 + u) / 2.0,
    })
}

/// Slack `π_p,e(0) · π_d,e(0) - 1/2`; nonnegative whenever the product
/// bound holds.
pub fn uncertainty_slack(primal_zero: f64, dual_zero: f64) -> f64 {
    primal_zero * dual_zero - 0.5
}

/// `ln(1 + √2) / 2`, in the convention of the Ising factors used here.
pub fn ising_critical_coupling() -> f64 {
    std::f64::consts::SQRT_2.ln_1p() / 2.0
}

/// `ln(1 + √q)`, in the Potts convention.
pub fn potts_critical_coupling(q: usize) -> f64 {
    (q as f64).sqrt().ln_1p()
}

pub fn critical_coupling(kind: ModelKind, q: usize) -> Result<f64> {
    if q < 2 {
        return Err(Error::InvalidParams(format!("alphabet order {q} < 2")));
    }
    Ok(match kind {
        ModelKind::Ising => ising_critical_coupling(),
        ModelKind::Potts => potts_critical_coupling(q),
    })
}
