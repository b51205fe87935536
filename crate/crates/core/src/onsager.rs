//! Internal energy per site of the infinite square-lattice Ising model.
//!
//! ```text
//! U(βJ) = -coth(2βJ) · [1 - (2/π)(1 - κ sinh 2βJ) K(κ)]
//! κ     = 2 sinh(2βJ) / cosh²(2βJ)
//! K(κ)  = ∫_0^{π/2} dθ / sqrt(1 - κ² sin² θ)
//! ```
//!
//! At criticality κ = 1, `K` diverges and its prefactor vanishes; that point
//! is handled by its own branch returning `-coth(2βJ_c) = -√2`.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Absolute tolerance of the quadrature.
pub const QUADRATURE_TOLERANCE: f64 = 1e-9;
const MAX_DEPTH: u32 = 64;

/// Complete elliptic integral of the first kind, `K(κ)` with modulus κ,
/// by adaptive Simpson quadrature.
pub fn elliptic_k(kappa: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&kappa.abs()) {
        return Err(Error::Numeric(format!(
            "elliptic modulus {kappa} outside [0, 1)"
        )));
    }
    let k2 = kappa * kappa;
    let f = |theta: f64| {
        let s = theta.sin();
        1.0 / (1.0 - k2 * s * s).sqrt()
    };
    adaptive_simpson(&f, 0.0, FRAC_PI_2, QUADRATURE_TOLERANCE)
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut evaluations = 3usize;
    let out = simpson_step(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH, &mut evaluations);
    out.ok_or_else(|| {
        Error::Numeric(format!(
            "quadrature on [{a}, {b}] did not reach tolerance {tol:e} within depth {MAX_DEPTH} \
             ({evaluations} evaluations)"
        ))
    })
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    evaluations: &mut usize,
) -> Option<f64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    *evaluations += 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        return None;
    }
    if delta.abs() <= 15.0 * tol {
        return Some(left + right + delta / 15.0);
    }
    if depth == 0 {
        return None;
    }
    let l = simpson_step(
        f,
        a,
        m,
        fa,
        flm,
        fm,
        left,
        tol / 2.0,
        depth - 1,
        evaluations,
    )?;
    let r = simpson_step(
        f,
        m,
        b,
        fm,
        frm,
        fb,
        right,
        tol / 2.0,
        depth - 1,
        evaluations,
    )?;
    Some(l + r)
}

/// Internal energy per site at dimensionless coupling `βJ > 0`.
pub fn onsager_internal_energy(coupling: f64) -> Result<f64> {
    if !(coupling > 0.0) || coupling.is_nan() {
        return Err(Error::Domain(format!(
            "coupling must be positive, got {coupling}"
        )));
    }
    let t = (2.0 * coupling).tanh();
    let coth = 1.0 / t;
    // κ = 2 tanh(2βJ) / cosh(2βJ); cosh overflows to inf for huge couplings, giving κ = 0
    let kappa = 2.0 * t / (2.0 * coupling).cosh();
    if 1.0 - kappa <= 1e-14 {
        return Ok(-coth);
    }
    let prefactor = 1.0 - 2.0 * t * t; // 1 - κ sinh 2βJ
    let k = elliptic_k(kappa)?;
    Ok(-coth * (1.0 - std::f64::consts::FRAC_2_PI * prefactor * k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::ising_critical_coupling;

    /// K(κ) = π / (2 · AGM(1, sqrt(1 - κ²))), independent of the quadrature.
    fn elliptic_k_agm(kappa: f64) -> f64 {
        let (mut a, mut b) = (1.0f64, (1.0 - kappa * kappa).sqrt());
        for _ in 0..60 {
            let (na, nb) = (0.5 * (a + b), (a * b).sqrt());
            a = na;
            b = nb;
        }
        FRAC_PI_2 / a
    }

    #[test]
    fn quadrature_matches_agm() {
        for &k in &[0.0, 0.1, 0.5, 0.9, 0.99, 0.999_999] {
            let q = elliptic_k(k).unwrap();
            assert!((q - elliptic_k_agm(k)).abs() < 1e-8, "k={k}: {q}");
        }
        assert!(elliptic_k(1.0).is_err());
    }

    #[test]
    fn critical_energy() {
        let u = onsager_internal_energy(ising_critical_coupling()).unwrap();
        assert!((u + std::f64::consts::SQRT_2).abs() < 1e-9, "{u}");
    }

    #[test]
    fn energy_is_continuous_through_criticality() {
        let jc = ising_critical_coupling();
        for &d in &[1e-3, 1e-5] {
            let below = onsager_internal_energy(jc - d).unwrap();
            let above = onsager_internal_energy(jc + d).unwrap();
            assert!((below + std::f64::consts::SQRT_2).abs() < 0.05);
            assert!((above + std::f64::consts::SQRT_2).abs() < 0.05);
            assert!(above < below);
        }
    }

    #[test]
    fn limits() {
        assert!((onsager_internal_energy(20.0).unwrap() + 2.0).abs() < 1e-6);
        assert!((onsager_internal_energy(1e3).unwrap() + 2.0).abs() < 1e-6);
        let u = onsager_internal_energy(1e-4).unwrap();
        assert!(u < 0.0 && u > -1e-3, "{u}");
        assert!(onsager_internal_energy(0.0).is_err());
    }

    #[test]
    fn matches_closed_form_with_agm() {
        for &j in &[0.1f64, 0.3, 0.6, 1.0, 2.0] {
            let t = (2.0 * j).tanh();
            let kappa = 2.0 * t / (2.0 * j).cosh();
            let oracle = -(1.0 / t)
                * (1.0 - std::f64::consts::FRAC_2_PI * (1.0 - 2.0 * t * t) * elliptic_k_agm(kappa));
            assert!((onsager_internal_energy(j).unwrap() - oracle).abs() < 1e-8);
        }
    }
}
