//! Length-q discrete Fourier transform over the cyclic group Z/qZ.
//!
//! Forward kernel is `w[k][l] = exp(-2 pi i k l / q)`; the inverse is the
//! conjugate kernel scaled by `1/q`. Alphabets here are tiny (q is rarely
//! above 10), so the transform is evaluated directly.

use std::f64::consts::PI;

use num_complex::Complex64;

/// Imaginary parts below this magnitude are treated as rounding noise.
pub const REAL_TOLERANCE: f64 = 1e-12;

/// Entry `(k, l)` of the q-point DFT matrix.
pub fn twiddle(q: usize, k: usize, l: usize) -> Complex64 {
    // reduce first so the angle stays small
    let kl = (k * l) % q;
    Complex64::from_polar(1.0, -2.0 * PI * kl as f64 / q as f64)
}

pub fn forward(values: &[Complex64]) -> Vec<Complex64> {
    let q = values.len();
    (0..q)
        .map(|k| {
            values
                .iter()
                .enumerate()
                .map(|(l, v)| v * twiddle(q, k, l))
                .sum()
        })
        .collect()
}

pub fn inverse(values: &[Complex64]) -> Vec<Complex64> {
    let q = values.len();
    let scale = 1.0 / q as f64;
    (0..q)
        .map(|l| {
            values
                .iter()
                .enumerate()
                .map(|(k, v)| v * twiddle(q, k, l).conj())
                .sum::<Complex64>()
                * scale
        })
        .collect()
}

/// DFT of a real table. For q = 2 this is exactly `[v0 + v1, v0 - v1]`.
pub fn forward_real(values: &[f64]) -> Vec<Complex64> {
    if let [a, b] = *values {
        return vec![Complex64::new(a + b, 0.0), Complex64::new(a - b, 0.0)];
    }
    let complex: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    forward(&complex)
}

/// Zeroes imaginary parts that are within `REAL_TOLERANCE` of zero.
pub fn truncate_imaginary(values: &mut [Complex64]) {
    for v in values.iter_mut() {
        if v.im.abs() < REAL_TOLERANCE {
            v.im = 0.0;
        }
    }
}

/// Zeroes components at the rounding level of the largest entry, so that
/// exact zeros of a transform do not come out as `-2e-16`.
pub fn flush_rounding(values: &mut [Complex64]) {
    let scale = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let floor = 4.0 * values.len() as f64 * f64::EPSILON * scale;
    for v in values.iter_mut() {
        if v.re.abs() <= floor {
            v.re = 0.0;
        }
        if v.im.abs() <= floor {
            v.im = 0.0;
        }
    }
}

/// Real parts, or the first entry whose imaginary part is too large.
pub fn real_parts(values: &[Complex64], tolerance: f64) -> Result<Vec<f64>, (usize, f64)> {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| {
            if v.im.abs() <= tolerance {
                Ok(v.re)
            } else {
                Err((i, v.im))
            }
        })
        .collect()
}

/// Circular convolution of two length-q sequences, evaluated directly.
pub fn circular_convolution(a: &[f64], b: &[f64]) -> Vec<f64> {
    let q = a.len();
    let mut out = vec![0.0; q];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[(i + j) % q] += x * y;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn two_point_is_sum_and_difference() {
        let out = forward_real(&[3.0, 1.25]);
        assert_eq!(out, vec![c(4.25), c(1.75)]);
    }

    #[test]
    fn inverse_undoes_forward() {
        let x = vec![c(1.0), Complex64::new(0.5, -2.0), c(-3.0), c(0.25), c(7.0)];
        let y = inverse(&forward(&x));
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn double_transform_is_scaled_negation(
            q in 2usize..=7,
            raw in proptest::collection::vec(-5.0f64..5.0, 14),
        ) {
            let x: Vec<Complex64> =
                (0..q).map(|i| Complex64::new(raw[2 * i], raw[2 * i + 1])).collect();
            let twice = forward(&forward(&x));
            for a in 0..q {
                let expected = x[(q - a) % q] * q as f64;
                prop_assert!((twice[a] - expected).norm() < 1e-10);
            }
        }

        #[test]
        fn convolution_theorem(q in 2usize..=6, raw in proptest::collection::vec(0.0f64..1.0, 12)) {
            let a = &raw[..q];
            let b = &raw[6..6 + q];
            let direct = circular_convolution(a, b);
            let fa = forward_real(a);
            let fb = forward_real(b);
            let prod: Vec<Complex64> = fa.iter().zip(&fb).map(|(x, y)| x * y).collect();
            let via = inverse(&prod);
            for k in 0..q {
                prop_assert!((via[k].re - direct[k]).abs() < 1e-12);
                prop_assert!(via[k].im.abs() < 1e-12);
            }
        }
    }
}
