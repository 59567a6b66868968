//! Finite Fourier transforms on `Z/nZ`.
//!
//! [`dft_forward`] is the unnormalized transform with a negative exponent,
//! `u_hat(l) = sum_k exp(-2 pi i l k / n) u(k)`. [`dft_inverse`] undoes it.
//! [`unitary_dft`] is the same transform scaled by `1/sqrt(n)`, and
//! [`fourier_matrix`] is the positive-exponent unitary matrix
//! `F_jk = exp(2 pi i j k / n) / sqrt(n)` that diagonalizes circulants.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use crate::error::{check_len, domain, Result};

/// `exp(sign * 2 pi i j / n)` with `j` reduced mod `n` first.
fn twiddle(j: usize, n: usize, sign: f64) -> Complex64 {
    let r = (j % n) as f64;
    Complex64::from_polar(1.0, sign * 2.0 * PI * r / n as f64)
}

fn transform(v: &[Complex64], sign: f64) -> Vec<Complex64> {
    let n = v.len();
    if n.is_power_of_two() {
        radix2(v, sign)
    } else {
        let table: Vec<Complex64> = (0..n).map(|j| twiddle(j, n, sign)).collect();
        (0..n)
            .map(|l| {
                let mut acc = Complex64::new(0.0, 0.0);
                for (k, x) in v.iter().enumerate() {
                    acc += table[(l * k) % n] * x;
                }
                acc
            })
            .collect()
    }
}

/// Iterative Cooley-Tukey, decimation in time.
fn radix2(v: &[Complex64], sign: f64) -> Vec<Complex64> {
    let n = v.len();
    let bits = n.trailing_zeros();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    for (i, x) in v.iter().enumerate() {
        let j = if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) };
        out[j] = *x;
    }
    let table: Vec<Complex64> = (0..n / 2).map(|j| twiddle(j, n, sign)).collect();
    let mut len = 2;
    while len <= n {
        let stride = n / len;
        for start in (0..n).step_by(len) {
            for j in 0..len / 2 {
                let w = table[j * stride];
                let a = out[start + j];
                let b = out[start + j + len / 2] * w;
                out[start + j] = a + b;
                out[start + j + len / 2] = a - b;
            }
        }
        len <<= 1;
    }
    out
}

fn check_size(v: &[Complex64], n: usize) -> Result<()> {
    if n == 0 {
        return domain("transform length must be positive");
    }
    check_len(n, v.len())
}

pub fn dft_forward(v: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    check_size(v, n)?;
    Ok(transform(v, -1.0))
}

pub fn dft_inverse(v: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    check_size(v, n)?;
    let scale = 1.0 / n as f64;
    Ok(transform(v, 1.0).into_iter().map(|z| z * scale).collect())
}

/// `dft_forward(v) / sqrt(n)`; preserves the Euclidean norm.
pub fn unitary_dft(v: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = v.len();
    let s = 1.0 / (n as f64).sqrt();
    Ok(dft_forward(v, n)?.into_iter().map(|z| z * s).collect())
}

pub fn fourier_matrix(n: usize) -> ComplexMatrix {
    let s = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |j, k| twiddle(j * k, n, 1.0) * s)
}
