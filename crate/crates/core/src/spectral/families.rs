//! Generators for the concrete circulant-plus-diagonal families.

use std::f64::consts::PI;

use super::circulant::{CirculantPlusDiagonal, HermitianCirculant, RealDiagonal};
use crate::arith::{mod_pow, primitive_root, require_prime};
use crate::error::{domain, Result};

/// Harper matrix: `1/4` at circulant offsets `+-1`, diagonal `cos(2 pi a j / n) / 2`.
pub fn build_harper(n: usize, a: usize) -> Result<CirculantPlusDiagonal> {
    if n < 3 {
        return domain(format!("Harper matrix needs n >= 3, got {n}"));
    }
    if a >= n {
        return domain(format!("frequency a must lie in 0..{n}, got {a}"));
    }
    let circulant = HermitianCirculant::nearest_neighbor(n, 0.25)?;
    let diagonal = RealDiagonal::new(
        (0..n)
            .map(|j| 0.5 * (2.0 * PI * ((a * j) % n) as f64 / n as f64).cos())
            .collect(),
    )?;
    CirculantPlusDiagonal::new(circulant, diagonal)
}

/// Fourier transform of the five-point affine-group walk at its
/// `(p-1)`-dimensional representation, in the basis `delta_{g^a}`,
/// `a = 0..p-2`, with `g` the smallest primitive root. Row `a` carries
/// diagonal `(1 + 2 cos(2 pi g^a / p)) / 5`; `1/5` sits at offsets `+-1`.
pub fn build_affine_transform(p: usize) -> Result<CirculantPlusDiagonal> {
    require_prime(p)?;
    if p < 5 {
        return domain(format!(
            "affine transform needs p >= 5 for a circulant of size >= 3, got {p}"
        ));
    }
    let g = primitive_root(p as u64)?;
    let m = p - 1;
    let circulant = HermitianCirculant::nearest_neighbor(m, 0.2)?;
    let diagonal = RealDiagonal::new(
        (0..m)
            .map(|a| {
                let x = mod_pow(g, a as u64, p as u64) as f64;
                (1.0 + 2.0 * (2.0 * PI * x / p as f64).cos()) / 5.0
            })
            .collect(),
    )?;
    CirculantPlusDiagonal::new(circulant, diagonal)
}

/// Harper-type matrix of size `p` with diagonal `cos(2 pi c (1 + j p) / p^2) / 2`.
pub fn build_mp3_diagonal(p: usize, c: usize) -> Result<CirculantPlusDiagonal> {
    require_prime(p)?;
    if p < 3 {
        return domain(format!("need p >= 3, got {p}"));
    }
    if c == 0 || c >= p {
        return domain(format!("c must lie in 1..{p}, got {c}"));
    }
    let p2 = p * p;
    let circulant = HermitianCirculant::nearest_neighbor(p, 0.25)?;
    let diagonal = RealDiagonal::new(
        (0..p)
            .map(|j| {
                let r = (c * (1 + j * p)) % p2;
                0.5 * (2.0 * PI * r as f64 / p2 as f64).cos()
            })
            .collect(),
    )?;
    CirculantPlusDiagonal::new(circulant, diagonal)
}
