//! Edge of the Harper spectrum and its harmonic-oscillator limit.
//!
//! Near the top, `n (I - M_n)` behaves like `-1/4 d^2/dx^2 + pi^2 x^2` on the
//! line after rescaling position by `sqrt(n)`, so `n (1 - lambda_k(M_n))`
//! tends to `(2k - 1) pi / 2`. A unitary shift-and-twist maps the bottom of
//! the spectrum to the top.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{check_len, domain, Error, Result};
use crate::report::{fmt_f64, Table};
use crate::spectral::circulant::CirculantPlusDiagonal;
use crate::spectral::dft::dft_forward;
use crate::spectral::families::build_harper;
use crate::spectral::matrix::ComplexMatrix;

/// `n (I - M)` for a Harper-type `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledOperator {
    base: CirculantPlusDiagonal,
}

impl ScaledOperator {
    pub fn new(base: CirculantPlusDiagonal) -> Self {
        Self { base }
    }

    /// Built on `M_n(1)`.
    pub fn harper(n: usize) -> Result<Self> {
        Ok(Self::new(build_harper(n, 1)?))
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn base(&self) -> &CirculantPlusDiagonal {
        &self.base
    }

    pub fn apply(&self, u: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.n() as f64;
        let mu = self.base.apply(u)?;
        Ok(u.iter().zip(mu).map(|(x, y)| (x - y) * n).collect())
    }

    /// `u^H n (I - M) u`.
    pub fn quadratic_form(&self, u: &[Complex64]) -> Result<f64> {
        let w = self.apply(u)?;
        Ok(u.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum())
    }
}

pub fn mu_k(k: usize) -> Result<f64> {
    if k == 0 {
        return domain("oscillator level k starts at 1");
    }
    Ok((2 * k - 1) as f64 * PI / 2.0)
}

/// `u^H n (I - M_n(1)) u` by applying the matrix.
pub fn quadratic_form_direct(u: &[Complex64], n: usize) -> Result<f64> {
    check_len(n, u.len())?;
    ScaledOperator::harper(n)?.quadratic_form(u)
}

/// The same form split into a frequency part and a position part:
/// `sum_l sin^2(pi l / n) |u_hat(l)|^2 + n sum_k sin^2(pi k / n) |u(k)|^2`.
pub fn quadratic_form_spectral(u: &[Complex64], n: usize) -> Result<f64> {
    check_len(n, u.len())?;
    let hat = dft_forward(u, n)?;
    let s2 = |j: usize| (PI * j as f64 / n as f64).sin().powi(2);
    let freq: f64 = hat.iter().enumerate().map(|(l, z)| s2(l) * z.norm_sqr()).sum();
    let pos: f64 = u.iter().enumerate().map(|(k, z)| s2(k) * z.norm_sqr()).sum();
    Ok(freq + n as f64 * pos)
}

/// Discretized oscillator eigenfunction, rolled so index 0 is the peak of
/// the ground state.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteApproximant {
    pub k: usize,
    pub n: usize,
    pub values: Vec<f64>,
}

impl HermiteApproximant {
    pub fn to_complex(&self) -> Vec<Complex64> {
        self.values.iter().map(|&x| Complex64::new(x, 0.0)).collect()
    }
}

pub const MAX_HERMITE_LEVEL: usize = 5;

fn hermite_poly(m: usize, x: f64) -> f64 {
    match m {
        0 => 1.0,
        1 => 2.0 * x,
        2 => 4.0 * x * x - 2.0,
        3 => 8.0 * x.powi(3) - 12.0 * x,
        4 => 16.0 * x.powi(4) - 48.0 * x * x + 12.0,
        _ => unreachable!("level checked by caller"),
    }
}

/// `H_{k-1}(sqrt(2 pi) x) exp(-pi x^2)` sampled at `x_j = (j - n/2) / sqrt(n)`.
pub fn hermite_approximant(n: usize, k: usize) -> Result<HermiteApproximant> {
    if k == 0 || k > MAX_HERMITE_LEVEL {
        return Err(Error::Unsupported(format!(
            "Hermite level {k} outside 1..={MAX_HERMITE_LEVEL}"
        )));
    }
    if n < 100 {
        return domain(format!("Hermite approximant needs n >= 100, got {n}"));
    }
    let center = n / 2;
    let root = (n as f64).sqrt();
    let scale = (2.0 * PI).sqrt();
    let mut values = vec![0.0; n];
    for j in 0..n {
        let x = (j as f64 - center as f64) / root;
        values[(j + n - center) % n] = hermite_poly(k - 1, scale * x) * (-PI * x * x).exp();
    }
    let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
    values.iter_mut().for_each(|v| *v /= norm);
    Ok(HermiteApproximant { k, n, values })
}

pub fn rayleigh_quotient(op: &ScaledOperator, v: &[Complex64]) -> Result<f64> {
    check_len(op.n(), v.len())?;
    let vv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if vv == 0.0 {
        return domain("Rayleigh quotient of the zero vector");
    }
    Ok(op.quadratic_form(v)? / vv)
}

/// Shift and phase of the conjugation: `v(k) = exp(2 pi i alpha k) u(k - s)`.
/// Even `n`: `s = n/2`, `alpha = -1/2`. Odd `n`: `s = (n+1)/2`,
/// `alpha = -(n+1)/(2n)`.
fn conjugation_params(n: usize) -> (usize, f64) {
    if n.is_multiple_of(2) {
        (n / 2, -0.5)
    } else {
        (n.div_ceil(2), -((n + 1) as f64) / (2.0 * n as f64))
    }
}

fn conjugation_phase(n: usize, k: usize) -> Complex64 {
    let (_, alpha) = conjugation_params(n);
    if n.is_multiple_of(2) {
        // Exact signs for even n.
        Complex64::new(if k.is_multiple_of(2) { 1.0 } else { -1.0 }, 0.0)
    } else {
        Complex64::from_polar(1.0, 2.0 * PI * alpha * k as f64)
    }
}

pub fn conjugation_unitary_apply(u: &[Complex64]) -> Vec<Complex64> {
    let n = u.len();
    if n == 0 {
        return Vec::new();
    }
    let (s, _) = conjugation_params(n);
    (0..n)
        .map(|k| conjugation_phase(n, k) * u[(k + n - s) % n])
        .collect()
}

/// Matrix of [`conjugation_unitary_apply`].
pub fn conjugation_unitary_matrix(n: usize) -> ComplexMatrix {
    let (s, _) = conjugation_params(n);
    let mut u = ComplexMatrix::zeros(n, n);
    for k in 0..n {
        u[(k, (k + n - s) % n)] = conjugation_phase(n, k);
    }
    u
}

/// Comparison of the conjugated form `u^H n (I + U M U^H) u` with the
/// top-edge form `Q(u) = u^H n (I - M) u`, for `M = M_n(1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NearNegation {
    pub conjugated: f64,
    pub q: f64,
    pub norm_sq: f64,
}

impl NearNegation {
    /// `sqrt(n) |conjugated - Q| / (Q + ||u||^2)`; bounded in `n` when the
    /// conjugation nearly negates `M`.
    pub fn scaled_ratio(&self, n: usize) -> f64 {
        (n as f64).sqrt() * (self.conjugated - self.q).abs() / (self.q + self.norm_sq)
    }
}

pub fn near_negation(u: &[Complex64]) -> Result<NearNegation> {
    let n = u.len();
    let op = ScaledOperator::harper(n)?;
    // u^H U M U^H u = w'^H M w' with w' = U^H u; U^H u is recovered by
    // inverting the shift and phase.
    let (s, _) = conjugation_params(n);
    let mut back = vec![Complex64::new(0.0, 0.0); n];
    for k in 0..n {
        back[(k + n - s) % n] = conjugation_phase(n, k).conj() * u[k];
    }
    let m_back = op.base().apply(&back)?;
    let mform: f64 = back.iter().zip(&m_back).map(|(a, b)| (a.conj() * b).re).sum();
    let norm_sq: f64 = u.iter().map(|z| z.norm_sqr()).sum();
    Ok(NearNegation {
        conjugated: n as f64 * (norm_sq + mform),
        q: op.quadratic_form(u)?,
        norm_sq,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Edge {
    Top,
    Bottom,
}

/// `1 - mu_k / n` at the top, `-1 + mu_k / n` at the bottom.
pub fn asymptotic_eigenvalue(n: usize, k: usize, end: Edge) -> Result<f64> {
    let mu = mu_k(k)?;
    Ok(match end {
        Edge::Top => 1.0 - mu / n as f64,
        Edge::Bottom => -1.0 + mu / n as f64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub k: usize,
    pub scaled_gap: f64,
    pub mu_k: f64,
    pub abs_error: f64,
}

/// `n (1 - lambda_k(M_n(1)))` against `mu_k` for every `(n, k)`.
pub fn convergence_table(ns: &[usize], levels: usize) -> Result<Vec<ConvergenceRow>> {
    let mut rows = Vec::new();
    for &n in ns {
        if levels >= n {
            return domain(format!("requested {levels} levels from a size-{n} matrix"));
        }
        let ev = build_harper(n, 1)?.eigenvalues()?;
        for k in 1..=levels {
            let scaled = n as f64 * (1.0 - ev[k - 1]);
            let mu = mu_k(k)?;
            rows.push(ConvergenceRow {
                n,
                k,
                scaled_gap: scaled,
                mu_k: mu,
                abs_error: (scaled - mu).abs(),
            });
        }
    }
    Ok(rows)
}

pub fn convergence_csv(rows: &[ConvergenceRow]) -> Table {
    let mut t = Table::new(&["n", "k", "n*(1-lambda_k)", "mu_k", "abs_error"]);
    for r in rows {
        t.push(vec![
            r.n.to_string(),
            r.k.to_string(),
            fmt_f64(r.scaled_gap),
            fmt_f64(r.mu_k),
            fmt_f64(r.abs_error),
        ]);
    }
    t
}
