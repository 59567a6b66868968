//! Limiting bulk density of the Harper spectrum and Wasserstein comparisons.
//!
//! The diagonal `cos(2 pi a j / n)` and the circulant eigenvalues `cos(2 pi b / n)`
//! both follow the arcsine law, and the bulk of `M_n(a)` approaches the law of
//! `(X + Y) / 2` for independent arcsine `X, Y`. Its density is
//! `f2(x) = 4 K((1 - |x|) / (1 + |x|)) / (pi^2 (1 + |x|))`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::report::{cell, fmt_f64, Table};
use crate::spectral::families::build_harper;

/// Largest matrix accepted by [`figure1_data`].
pub const MAX_FIGURE_N: usize = 10_000;
pub const MIN_BINS: usize = 20;
/// Intervals of the CDF grid, uniform in `t = sqrt(|x|)`.
pub const CDF_GRID: usize = 10_000;

/// A density value, or a flag for the integrable singularities at which the
/// formula has no finite value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Density {
    Value(f64),
    Singular,
}

impl Density {
    pub fn value(self) -> Option<f64> {
        match self {
            Density::Value(v) => Some(v),
            Density::Singular => None,
        }
    }
}

/// `K` from the complementary modulus `sqrt(1 - m^2)`, passed directly so
/// callers near `m = 1` avoid cancellation.
fn agm_k_complementary(kp: f64) -> f64 {
    let mut a = 1.0f64;
    let mut b = kp;
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a {
            break;
        }
        let next = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = next;
    }
    PI / (2.0 * a)
}

/// Complete elliptic integral of the first kind with modulus `m`:
/// `K(m) = int_0^{pi/2} dtheta / sqrt(1 - m^2 sin^2 theta)`.
pub fn elliptic_k(m: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&m) {
        return domain(format!("elliptic modulus must lie in [0, 1), got {m}"));
    }
    Ok(agm_k_complementary((1.0 - m * m).sqrt()))
}

/// `1 / (pi sqrt(1 - x^2))` on `(-1, 1)`; singular at `+-1`, zero outside.
pub fn arcsine_density(x: f64) -> Density {
    let ax = x.abs();
    if ax == 1.0 {
        Density::Singular
    } else if ax > 1.0 {
        Density::Value(0.0)
    } else {
        Density::Value(1.0 / (PI * (1.0 - x * x).sqrt()))
    }
}

pub fn arcsine_cdf(x: f64) -> f64 {
    0.5 + x.clamp(-1.0, 1.0).asin() / PI
}

/// `count` draws of `cos(2 pi a U)`, `U` uniform on `[0, 1)`.
pub fn cosine_samples(a: usize, count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (2.0 * PI * a as f64 * rng.gen::<f64>()).cos())
        .collect()
}

/// Bulk density; log-singular at 0, zero for `|x| > 1`, `f2(+-1) = 1/pi`.
pub fn f2_density(x: f64) -> Density {
    let ax = x.abs();
    if ax == 0.0 {
        Density::Singular
    } else if ax > 1.0 {
        Density::Value(0.0)
    } else {
        // 1 - m^2 = 4|x| / (1 + |x|)^2 for m = (1 - |x|) / (1 + |x|).
        let kp = 2.0 * ax.sqrt() / (1.0 + ax);
        Density::Value(4.0 * agm_k_complementary(kp) / (PI * PI * (1.0 + ax)))
    }
}

/// `int dt / sqrt((1 - t^2)(1 - (x - t)^2))` over the overlap of the two
/// supports, in closed form `4 K((2 - |x|) / (2 + |x|)) / (2 + |x|)`.
pub fn f3_integral(x: f64) -> Density {
    let ax = x.abs();
    if ax == 0.0 {
        Density::Singular
    } else if ax > 2.0 {
        Density::Value(0.0)
    } else {
        let kp = 2.0 * (2.0 * ax).sqrt() / (2.0 + ax);
        Density::Value(4.0 * agm_k_complementary(kp) / (2.0 + ax))
    }
}

/// Symmetric density on `[-1, 1]` with a cached half-CDF.
///
/// Grid nodes are `x_i = t_i^2` with `t_i` uniform, which absorbs the
/// logarithmic singularity at 0. The density must be finite on `(0, 1]`.
#[derive(Debug, Clone)]
pub struct DensityCurve {
    density: fn(f64) -> Density,
    t: Vec<f64>,
    /// `half[i] = int_0^{x_i} f`.
    half: Vec<f64>,
    slopes: Vec<f64>,
}

fn finite_density(f: fn(f64) -> Density, x: f64) -> Result<f64> {
    match f(x) {
        Density::Value(v) if v.is_finite() && v >= 0.0 => Ok(v),
        other => Err(Error::Numerical(format!("degenerate density {other:?} at x = {x}"))),
    }
}

impl DensityCurve {
    pub fn new(density: fn(f64) -> Density) -> Result<Self> {
        let n = CDF_GRID;
        let h = 1.0 / n as f64;
        // Integrand in t: f(t^2) 2t, which tends to 0 at t = 0.
        let g = |t: f64| -> Result<f64> {
            if t == 0.0 {
                Ok(0.0)
            } else {
                Ok(finite_density(density, t * t)? * 2.0 * t)
            }
        };
        let t: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
        let mut half = Vec::with_capacity(n + 1);
        half.push(0.0);
        let mut left = g(0.0)?;
        for i in 0..n {
            let mid = g(t[i] + 0.5 * h)?;
            let right = g(t[i + 1])?;
            let prev = half[i];
            half.push(prev + h / 6.0 * (left + 4.0 * mid + right));
            left = right;
        }
        if half.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Numerical("density vanishes on part of (0, 1]".into()));
        }
        let slopes = pchip_slopes(&half, &t.iter().map(|t| t * t).collect::<Vec<_>>());
        Ok(Self {
            density,
            t,
            half,
            slopes,
        })
    }

    pub fn f2() -> Result<Self> {
        Self::new(f2_density)
    }

    pub fn density(&self, x: f64) -> Density {
        (self.density)(x)
    }

    /// Raw integral over `[-1, 1]` before normalization.
    pub fn total_mass(&self) -> f64 {
        2.0 * self.half[CDF_GRID]
    }

    fn half_integral(&self, ax: f64) -> f64 {
        if ax >= 1.0 {
            return self.half[CDF_GRID];
        }
        let s = ax.sqrt();
        let i = ((s * CDF_GRID as f64) as usize).min(CDF_GRID - 1);
        let (t0, t1) = (self.t[i], s);
        let g = |t: f64| match (self.density)(t * t) {
            Density::Value(v) => v * 2.0 * t,
            Density::Singular => 0.0,
        };
        self.half[i] + (t1 - t0) / 6.0 * (g(t0) + 4.0 * g(0.5 * (t0 + t1)) + g(t1))
    }

    /// Normalized distribution function.
    pub fn cdf(&self, x: f64) -> f64 {
        let h = self.half_integral(x.abs()) / self.total_mass();
        if x < 0.0 {
            0.5 - h
        } else {
            0.5 + h
        }
    }

    /// Inverse of [`cdf`](Self::cdf) by monotone cubic interpolation of
    /// `x` against the half-CDF.
    pub fn quantile(&self, u: f64) -> f64 {
        let target = (u.clamp(0.0, 1.0) - 0.5) * self.total_mass();
        let r = target.abs();
        let top = self.half[CDF_GRID];
        let ax = if r >= top {
            1.0
        } else {
            let i = self.half.partition_point(|&h| h <= r).saturating_sub(1).min(CDF_GRID - 1);
            let (h0, h1) = (self.half[i], self.half[i + 1]);
            let (x0, x1) = (self.t[i] * self.t[i], self.t[i + 1] * self.t[i + 1]);
            hermite(r, h0, h1, x0, x1, self.slopes[i], self.slopes[i + 1]).clamp(x0, x1)
        };
        if target < 0.0 {
            -ax
        } else {
            ax
        }
    }
}

/// Fritsch-Carlson slopes for `y` as a function of increasing `x`.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let d: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut m = vec![0.0; n];
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for i in 1..n - 1 {
        if d[i - 1] * d[i] > 0.0 {
            let (w1, w2) = (2.0 * h[i] + h[i - 1], h[i] + 2.0 * h[i - 1]);
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    m
}

fn hermite(x: f64, x0: f64, x1: f64, y0: f64, y1: f64, m0: f64, m1: f64) -> f64 {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let (s2, s3) = (s * s, s * s * s);
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * h * m0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * h * m1
}

/// Uniform measure on sorted atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    atoms: Vec<f64>,
}

impl EmpiricalMeasure {
    pub fn new(mut atoms: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() {
            return domain("empirical measure needs at least one atom");
        }
        if atoms.iter().any(|a| !a.is_finite()) {
            return domain("atoms must be finite");
        }
        atoms.sort_by(f64::total_cmp);
        Ok(Self { atoms })
    }

    /// Spectral measure of `M_n(a)`.
    pub fn harper(n: usize, a: usize) -> Result<Self> {
        Self::new(build_harper(n, a)?.eigenvalues()?)
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Left-continuous quantile: atom `ceil(u n) - 1`.
    pub fn quantile(&self, u: f64) -> f64 {
        let n = self.atoms.len();
        let i = ((u * n as f64).ceil() as usize).clamp(1, n) - 1;
        self.atoms[i]
    }
}

/// `sqrt(int_0^1 (Q_emp(u) - Q_curve(u))^2 du)` by the midpoint rule on at
/// least `10 n` points.
pub fn wasserstein2(emp: &EmpiricalMeasure, curve: &DensityCurve) -> f64 {
    let m = (10 * emp.len()).max(CDF_GRID);
    let sum: f64 = (0..m)
        .map(|j| {
            let u = (j as f64 + 0.5) / m as f64;
            let d = emp.quantile(u) - curve.quantile(u);
            d * d
        })
        .sum();
    (sum / m as f64).sqrt()
}

/// Exact distance between two empirical measures: both quantile functions
/// are step functions, so the integral is a finite sum over merged breaks.
pub fn wasserstein2_empirical(p: &EmpiricalMeasure, q: &EmpiricalMeasure) -> f64 {
    let (n, m) = (p.len(), q.len());
    let (mut i, mut j) = (0usize, 0usize);
    let mut u = 0.0f64;
    let mut sum = 0.0;
    while i < n && j < m {
        // Next break is min((i+1)/n, (j+1)/m), compared without rounding.
        let (next, adv_i, adv_j) = match ((i + 1) * m).cmp(&((j + 1) * n)) {
            std::cmp::Ordering::Less => ((i + 1) as f64 / n as f64, true, false),
            std::cmp::Ordering::Greater => ((j + 1) as f64 / m as f64, false, true),
            std::cmp::Ordering::Equal => ((i + 1) as f64 / n as f64, true, true),
        };
        let d = p.atoms[i] - q.atoms[j];
        sum += (next - u) * d * d;
        u = next;
        i += adv_i as usize;
        j += adv_j as usize;
    }
    sum.sqrt()
}

#[derive(Debug, Clone, Serialize)]
pub struct HistogramBin {
    pub left: f64,
    pub right: f64,
    pub count: usize,
    pub empirical_density: f64,
    /// `None` when the midpoint is the singular point 0.
    pub f2_at_midpoint: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Figure1Data {
    pub n: usize,
    pub a: usize,
    pub bins: Vec<HistogramBin>,
}

impl Figure1Data {
    /// Largest `|empirical - f2|` over bins whose midpoint has `|x|` in `[lo, hi]`.
    pub fn max_bin_error(&self, lo: f64, hi: f64) -> f64 {
        self.bins
            .iter()
            .filter_map(|b| {
                let mid = 0.5 * (b.left + b.right);
                let inside = (lo..=hi).contains(&mid.abs());
                match (inside, b.f2_at_midpoint) {
                    (true, Some(f)) => Some((b.empirical_density - f).abs()),
                    _ => None,
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn to_table(&self) -> Table {
        let mut t = Table::new(&["bin_left", "bin_right", "count", "empirical_density", "f2_at_midpoint"]);
        for b in &self.bins {
            t.push(vec![
                fmt_f64(b.left),
                fmt_f64(b.right),
                b.count.to_string(),
                fmt_f64(b.empirical_density),
                cell(b.f2_at_midpoint),
            ]);
        }
        t
    }
}

/// Histogram of the atoms on `[-1, 1]` in `bins` equal cells.
pub fn histogram(emp: &EmpiricalMeasure, bins: usize, density: fn(f64) -> Density) -> Result<Vec<HistogramBin>> {
    if bins < MIN_BINS {
        return domain(format!("need at least {MIN_BINS} bins, got {bins}"));
    }
    let width = 2.0 / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in emp.atoms() {
        if !(-1.0..=1.0).contains(&x) {
            return Err(Error::Numerical(format!("atom {x} outside [-1, 1]")));
        }
        let k = (((x + 1.0) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let n = emp.len() as f64;
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(k, count)| {
            let left = -1.0 + k as f64 * width;
            let right = if k + 1 == bins { 1.0 } else { -1.0 + (k + 1) as f64 * width };
            HistogramBin {
                left,
                right,
                count,
                empirical_density: count as f64 / (n * width),
                // Exact 0 for the middle bin of an odd count.
                f2_at_midpoint: density(-1.0 + (2 * k + 1) as f64 / bins as f64).value(),
            }
        })
        .collect())
}

pub fn figure1_data(n: usize, a: usize, bins: usize) -> Result<Figure1Data> {
    if n > MAX_FIGURE_N {
        return domain(format!("n = {n} exceeds the runtime guard {MAX_FIGURE_N}"));
    }
    if bins < MIN_BINS {
        return domain(format!("need at least {MIN_BINS} bins, got {bins}"));
    }
    let emp = EmpiricalMeasure::harper(n, a)?;
    Ok(Figure1Data {
        n,
        a,
        bins: histogram(&emp, bins, f2_density)?,
    })
}

/// `(x, f2(x))` at the midpoints of `points` equal cells of `[-1, 1]`,
/// skipping the singular midpoint 0.
pub fn density_table(points: usize) -> Table {
    let mut t = Table::new(&["x", "f2"]);
    for j in 0..points {
        let x = -1.0 + (2 * j + 1) as f64 / points as f64;
        if let Density::Value(v) = f2_density(x) {
            t.push(vec![fmt_f64(x), fmt_f64(v)]);
        }
    }
    t
}

#[derive(Debug, Clone, Serialize)]
pub struct BulkReport {
    pub n: usize,
    pub a: usize,
    pub bins: usize,
    pub wasserstein2: f64,
    pub max_bin_error: f64,
    pub f2_at_099: f64,
    pub total_mass: f64,
}

/// Full pipeline: spectrum, histogram, and distance to the limit law.
pub fn bulk_report(n: usize, a: usize, bins: usize) -> Result<(BulkReport, Figure1Data)> {
    let fig = figure1_data(n, a, bins)?;
    let curve = DensityCurve::f2()?;
    let emp = EmpiricalMeasure::harper(n, a)?;
    let report = BulkReport {
        n,
        a,
        bins,
        wasserstein2: wasserstein2(&emp, &curve),
        max_bin_error: fig.max_bin_error(0.1, 0.9),
        f2_at_099: f2_density(0.99).value().unwrap_or(f64::NAN),
        total_mass: curve.total_mass(),
    };
    Ok((report, fig))
}
