use std::f64::consts::PI;

use super::{GroupDistribution, GroupKind};
use crate::arith::{mod_inv, primitive_root};
use crate::error::{Error, Result};
use crate::spectral::families::build_affine_transform;

/// `(a, b)` acting as `x -> a x + b`; product `(a1 a2, a1 b2 + b1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AffineElement {
    pub a: usize,
    pub b: usize,
    pub p: usize,
}

impl AffineElement {
    /// `a` must be nonzero mod `p`.
    pub fn new(a: usize, b: usize, p: usize) -> Self {
        debug_assert!(!a.is_multiple_of(p));
        Self { a: a % p, b: b % p, p }
    }

    pub fn try_new(a: usize, b: usize, p: usize) -> Result<Self> {
        if a.is_multiple_of(p) {
            return Err(Error::Domain(format!("a = {a} is zero mod {p}")));
        }
        Ok(Self::new(a, b, p))
    }

    pub fn identity(p: usize) -> Self {
        Self::new(1, 0, p)
    }

    pub fn index(&self) -> usize {
        (self.a - 1) * self.p + self.b
    }

    pub fn from_index(i: usize, p: usize) -> Self {
        Self::new(i / p + 1, i % p, p)
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.p != o.p {
            return Err(Error::GroupMismatch(format!("moduli {} and {}", self.p, o.p)));
        }
        Ok(self.mul_unchecked(o))
    }

    pub(crate) fn mul_unchecked(&self, o: &Self) -> Self {
        let p = self.p;
        Self::new(self.a * o.a % p, (self.a * o.b + self.b) % p, p)
    }

    pub fn inverse(&self) -> Self {
        let p = self.p;
        let ai = mod_inv(self.a as u64, p as u64) as usize;
        Self::new(ai, (p - ai * self.b % p) % p, p)
    }
}

/// Uniform on `(1, 0), (1, 1), (1, -1), (g, 0), (g^-1, 0)` with `g` the
/// smallest primitive root.
pub fn affine_step(p: usize) -> Result<GroupDistribution> {
    let kind = GroupKind::affine(p)?;
    let g = primitive_root(p as u64)? as usize;
    let gi = mod_inv(g as u64, p as u64) as usize;
    let gens = [(1, 0), (1, 1), (1, p - 1), (g, 0), (gi, 0)].map(|(a, b)| AffineElement::new(a, b, p).index());
    GroupDistribution::uniform_on(kind, &gens)
}

/// Chi-square distance to uniform after `k` steps, through Plancherel: the
/// characters `alpha = 1..p-2` contribute `(3/5 + 2/5 cos(2 pi alpha / (p-1)))^(2k)`
/// and the representation of dimension `p - 1` contributes
/// `(p - 1) ||Q_hat^k||_F^2`.
pub fn affine_chi_square_bound(p: usize, k: usize) -> Result<f64> {
    let m = (p - 1) as f64;
    let linear: f64 = (1..p - 1)
        .map(|alpha| (0.6 + 0.4 * (2.0 * PI * alpha as f64 / m).cos()).powi(2 * k as i32))
        .sum();
    let ev = build_affine_transform(p)?.eigenvalues()?;
    Ok(linear + m * ev.iter().map(|l| l.powi(2 * k as i32)).sum::<f64>())
}
