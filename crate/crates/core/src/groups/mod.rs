//! Random walks on the Heisenberg group mod `n` and the affine group mod `p`.
//!
//! Distributions are dense vectors indexed by a fixed enumeration of the
//! group. Convolution is exact; Fourier transforms at every irreducible
//! representation give the chi-square distance through Plancherel.

mod affine;
mod fourier;
mod heisenberg;

pub use affine::{affine_chi_square_bound, affine_step, AffineElement};
pub use fourier::{affine_irreps, fourier_inversion, fourier_transform, heisenberg_irreps, Irrep, IrrepTable};
pub use heisenberg::{heisenberg_chi_square, heisenberg_step, HeisenbergElement};

use serde::Serialize;

use crate::arith::{is_prime, mod_inv};
use crate::error::{domain, Error, Result};
use crate::report::{cell, fmt_f64, Table};

/// Brute-force work is refused above this many elements.
pub const MAX_GROUP_ORDER: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "group", rename_all = "lowercase")]
pub enum GroupKind {
    /// Upper unitriangular 3x3 matrices over `Z/nZ`, order `n^3`.
    Heisenberg { n: usize },
    /// Maps `x -> a x + b` over `Z/pZ`, `a != 0`, order `p (p - 1)`.
    Affine { p: usize },
}

impl GroupKind {
    pub fn heisenberg(n: usize) -> Result<Self> {
        if n < 2 {
            return domain(format!("Heisenberg modulus must be at least 2, got {n}"));
        }
        Ok(Self::Heisenberg { n })
    }

    pub fn affine(p: usize) -> Result<Self> {
        if !is_prime(p as u64) {
            return domain(format!("affine group needs a prime modulus, got {p}"));
        }
        Ok(Self::Affine { p })
    }

    pub fn order(&self) -> usize {
        match *self {
            Self::Heisenberg { n } => n * n * n,
            Self::Affine { p } => p * (p - 1),
        }
    }

    pub fn identity(&self) -> usize {
        match *self {
            Self::Heisenberg { .. } => 0,
            // (a, b) = (1, 0).
            Self::Affine { .. } => 0,
        }
    }

    pub fn mul(&self, i: usize, j: usize) -> usize {
        match *self {
            Self::Heisenberg { n } => {
                HeisenbergElement::from_index(i, n).mul_unchecked(&HeisenbergElement::from_index(j, n)).index()
            }
            Self::Affine { p } => {
                AffineElement::from_index(i, p).mul_unchecked(&AffineElement::from_index(j, p)).index()
            }
        }
    }

    pub fn inverse(&self, i: usize) -> usize {
        match *self {
            Self::Heisenberg { n } => HeisenbergElement::from_index(i, n).inverse().index(),
            Self::Affine { p } => {
                let e = AffineElement::from_index(i, p);
                let ai = mod_inv(e.a as u64, p as u64) as usize;
                AffineElement::new(ai, (p - ai * e.b % p) % p, p).index()
            }
        }
    }

    fn check_brute_force(&self) -> Result<()> {
        let m = self.order();
        if m > MAX_GROUP_ORDER {
            return domain(format!(
                "group of order {m} exceeds the brute-force limit {MAX_GROUP_ORDER}"
            ));
        }
        Ok(())
    }
}

/// Probability vector on a group.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupDistribution {
    kind: GroupKind,
    weights: Vec<f64>,
}

const MASS_TOL: f64 = 1e-12;

impl GroupDistribution {
    pub fn new(kind: GroupKind, weights: Vec<f64>) -> Result<Self> {
        kind.check_brute_force()?;
        if weights.len() != kind.order() {
            return Err(Error::Dimension {
                expected: kind.order(),
                actual: weights.len(),
            });
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
            return domain(format!("weight {w} is negative or not finite"));
        }
        let mass: f64 = weights.iter().sum();
        if (mass - 1.0).abs() > MASS_TOL {
            return domain(format!("weights sum to {mass}, not 1"));
        }
        Ok(Self { kind, weights })
    }

    pub fn point_mass(kind: GroupKind, g: usize) -> Result<Self> {
        let mut w = vec![0.0; kind.order()];
        if g >= w.len() {
            return domain(format!("element index {g} outside the group"));
        }
        w[g] = 1.0;
        Self::new(kind, w)
    }

    pub fn uniform(kind: GroupKind) -> Result<Self> {
        let m = kind.order();
        Self::new(kind, vec![1.0 / m as f64; m])
    }

    /// Equal mass on each listed element; repeats accumulate.
    pub fn uniform_on(kind: GroupKind, elements: &[usize]) -> Result<Self> {
        let mut w = vec![0.0; kind.order()];
        for &g in elements {
            if g >= w.len() {
                return domain(format!("element index {g} outside the group"));
            }
            w[g] += 1.0 / elements.len() as f64;
        }
        Self::new(kind, w)
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn same_group(&self, other: &Self) -> Result<()> {
        if self.kind != other.kind {
            return Err(Error::GroupMismatch(format!(
                "{:?} vs {:?}",
                self.kind, other.kind
            )));
        }
        Ok(())
    }

    /// `(P * Q)(s h) += P(s) Q(h)`: first `P`, then `Q`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.same_group(other)?;
        let mut out = vec![0.0; self.weights.len()];
        let right: Vec<(usize, f64)> = other
            .weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w > 0.0)
            .map(|(h, w)| (h, *w))
            .collect();
        for (s, &ps) in self.weights.iter().enumerate() {
            if ps == 0.0 {
                continue;
            }
            for &(h, qh) in &right {
                out[self.kind.mul(s, h)] += ps * qh;
            }
        }
        Ok(Self {
            kind: self.kind,
            weights: out,
        })
    }

    /// `k`-fold convolution power; `k = 0` gives the point mass at the identity.
    pub fn power(&self, k: usize) -> Result<Self> {
        let mut acc = Self::point_mass(self.kind, self.kind.identity())?;
        for _ in 0..k {
            acc = acc.convolve(self)?;
        }
        Ok(acc)
    }

    pub fn tv_distance(&self, other: &Self) -> Result<f64> {
        self.same_group(other)?;
        Ok(0.5 * self.weights.iter().zip(&other.weights).map(|(a, b)| (a - b).abs()).sum::<f64>())
    }

    /// `sum_g |P(g) - U(g)|^2 / U(g)`.
    pub fn chi_square_to_uniform(&self) -> f64 {
        let m = self.weights.len() as f64;
        m * self.weights.iter().map(|w| (w - 1.0 / m).powi(2)).sum::<f64>()
    }

    pub fn tv_to_uniform(&self) -> f64 {
        let m = self.weights.len() as f64;
        0.5 * self.weights.iter().map(|w| (w - 1.0 / m).abs()).sum::<f64>()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistancePoint {
    pub k: usize,
    pub chi_square: f64,
    pub tv_exact: Option<f64>,
    /// `sqrt(chi_square) / 2`.
    pub tv_upper_bound: f64,
}

/// Distance to uniform after `1..=k_max` steps. Exact TV comes from brute-force
/// convolution when `step` is given.
pub fn distance_curve(
    chi_square: impl Fn(usize) -> Result<f64>,
    step: Option<&GroupDistribution>,
    k_max: usize,
) -> Result<Vec<DistancePoint>> {
    let mut current = match step {
        Some(q) => Some(GroupDistribution::point_mass(q.kind(), q.kind().identity())?),
        None => None,
    };
    let mut out = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let tv_exact = match (&mut current, step) {
            (Some(c), Some(q)) => {
                *c = c.convolve(q)?;
                Some(c.tv_to_uniform())
            }
            _ => None,
        };
        let chi = chi_square(k)?;
        out.push(DistancePoint {
            k,
            chi_square: chi,
            tv_exact,
            tv_upper_bound: 0.5 * chi.sqrt(),
        });
    }
    Ok(out)
}

pub fn distance_curve_csv(points: &[DistancePoint]) -> Table {
    let mut t = Table::new(&["k", "chi_square", "tv_exact", "tv_upper_bound"]);
    for p in points {
        t.push(vec![
            p.k.to_string(),
            fmt_f64(p.chi_square),
            cell(p.tv_exact),
            fmt_f64(p.tv_upper_bound),
        ]);
    }
    t
}

/// Smallest `k` in `1..=k_max` with `chi_square(k) <= threshold`.
pub fn mixing_step(chi_square: impl Fn(usize) -> Result<f64>, threshold: f64, k_max: usize) -> Result<Option<usize>> {
    for k in 1..=k_max {
        if chi_square(k)? <= threshold {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn kinds() -> Vec<GroupKind> {
        vec![
            GroupKind::heisenberg(3).unwrap(),
            GroupKind::heisenberg(4).unwrap(),
            GroupKind::affine(5).unwrap(),
            GroupKind::affine(7).unwrap(),
        ]
    }

    #[test]
    fn group_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for g in kinds() {
            let m = g.order();
            let e = g.identity();
            for _ in 0..1000 {
                let (a, b, c) = (rng.gen_range(0..m), rng.gen_range(0..m), rng.gen_range(0..m));
                assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
                assert_eq!(g.mul(e, a), a);
                assert_eq!(g.mul(a, e), a);
                assert_eq!(g.mul(a, g.inverse(a)), e);
                assert_eq!(g.mul(g.inverse(a), a), e);
            }
        }
    }

    #[test]
    fn convolution_identities() {
        for g in kinds() {
            let q = match g {
                GroupKind::Heisenberg { n } => heisenberg_step(n).unwrap(),
                GroupKind::Affine { p } => affine_step(p).unwrap(),
            };
            let delta = GroupDistribution::point_mass(g, g.identity()).unwrap();
            assert_eq!(q.convolve(&delta).unwrap(), q);
            assert_eq!(delta.convolve(&q).unwrap(), q);
            let u = GroupDistribution::uniform(g).unwrap();
            let uq = u.convolve(&q).unwrap();
            assert!(uq.tv_distance(&u).unwrap() < 1e-15);
            let q3 = q.power(3).unwrap();
            assert!((q3.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_step_matches_path_enumeration() {
        let g = GroupKind::heisenberg(3).unwrap();
        let q = heisenberg_step(3).unwrap();
        let support: Vec<usize> = (0..g.order()).filter(|&i| q.weights()[i] > 0.0).collect();
        assert_eq!(support.len(), 4);
        let mut direct = vec![0.0; g.order()];
        for &s in &support {
            for &h in &support {
                direct[g.mul(s, h)] += 1.0 / 16.0;
            }
        }
        let q2 = q.power(2).unwrap();
        for (a, b) in q2.weights().iter().zip(&direct) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn tv_basics() {
        let g = GroupKind::affine(5).unwrap();
        let d = GroupDistribution::point_mass(g, 3).unwrap();
        let u = GroupDistribution::uniform(g).unwrap();
        assert_eq!(d.tv_distance(&d).unwrap(), 0.0);
        assert!((d.tv_distance(&u).unwrap() - (1.0 - 1.0 / 20.0)).abs() < 1e-15);
        let h = GroupDistribution::uniform(GroupKind::heisenberg(3).unwrap()).unwrap();
        assert!(matches!(d.tv_distance(&h), Err(Error::GroupMismatch(_))));
        assert!(matches!(d.convolve(&h), Err(Error::GroupMismatch(_))));
    }

    #[test]
    fn long_run_uniformity() {
        let q = heisenberg_step(3).unwrap().power(50).unwrap();
        assert!(q.tv_to_uniform() <= 1e-3);
    }

    #[test]
    fn validation() {
        let g = GroupKind::heisenberg(3).unwrap();
        assert!(GroupDistribution::new(g, vec![0.5; 27]).is_err());
        assert!(GroupDistribution::new(g, vec![1.0; 3]).is_err());
        assert!(GroupKind::affine(8).is_err());
        assert!(GroupDistribution::uniform(GroupKind::heisenberg(47).unwrap()).is_err());
    }

    #[test]
    fn curve_and_mixing_step() {
        let q = affine_step(7).unwrap();
        let pts = distance_curve(|k| affine_chi_square_bound(7, k), Some(&q), 30).unwrap();
        for p in &pts {
            assert!(p.tv_exact.unwrap() <= p.tv_upper_bound + 1e-12);
        }
        let csv = distance_curve_csv(&pts).to_csv();
        assert!(csv.starts_with("k,chi_square,tv_exact,tv_upper_bound\n"));
        let k = mixing_step(|k| affine_chi_square_bound(7, k), 0.1, 1000).unwrap().unwrap();
        assert!(affine_chi_square_bound(7, k).unwrap() <= 0.1);
        assert!(affine_chi_square_bound(7, k - 1).unwrap() > 0.1);
    }
}
