//! Uncertainty-principle bounds on the extreme eigenvalues of `C + D`.
//!
//! A vector cannot be concentrated on `k` coordinates while its unitary
//! Fourier transform is concentrated on `k'` frequencies unless `k k' >= n`.
//! Applied to a top eigenvector of `C + D`, this pushes `lambda_1(C + D)`
//! strictly below the Weyl bound `lambda_1(C) + lambda_1(D)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{check_len, domain, Error, Result};
use crate::spectral::circulant::{HermitianCirculant, RealDiagonal};
use crate::spectral::dft::unitary_dft;

const UNIT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundVariant {
    Theorem1,
    Improved,
    Smallest,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub variant: BoundVariant,
    pub k: usize,
    pub k_prime: usize,
    /// `lambda_1(C) + lambda_1(D)`, or `lambda_n(C) + lambda_n(D)` for the
    /// smallest-eigenvalue variant.
    #[serde(rename = "weyl")]
    pub weyl_term: f64,
    pub correction: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcentrationReport {
    pub set_s: Vec<usize>,
    pub set_t: Vec<usize>,
    pub eps_s: f64,
    pub eps_t: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DonohoStarkCheck {
    pub report: ConcentrationReport,
    /// `|S| |T|`.
    pub support_product: f64,
    /// `n (1 - (eps_S + eps_T))^2`.
    pub threshold: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorollaryCheck {
    /// `||z off S||^2 + ||z_hat off T||^2`.
    pub lhs: f64,
    /// `(1 - sqrt(k k' / n))^2 / 2`.
    pub rhs: f64,
}

impl CorollaryCheck {
    pub fn holds(&self) -> bool {
        self.lhs >= self.rhs
    }
}

fn check_unit(z: &[Complex64]) -> Result<()> {
    let norm = z.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(Error::Normalization(norm));
    }
    Ok(())
}

/// Sorted, deduplicated copy of `s`, rejecting indices outside `0..n`.
fn index_set(s: &[usize], n: usize) -> Result<Vec<usize>> {
    if let Some(&bad) = s.iter().find(|&&i| i >= n) {
        return domain(format!("index {bad} outside 0..{n}"));
    }
    let mut v = s.to_vec();
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

fn off_set_norm(z: &[Complex64], set: &[usize]) -> f64 {
    let mut inside = vec![false; z.len()];
    for &i in set {
        inside[i] = true;
    }
    z.iter()
        .zip(&inside)
        .filter(|(_, &i)| !i)
        .map(|(x, _)| x.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Norm of the coordinates of the unit vector `z` outside `s`.
pub fn concentration_defect(z: &[Complex64], s: &[usize]) -> Result<f64> {
    check_unit(z)?;
    let s = index_set(s, z.len())?;
    Ok(off_set_norm(z, &s))
}

/// Evaluates `|S| |T| >= n (1 - (eps_S + eps_T))^2` for `z` and its unitary
/// transform. The inequality is a theorem, so `holds` is always expected to
/// be true; this is a falsification harness.
pub fn donoho_stark_holds(z: &[Complex64], s: &[usize], t: &[usize]) -> Result<DonohoStarkCheck> {
    check_unit(z)?;
    let n = z.len();
    let s = index_set(s, n)?;
    let t = index_set(t, n)?;
    let zhat = unitary_dft(z)?;
    let eps_s = off_set_norm(z, &s);
    let eps_t = off_set_norm(&zhat, &t);
    let support_product = (s.len() * t.len()) as f64;
    let gap = 1.0 - (eps_s + eps_t);
    // The bound is vacuous once eps_S + eps_T >= 1.
    let threshold = if gap > 0.0 { n as f64 * gap * gap } else { 0.0 };
    Ok(DonohoStarkCheck {
        holds: support_product >= threshold * (1.0 - 1e-12),
        support_product,
        threshold,
        report: ConcentrationReport {
            set_s: s,
            set_t: t,
            eps_s,
            eps_t,
        },
    })
}

/// If `|S| |T| < n`, the squared defects of `z` and `z_hat` cannot both be small.
pub fn corollary_defect_bound(z: &[Complex64], s: &[usize], t: &[usize]) -> Result<CorollaryCheck> {
    check_unit(z)?;
    let n = z.len();
    let s = index_set(s, n)?;
    let t = index_set(t, n)?;
    if s.len() * t.len() >= n {
        return domain(format!(
            "need |S||T| < n, got {} * {} >= {n}",
            s.len(),
            t.len()
        ));
    }
    let zhat = unitary_dft(z)?;
    let es = off_set_norm(z, &s);
    let et = off_set_norm(&zhat, &t);
    Ok(CorollaryCheck {
        lhs: es * es + et * et,
        rhs: 0.5 * concentration_factor(s.len(), t.len(), n),
    })
}

/// `(1 - sqrt(k k' / n))^2`.
fn concentration_factor(k: usize, k_prime: usize, n: usize) -> f64 {
    let r = 1.0 - ((k * k_prime) as f64 / n as f64).sqrt();
    r * r
}

/// Descending spectra of the two summands, computed once and reused across
/// many `(k, k')` evaluations.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSpectra {
    circulant: Vec<f64>,
    diagonal: Vec<f64>,
}

impl SplitSpectra {
    pub fn new(c: &HermitianCirculant, d: &RealDiagonal) -> Result<Self> {
        check_len(c.n(), d.n())?;
        let mut circulant = c.frequency_eigenvalues();
        circulant.sort_by(|a, b| b.total_cmp(a));
        Ok(Self {
            circulant,
            diagonal: d.sorted_eigenvalues(),
        })
    }

    pub fn n(&self) -> usize {
        self.circulant.len()
    }

    fn check_pair(&self, k: usize, k_prime: usize) -> Result<()> {
        let n = self.n();
        if k == 0 || k_prime == 0 || k >= n || k_prime >= n {
            return domain(format!("k and k' must lie in 1..{n}, got ({k}, {k_prime})"));
        }
        if k * k_prime >= n {
            return domain(format!("need k k' < n, got {k} * {k_prime} >= {n}"));
        }
        Ok(())
    }

    /// `(lambda_1(D) - lambda_{k+1}(D), lambda_1(C) - lambda_{k'+1}(C))`.
    fn top_gaps(&self, k: usize, k_prime: usize) -> (f64, f64) {
        (
            self.diagonal[0] - self.diagonal[k],
            self.circulant[0] - self.circulant[k_prime],
        )
    }

    pub fn theorem1(&self, k: usize, k_prime: usize) -> Result<BoundReport> {
        self.check_pair(k, k_prime)?;
        let (a, b) = self.top_gaps(k, k_prime);
        let weyl = self.circulant[0] + self.diagonal[0];
        let correction = 0.5 * a.min(b) * concentration_factor(k, k_prime, self.n());
        Ok(BoundReport {
            variant: BoundVariant::Theorem1,
            k,
            k_prime,
            weyl_term: weyl,
            correction,
            bound: weyl - correction,
        })
    }

    pub fn improved(&self, k: usize, k_prime: usize) -> Result<BoundReport> {
        self.check_pair(k, k_prime)?;
        let (a, b) = self.top_gaps(k, k_prime);
        let weyl = self.circulant[0] + self.diagonal[0];
        let harmonic = if a + b > 0.0 { a * b / (a + b) } else { 0.0 };
        let correction = harmonic * concentration_factor(k, k_prime, self.n());
        Ok(BoundReport {
            variant: BoundVariant::Improved,
            k,
            k_prime,
            weyl_term: weyl,
            correction,
            bound: weyl - correction,
        })
    }

    pub fn smallest(&self, l: usize, l_prime: usize) -> Result<BoundReport> {
        self.check_pair(l, l_prime)?;
        let n = self.n();
        let (cn, dn) = (self.circulant[n - 1], self.diagonal[n - 1]);
        let a = self.diagonal[n - l - 1] - dn;
        let b = self.circulant[n - l_prime - 1] - cn;
        let weyl = cn + dn;
        let correction = 0.5 * a.min(b) * concentration_factor(l, l_prime, n);
        Ok(BoundReport {
            variant: BoundVariant::Smallest,
            k: l,
            k_prime: l_prime,
            weyl_term: weyl,
            correction,
            bound: weyl + correction,
        })
    }

    /// Candidate `(k, k')` pairs: `floor(c sqrt(n))` for `c = 0.1..0.9` on
    /// both axes, plus every diagonal pair with `k^2 < n`. Sorted, unique.
    pub fn grid(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        let root = (n as f64).sqrt();
        let mut axis: Vec<usize> = (1..=9)
            .map(|i| (i as f64 / 10.0 * root).floor() as usize)
            .filter(|&k| k >= 1)
            .collect();
        axis.dedup();
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for &k in &axis {
            for &kp in &axis {
                pairs.push((k, kp));
            }
        }
        pairs.extend((1..n).take_while(|k| k * k < n).map(|k| (k, k)));
        pairs.retain(|&(k, kp)| k < n && kp < n && k * kp < n);
        pairs.sort_unstable();
        pairs.dedup();
        pairs
    }

    /// Smallest window bound over [`Self::grid`]; ties go to the
    /// lexicographically smallest `(k, k')`. Falls back to the Weyl bound
    /// when no admissible pair exists.
    pub fn optimize(&self) -> BoundReport {
        let mut best: Option<BoundReport> = None;
        for (k, kp) in self.grid() {
            let r = self.theorem1(k, kp).expect("grid pairs are admissible");
            if best.as_ref().is_none_or(|b| r.bound < b.bound) {
                best = Some(r);
            }
        }
        best.unwrap_or_else(|| {
            let weyl = self.circulant[0] + self.diagonal[0];
            BoundReport {
                variant: BoundVariant::Theorem1,
                k: 1,
                k_prime: 1,
                weyl_term: weyl,
                correction: 0.0,
                bound: weyl,
            }
        })
    }
}

pub fn theorem1_bound(c: &HermitianCirculant, d: &RealDiagonal, k: usize, k_prime: usize) -> Result<BoundReport> {
    SplitSpectra::new(c, d)?.theorem1(k, k_prime)
}

pub fn improved_bound(c: &HermitianCirculant, d: &RealDiagonal, k: usize, k_prime: usize) -> Result<BoundReport> {
    SplitSpectra::new(c, d)?.improved(k, k_prime)
}

pub fn smallest_eigenvalue_bound(
    c: &HermitianCirculant,
    d: &RealDiagonal,
    l: usize,
    l_prime: usize,
) -> Result<BoundReport> {
    SplitSpectra::new(c, d)?.smallest(l, l_prime)
}

pub fn optimize_bound(c: &HermitianCirculant, d: &RealDiagonal) -> Result<BoundReport> {
    Ok(SplitSpectra::new(c, d)?.optimize())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::families::build_harper;
    use crate::spectral::CirculantPlusDiagonal;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn delta(n: usize, i: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[i] = Complex64::new(1.0, 0.0);
        v
    }

    fn random_unit(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
        let v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let s = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        v.into_iter().map(|x| x / s).collect()
    }

    fn random_pair(n: usize, rng: &mut ChaCha8Rng) -> (HermitianCirculant, RealDiagonal) {
        let mut row = vec![Complex64::new(0.0, 0.0); n];
        row[0] = Complex64::new(rng.gen_range(-1.0..1.0), 0.0);
        for j in 1..=n / 2 {
            let z = if 2 * j == n {
                Complex64::new(rng.gen_range(-1.0..1.0), 0.0)
            } else {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            };
            row[j] = z;
            row[n - j] = z.conj();
        }
        let d = RealDiagonal::new((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
        (HermitianCirculant::new(row).unwrap(), d)
    }

    #[test]
    fn defect_examples() {
        let z = delta(8, 0);
        assert_eq!(concentration_defect(&z, &[0]).unwrap(), 0.0);
        assert_eq!(concentration_defect(&z, &[1]).unwrap(), 1.0);
        let bad: Vec<Complex64> = z.iter().map(|x| x * 2.0).collect();
        assert!(matches!(concentration_defect(&bad, &[0]), Err(Error::Normalization(_))));
        assert!(concentration_defect(&z, &[8]).is_err());
    }

    #[test]
    fn defect_pythagoras() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let z = random_unit(20, &mut rng);
            let s: Vec<usize> = (0..20).filter(|_| rng.gen_bool(0.4)).collect();
            let comp: Vec<usize> = (0..20).filter(|i| !s.contains(i)).collect();
            let out = concentration_defect(&z, &s).unwrap();
            let inn = concentration_defect(&z, &comp).unwrap();
            assert!((out * out + inn * inn - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn donoho_stark_delta_cases() {
        let n = 16;
        let z = delta(n, 0);
        let empty = donoho_stark_holds(&z, &[0], &[]).unwrap();
        assert_eq!(empty.report.eps_s, 0.0);
        assert!((empty.report.eps_t - 1.0).abs() < 1e-14);
        assert!(empty.holds);
        let all: Vec<usize> = (0..n).collect();
        let full = donoho_stark_holds(&z, &[0], &all).unwrap();
        assert_eq!(full.support_product, n as f64);
        assert!((full.threshold - n as f64).abs() < 1e-12);
        assert!(full.holds);
    }

    #[test]
    fn corollary_hand_example() {
        let z = delta(16, 0);
        let c = corollary_defect_bound(&z, &[0], &[0]).unwrap();
        assert!((c.lhs - 15.0 / 16.0).abs() < 1e-14);
        assert!((c.rhs - 9.0 / 32.0).abs() < 1e-15);
        assert!(c.holds());
        assert!(corollary_defect_bound(&z, &[0, 1, 2, 3], &[0, 1, 2, 3]).is_err());
    }

    #[test]
    fn constant_diagonal_gives_weyl() {
        let c = HermitianCirculant::nearest_neighbor(20, 0.25).unwrap();
        let d = RealDiagonal::constant(20, 0.3);
        let r = theorem1_bound(&c, &d, 2, 3).unwrap();
        assert_eq!(r.correction, 0.0);
        assert!((r.bound - 0.8).abs() < 1e-15);
        let s = smallest_eigenvalue_bound(&c, &d, 2, 3).unwrap();
        assert_eq!(s.correction, 0.0);
        assert!((s.bound - (-0.5 + 0.3)).abs() < 1e-15);
        let o = optimize_bound(&c, &d).unwrap();
        assert!((o.bound - 0.8).abs() < 1e-15);
    }

    #[test]
    fn harper_101_bounds_bracket_spectrum() {
        let m = build_harper(101, 1).unwrap();
        let ev = m.eigenvalues().unwrap();
        let t = theorem1_bound(&m.circulant, &m.diagonal, 5, 5).unwrap();
        assert!(t.bound < 1.0 && t.bound >= ev[0]);
        let s = smallest_eigenvalue_bound(&m.circulant, &m.diagonal, 5, 5).unwrap();
        assert!(s.bound <= ev[100] && s.bound > -1.0);
        let o = optimize_bound(&m.circulant, &m.diagonal).unwrap();
        assert!(o.bound <= t.bound);
        // Equal spectra of C and D make the two gaps coincide.
        let i = improved_bound(&m.circulant, &m.diagonal, 5, 5).unwrap();
        assert!((i.bound - t.bound).abs() < 1e-15);
    }

    #[test]
    fn harper_even_lower_bound_mirrors_upper() {
        let m = build_harper(100, 1).unwrap();
        let t = theorem1_bound(&m.circulant, &m.diagonal, 4, 4).unwrap();
        let s = smallest_eigenvalue_bound(&m.circulant, &m.diagonal, 4, 4).unwrap();
        assert!((t.bound + s.bound).abs() < 1e-14);
    }

    #[test]
    fn rejects_large_pairs() {
        let m = build_harper(20, 1).unwrap();
        assert!(theorem1_bound(&m.circulant, &m.diagonal, 5, 4).is_err());
        assert!(theorem1_bound(&m.circulant, &m.diagonal, 0, 4).is_err());
        assert!(smallest_eigenvalue_bound(&m.circulant, &m.diagonal, 5, 5).is_err());
    }

    #[test]
    fn improved_with_one_zero_gap_is_zero_correction() {
        let c = HermitianCirculant::nearest_neighbor(10, 0.25).unwrap();
        let d = RealDiagonal::constant(10, 0.0);
        let r = improved_bound(&c, &d, 2, 2).unwrap();
        assert_eq!(r.correction, 0.0);
        let z = HermitianCirculant::from_real(&[0.0; 10]).unwrap();
        let r = improved_bound(&z, &d, 2, 2).unwrap();
        assert_eq!(r.correction, 0.0);
    }

    #[test]
    fn grid_is_admissible_and_contains_diagonal_sweep() {
        let m = build_harper(1001, 1).unwrap();
        let sp = SplitSpectra::new(&m.circulant, &m.diagonal).unwrap();
        let g = sp.grid();
        assert!(g.iter().all(|&(k, kp)| k >= 1 && kp >= 1 && k * kp < 1001));
        for k in 1..=31 {
            assert!(g.contains(&(k, k)));
        }
        let o = sp.optimize();
        assert!(1.0 - o.bound >= 0.04 / 1001.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn bounds_are_sound(seed in any::<u64>(), n in prop::sample::select(vec![15usize, 32])) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (c, d) = random_pair(n, &mut rng);
            let m = CirculantPlusDiagonal::new(c.clone(), d.clone()).unwrap();
            let ev = m.eigenvalues().unwrap();
            let sp = SplitSpectra::new(&c, &d).unwrap();
            for k in 1..n {
                for kp in 1..n {
                    if k * kp >= n {
                        continue;
                    }
                    let t = sp.theorem1(k, kp).unwrap();
                    prop_assert!(t.bound >= ev[0] - 1e-12);
                    prop_assert!(t.bound <= t.weyl_term);
                    let i = sp.improved(k, kp).unwrap();
                    prop_assert!(i.bound <= t.bound + 1e-15);
                    prop_assert!(i.bound >= ev[0] - 1e-12);
                    let s = sp.smallest(k, kp).unwrap();
                    prop_assert!(s.bound <= ev[n - 1] + 1e-12);
                }
            }
        }

        #[test]
        fn corollary_never_violated(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 64;
            let z = random_unit(n, &mut rng);
            let k = rng.gen_range(1..8);
            let kp = rng.gen_range(1..=(n - 1) / k).min(n - 1);
            let s: Vec<usize> = (0..k).map(|_| rng.gen_range(0..n)).collect();
            let t: Vec<usize> = (0..kp).map(|_| rng.gen_range(0..n)).collect();
            let c = corollary_defect_bound(&z, &s, &t).unwrap();
            prop_assert!(c.holds());
            prop_assert!(c.lhs <= 2.0 + 1e-12);
            prop_assert!(donoho_stark_holds(&z, &s, &t).unwrap().holds);
        }
    }
}
