use std::f64::consts::PI;

use super::{GroupDistribution, GroupKind};
use crate::arith::require_prime;
use crate::error::{domain, Error, Result};
use crate::spectral::families::build_harper;

/// `(x, y, z)` with product `(x + x', y + y', z + z' + x y')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HeisenbergElement {
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub n: usize,
}

impl HeisenbergElement {
    pub fn new(x: usize, y: usize, z: usize, n: usize) -> Self {
        Self {
            x: x % n,
            y: y % n,
            z: z % n,
            n,
        }
    }

    /// Signed coordinates, reduced mod `n`.
    pub fn from_signed(x: i64, y: i64, z: i64, n: usize) -> Self {
        let r = |v: i64| v.rem_euclid(n as i64) as usize;
        Self::new(r(x), r(y), r(z), n)
    }

    pub fn identity(n: usize) -> Self {
        Self::new(0, 0, 0, n)
    }

    pub fn index(&self) -> usize {
        (self.x * self.n + self.y) * self.n + self.z
    }

    pub fn from_index(i: usize, n: usize) -> Self {
        Self::new(i / (n * n), (i / n) % n, i % n, n)
    }

    pub fn mul(&self, o: &Self) -> Result<Self> {
        if self.n != o.n {
            return Err(Error::GroupMismatch(format!("moduli {} and {}", self.n, o.n)));
        }
        Ok(self.mul_unchecked(o))
    }

    pub(crate) fn mul_unchecked(&self, o: &Self) -> Self {
        let n = self.n;
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z + self.x * o.y % n, n)
    }

    /// `(-x, -y, -z + x y)`.
    pub fn inverse(&self) -> Self {
        let n = self.n;
        Self::new(n - self.x, n - self.y, n - self.z + self.x * self.y % n, n)
    }
}

/// Uniform on `(+-1, 0, 0)` and `(0, +-1, 0)`.
pub fn heisenberg_step(n: usize) -> Result<GroupDistribution> {
    let kind = GroupKind::heisenberg(n)?;
    let gens = [(1, 0), (-1, 0), (0, 1), (0, -1)].map(|(x, y)| HeisenbergElement::from_signed(x, y, 0, n).index());
    GroupDistribution::uniform_on(kind, &gens)
}

/// Chi-square distance to uniform after `k` steps, through Plancherel:
/// the `p^2 - 1` nontrivial characters contribute
/// `((cos(2 pi a / p) + cos(2 pi b / p)) / 2)^(2k)` and each of the `p - 1`
/// representations of dimension `p` contributes `p ||M_p(a)^k||_F^2`.
pub fn heisenberg_chi_square(p: usize, k: usize) -> Result<f64> {
    require_prime(p)?;
    if p < 3 {
        return domain(format!("need an odd prime, got {p}"));
    }
    let pf = p as f64;
    let c: Vec<f64> = (0..p).map(|a| (2.0 * PI * a as f64 / pf).cos()).collect();
    let mut linear = 0.0;
    for a in 0..p {
        for b in 0..p {
            if a == 0 && b == 0 {
                continue;
            }
            linear += (0.5 * (c[a] + c[b])).powi(2 * k as i32);
        }
    }
    let mut big = 0.0;
    for a in 1..p {
        // Symmetric, so ||M^k||_F^2 = sum lambda^(2k).
        let ev = build_harper(p, a)?.eigenvalues()?;
        big += pf * ev.iter().map(|l| l.powi(2 * k as i32)).sum::<f64>();
    }
    Ok(linear + big)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_examples() {
        let a = HeisenbergElement::new(1, 0, 0, 5);
        let b = HeisenbergElement::new(0, 1, 0, 5);
        assert_eq!(a.mul(&b).unwrap(), HeisenbergElement::new(1, 1, 1, 5));
        assert_eq!(b.mul(&a).unwrap(), HeisenbergElement::new(1, 1, 0, 5));
        let e = HeisenbergElement::identity(5);
        assert_eq!(e.mul(&a).unwrap(), a);
        assert!(a.mul(&HeisenbergElement::identity(3)).is_err());
        for i in 0..125 {
            let g = HeisenbergElement::from_index(i, 5);
            assert_eq!(g.index(), i);
            assert_eq!(g.mul(&g.inverse()).unwrap(), e);
        }
    }

    #[test]
    fn chi_square_matches_brute_force() {
        for (p, ks) in [(3usize, 1..=6), (5, 4..=4)] {
            let q = heisenberg_step(p).unwrap();
            let mut cur = GroupDistribution::point_mass(q.kind(), 0).unwrap();
            for k in 1..=*ks.end() {
                cur = cur.convolve(&q).unwrap();
                if !ks.contains(&k) {
                    continue;
                }
                let brute = cur.chi_square_to_uniform();
                let plancherel = heisenberg_chi_square(p, k).unwrap();
                assert!((brute - plancherel).abs() <= 1e-8 * brute, "p={p} k={k}");
            }
        }
    }

    #[test]
    fn chi_square_nonincreasing() {
        let mut prev = f64::INFINITY;
        for k in 1..40 {
            let c = heisenberg_chi_square(7, k).unwrap();
            assert!(c <= prev * (1.0 + 1e-12));
            prev = c;
        }
        assert!(heisenberg_chi_square(9, 1).is_err());
    }
}
