//! Irreducible representations and the transform `f_hat(rho) = sum_g f(g) rho(g)`.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::{AffineElement, GroupDistribution, GroupKind, HeisenbergElement};
use crate::arith::{discrete_log_table, mod_pow, primitive_root, require_prime};
use crate::error::{domain, Error, Result};
use crate::spectral::matrix::ComplexMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum IrrepKind {
    /// `(x, y, z) -> e(a x + b y)`.
    HeisenbergCharacter { a: usize, b: usize },
    /// `(rho f)(w) = e(c (y w + z)) f(x + w)`.
    HeisenbergSchrodinger { c: usize },
    /// `(a, b) -> exp(2 pi i alpha log_g(a) / (p - 1))`.
    AffineCharacter { alpha: usize },
    /// `(rho f)(j) = e(j b) f(a j)` on `Z/pZ^*`, basis `delta_{g^k}`.
    AffineStandard,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Irrep {
    pub label: String,
    pub dim: usize,
    kind: IrrepKind,
}

impl Irrep {
    pub fn is_trivial(&self) -> bool {
        matches!(
            self.kind,
            IrrepKind::HeisenbergCharacter { a: 0, b: 0 } | IrrepKind::AffineCharacter { alpha: 0 }
        )
    }
}

/// Complete list of irreducible representations of one group.
#[derive(Debug, Clone, PartialEq)]
pub struct IrrepTable {
    pub group: GroupKind,
    pub irreps: Vec<Irrep>,
    generator: usize,
    log: Vec<usize>,
}

fn e(num: usize, den: usize) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * (num % den) as f64 / den as f64)
}

impl IrrepTable {
    /// `sum d_rho^2`, which equals the group order for a complete table.
    pub fn dimension_square_sum(&self) -> usize {
        self.irreps.iter().map(|r| r.dim * r.dim).sum()
    }

    /// Smallest primitive root used for the affine tables; zero otherwise.
    pub fn generator(&self) -> usize {
        self.generator
    }

    pub fn evaluate(&self, rho: &Irrep, g: usize) -> ComplexMatrix {
        match (self.group, rho.kind) {
            (GroupKind::Heisenberg { n }, IrrepKind::HeisenbergCharacter { a, b }) => {
                let h = HeisenbergElement::from_index(g, n);
                ComplexMatrix::from_fn(1, 1, |_, _| e(a * h.x + b * h.y, n))
            }
            (GroupKind::Heisenberg { n }, IrrepKind::HeisenbergSchrodinger { c }) => {
                let h = HeisenbergElement::from_index(g, n);
                let mut m = ComplexMatrix::zeros(n, n);
                for w in 0..n {
                    m[(w, (h.x + w) % n)] = e(c * ((h.y * w + h.z) % n), n);
                }
                m
            }
            (GroupKind::Affine { p }, IrrepKind::AffineCharacter { alpha }) => {
                let x = AffineElement::from_index(g, p);
                ComplexMatrix::from_fn(1, 1, |_, _| e(alpha * self.log[x.a], p - 1))
            }
            (GroupKind::Affine { p }, IrrepKind::AffineStandard) => {
                let x = AffineElement::from_index(g, p);
                let mut m = ComplexMatrix::zeros(p - 1, p - 1);
                for k in 0..p - 1 {
                    let j = mod_pow(self.generator as u64, k as u64, p as u64) as usize;
                    let target = self.log[x.a * j % p];
                    m[(k, target)] = e(j * x.b, p);
                }
                m
            }
            _ => unreachable!("irrep built for this group"),
        }
    }
}

/// `p^2` characters and `p - 1` representations of dimension `p`.
pub fn heisenberg_irreps(p: usize) -> Result<IrrepTable> {
    require_prime(p)?;
    let group = GroupKind::heisenberg(p)?;
    let mut irreps = Vec::new();
    for a in 0..p {
        for b in 0..p {
            irreps.push(Irrep {
                label: format!("chi({a},{b})"),
                dim: 1,
                kind: IrrepKind::HeisenbergCharacter { a, b },
            });
        }
    }
    for c in 1..p {
        irreps.push(Irrep {
            label: format!("rho({c})"),
            dim: p,
            kind: IrrepKind::HeisenbergSchrodinger { c },
        });
    }
    Ok(IrrepTable {
        group,
        irreps,
        generator: 0,
        log: Vec::new(),
    })
}

/// `p - 1` characters and one representation of dimension `p - 1`.
pub fn affine_irreps(p: usize) -> Result<IrrepTable> {
    let group = GroupKind::affine(p)?;
    if p < 3 {
        return domain(format!("need an odd prime, got {p}"));
    }
    let g = primitive_root(p as u64)?;
    let mut irreps: Vec<Irrep> = (0..p - 1)
        .map(|alpha| Irrep {
            label: format!("chi({alpha})"),
            dim: 1,
            kind: IrrepKind::AffineCharacter { alpha },
        })
        .collect();
    irreps.push(Irrep {
        label: "rho".to_string(),
        dim: p - 1,
        kind: IrrepKind::AffineStandard,
    });
    Ok(IrrepTable {
        group,
        irreps,
        generator: g as usize,
        log: discrete_log_table(p as u64, g),
    })
}

pub fn fourier_transform(f: &GroupDistribution, table: &IrrepTable, rho: &Irrep) -> Result<ComplexMatrix> {
    if f.kind() != table.group {
        return Err(Error::GroupMismatch(format!("{:?} vs {:?}", f.kind(), table.group)));
    }
    let mut acc = ComplexMatrix::zeros(rho.dim, rho.dim);
    for (g, &w) in f.weights().iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        let m = table.evaluate(rho, g);
        for (a, b) in acc.as_mut_slice().iter_mut().zip(m.as_slice()) {
            *a += b * w;
        }
    }
    Ok(acc)
}

/// `f(g) = (1/|G|) sum_rho d_rho tr(rho(g^-1) f_hat(rho))`, given one
/// transform per entry of `table.irreps`.
pub fn fourier_inversion(table: &IrrepTable, transforms: &[ComplexMatrix]) -> Result<Vec<f64>> {
    if transforms.len() != table.irreps.len() {
        return Err(Error::Dimension {
            expected: table.irreps.len(),
            actual: transforms.len(),
        });
    }
    let order = table.group.order();
    let mut out = Vec::with_capacity(order);
    for g in 0..order {
        let ginv = table.group.inverse(g);
        let mut sum = Complex64::new(0.0, 0.0);
        for (rho, fhat) in table.irreps.iter().zip(transforms) {
            let r = table.evaluate(rho, ginv);
            let mut tr = Complex64::new(0.0, 0.0);
            for i in 0..rho.dim {
                for j in 0..rho.dim {
                    tr += r[(i, j)] * fhat[(j, i)];
                }
            }
            sum += tr * rho.dim as f64;
        }
        out.push(sum.re / order as f64);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{affine_step, heisenberg_step};
    use crate::spectral::families::{build_affine_transform, build_harper};

    fn matrix_power(m: &ComplexMatrix, k: usize) -> ComplexMatrix {
        let mut acc = ComplexMatrix::identity(m.rows());
        for _ in 0..k {
            acc = acc.matmul(m).unwrap();
        }
        acc
    }

    fn tables() -> Vec<IrrepTable> {
        vec![
            heisenberg_irreps(3).unwrap(),
            heisenberg_irreps(5).unwrap(),
            affine_irreps(5).unwrap(),
            affine_irreps(7).unwrap(),
        ]
    }

    #[test]
    fn completeness() {
        for t in tables() {
            assert_eq!(t.dimension_square_sum(), t.group.order());
        }
        assert!(heisenberg_irreps(9).is_err());
    }

    #[test]
    fn representations_are_homomorphisms() {
        for t in tables() {
            let m = t.group.order();
            for rho in &t.irreps {
                for g in (0..m).step_by(3) {
                    for h in (0..m).step_by(7) {
                        let lhs = t.evaluate(rho, t.group.mul(g, h));
                        let rhs = t.evaluate(rho, g).matmul(&t.evaluate(rho, h)).unwrap();
                        assert!(lhs.max_abs_diff(&rhs) < 1e-12, "{}", rho.label);
                    }
                }
            }
        }
    }

    #[test]
    fn characters_are_orthonormal() {
        for t in tables() {
            let m = t.group.order() as f64;
            for rho in &t.irreps {
                let norm: f64 = (0..t.group.order())
                    .map(|g| t.evaluate(rho, g).trace().norm_sqr())
                    .sum::<f64>()
                    / m;
                assert!((norm - 1.0).abs() < 1e-10, "{}", rho.label);
            }
        }
    }

    #[test]
    fn heisenberg_transform_is_harper() {
        let p = 7;
        let t = heisenberg_irreps(p).unwrap();
        let q = heisenberg_step(p).unwrap();
        for rho in t.irreps.iter().filter(|r| r.dim == p) {
            let IrrepKind::HeisenbergSchrodinger { c } = rho.kind else { unreachable!() };
            let fhat = fourier_transform(&q, &t, rho).unwrap();
            let harper = build_harper(p, c).unwrap().to_dense();
            assert!(fhat.max_abs_diff(&harper) < 1e-12);
        }
        for rho in t.irreps.iter().filter(|r| r.dim == 1) {
            let IrrepKind::HeisenbergCharacter { a, b } = rho.kind else { unreachable!() };
            let v = fourier_transform(&q, &t, rho).unwrap()[(0, 0)];
            let want = 0.5 * ((2.0 * PI * a as f64 / p as f64).cos() + (2.0 * PI * b as f64 / p as f64).cos());
            assert!((v - want).norm() < 1e-12);
        }
    }

    #[test]
    fn affine_transform_matches_family() {
        for p in [5, 7, 11] {
            let t = affine_irreps(p).unwrap();
            let q = affine_step(p).unwrap();
            let big = t.irreps.iter().find(|r| r.dim == p - 1).unwrap();
            let fhat = fourier_transform(&q, &t, big).unwrap();
            let fam = build_affine_transform(p).unwrap().to_dense();
            assert!(fhat.max_abs_diff(&fam) < 1e-12, "p={p}");
            for rho in t.irreps.iter().filter(|r| r.dim == 1) {
                let IrrepKind::AffineCharacter { alpha } = rho.kind else { unreachable!() };
                let v = fourier_transform(&q, &t, rho).unwrap()[(0, 0)];
                let want = 0.6 + 0.4 * (2.0 * PI * alpha as f64 / (p - 1) as f64).cos();
                assert!((v - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn inversion_recovers_convolution_powers() {
        for (t, q) in [
            (heisenberg_irreps(3).unwrap(), heisenberg_step(3).unwrap()),
            (heisenberg_irreps(5).unwrap(), heisenberg_step(5).unwrap()),
            (affine_irreps(5).unwrap(), affine_step(5).unwrap()),
        ] {
            for k in [1, 3, 6] {
                let fhats: Vec<ComplexMatrix> = t
                    .irreps
                    .iter()
                    .map(|rho| matrix_power(&fourier_transform(&q, &t, rho).unwrap(), k))
                    .collect();
                let rebuilt = fourier_inversion(&t, &fhats).unwrap();
                let brute = q.power(k).unwrap();
                for (a, b) in rebuilt.iter().zip(brute.weights()) {
                    assert!((a - b).abs() < 1e-8);
                }
            }
        }
    }
}
