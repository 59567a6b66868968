use std::f64::consts::SQRT_2;

use num_complex::Complex64;

use super::dft::dft_forward;
use super::eigen::{dense_hermitian_eigen, symmetric_tridiagonal_eigenvalues, Spectrum};
use super::matrix::{ComplexMatrix, RealMatrix};
use crate::error::{check_len, domain, Error, Result};

/// Tolerance on `|c_j - conj(c_{n-j})|` relative to the largest entry.
const SYMMETRY_TOL: f64 = 1e-12;

/// Hermitian circulant given by its first row: entry `(r, s)` is
/// `c[(s - r) mod n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianCirculant {
    first_row: Vec<Complex64>,
}

impl HermitianCirculant {
    pub fn new(first_row: Vec<Complex64>) -> Result<Self> {
        let n = first_row.len();
        if n < 3 {
            return domain(format!("circulant size must be at least 3, got {n}"));
        }
        let scale = first_row.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
        for j in 0..n {
            let d = (first_row[j] - first_row[(n - j) % n].conj()).norm();
            if d > SYMMETRY_TOL * scale {
                return Err(Error::Symmetry(format!(
                    "c_{j} != conj(c_{}) (difference {d:e})",
                    (n - j) % n
                )));
            }
        }
        Ok(Self { first_row })
    }

    pub fn from_real(first_row: &[f64]) -> Result<Self> {
        Self::new(first_row.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Weight `w` at offsets `+1` and `-1` (corners included), zero elsewhere.
    pub fn nearest_neighbor(n: usize, w: f64) -> Result<Self> {
        if n < 3 {
            return domain(format!("circulant size must be at least 3, got {n}"));
        }
        let mut row = vec![0.0; n];
        row[1] = w;
        row[n - 1] = w;
        Self::from_real(&row)
    }

    pub fn n(&self) -> usize {
        self.first_row.len()
    }

    pub fn first_row(&self) -> &[Complex64] {
        &self.first_row
    }

    pub fn entry(&self, r: usize, s: usize) -> Complex64 {
        let n = self.n();
        self.first_row[(s + n - r % n) % n]
    }

    pub fn is_real(&self) -> bool {
        self.first_row.iter().all(|z| z.im == 0.0)
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let n = self.n();
        ComplexMatrix::from_fn(n, n, |r, s| self.entry(r, s))
    }

    /// Eigenvalue carried by frequency `b`: `sum_j c_j exp(2 pi i j b / n)`,
    /// for every `b` in `0..n`.
    pub fn frequency_eigenvalues(&self) -> Vec<f64> {
        let n = self.n();
        let hat = dft_forward(&self.first_row, n).expect("length matches");
        (0..n).map(|b| hat[(n - b) % n].re).collect()
    }
}

/// Normalized exponential vector `exp(2 pi i j b / n) / sqrt(n)`.
pub fn fourier_mode(n: usize, b: usize) -> Vec<Complex64> {
    let s = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|j| {
            let r = ((j * b) % n) as f64;
            Complex64::from_polar(s, 2.0 * std::f64::consts::PI * r / n as f64)
        })
        .collect()
}

/// Sorted spectrum of a Hermitian circulant with `frequency_perm[i]` the
/// frequency whose exponential vector is the `i`-th eigenvector. Ties are
/// ordered by ascending frequency. Eigenvectors are not materialized; see
/// [`circulant_eigendecomposition_with_vectors`].
pub fn circulant_eigendecomposition(c: &HermitianCirculant) -> Spectrum {
    let values = c.frequency_eigenvalues();
    let mut freq: Vec<usize> = (0..values.len()).collect();
    freq.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    Spectrum {
        eigenvalues: freq.iter().map(|&b| values[b]).collect(),
        eigenvectors: None,
        frequency_perm: Some(freq),
    }
}

pub fn circulant_eigendecomposition_with_vectors(c: &HermitianCirculant) -> Spectrum {
    let mut spec = circulant_eigendecomposition(c);
    let n = c.n();
    let freq = spec.frequency_perm.as_ref().expect("set above");
    let mut v = ComplexMatrix::zeros(n, n);
    for (col, &b) in freq.iter().enumerate() {
        for (row, z) in fourier_mode(n, b).into_iter().enumerate() {
            v[(row, col)] = z;
        }
    }
    spec.eigenvectors = Some(v);
    spec
}

#[derive(Debug, Clone, PartialEq)]
pub struct RealDiagonal {
    entries: Vec<f64>,
}

impl RealDiagonal {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(j) = entries.iter().position(|x| !x.is_finite()) {
            return domain(format!("diagonal entry {j} is not finite"));
        }
        Ok(Self { entries })
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self {
            entries: vec![value; n],
        }
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Diagonal entries sorted descending, i.e. the eigenvalues.
    pub fn sorted_eigenvalues(&self) -> Vec<f64> {
        let mut e = self.entries.clone();
        e.sort_by(|a, b| b.total_cmp(a));
        e
    }
}

/// `M = C + D` with `C` a Hermitian circulant and `D` real diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantPlusDiagonal {
    pub circulant: HermitianCirculant,
    pub diagonal: RealDiagonal,
}

impl CirculantPlusDiagonal {
    pub fn new(circulant: HermitianCirculant, diagonal: RealDiagonal) -> Result<Self> {
        check_len(circulant.n(), diagonal.n())?;
        Ok(Self {
            circulant,
            diagonal,
        })
    }

    pub fn n(&self) -> usize {
        self.circulant.n()
    }

    pub fn entry(&self, r: usize, s: usize) -> Complex64 {
        let mut z = self.circulant.entry(r, s);
        if r == s {
            z += self.diagonal.entries[r];
        }
        z
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let n = self.n();
        ComplexMatrix::from_fn(n, n, |r, s| self.entry(r, s))
    }

    /// Dense real form, when the circulant is real.
    pub fn to_dense_real(&self) -> Option<RealMatrix> {
        if !self.circulant.is_real() {
            return None;
        }
        let n = self.n();
        Some(RealMatrix::from_fn(n, n, |r, s| self.entry(r, s).re))
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.n();
        check_len(n, v.len())?;
        let row = self.circulant.first_row();
        let nonzero: Vec<(usize, Complex64)> = row
            .iter()
            .enumerate()
            .filter(|(_, z)| **z != Complex64::new(0.0, 0.0))
            .map(|(j, z)| (j, *z))
            .collect();
        Ok((0..n)
            .map(|r| {
                let mut acc = v[r] * self.diagonal.entries[r];
                for &(j, c) in &nonzero {
                    acc += c * v[(r + j) % n];
                }
                acc
            })
            .collect())
    }

    /// Full spectrum from the dense eigensolver.
    pub fn spectrum(&self, with_vectors: bool) -> Result<Spectrum> {
        match self.to_dense_real() {
            Some(m) => dense_hermitian_eigen(&m, with_vectors),
            None => dense_hermitian_eigen(&self.to_dense(), with_vectors),
        }
    }

    /// Eigenvalues sorted descending. Uses the reflection reduction when it
    /// applies and the dense solver otherwise.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        match self.reflection_split_eigenvalues() {
            Some(r) => r,
            None => Ok(self.spectrum(false)?.eigenvalues),
        }
    }

    /// For a real nearest-neighbor circulant and a diagonal with
    /// `d_j = d_{-j}`, the matrix commutes with `j -> -j` and splits into two
    /// symmetric tridiagonal blocks (even and odd functions). Returns `None`
    /// when the structure is absent.
    pub fn reflection_split_eigenvalues(&self) -> Option<Result<Vec<f64>>> {
        let n = self.n();
        let row = self.circulant.first_row();
        if !self.circulant.is_real() || row[1] != row[n - 1] {
            return None;
        }
        if row[2..n - 1].iter().any(|z| *z != Complex64::new(0.0, 0.0)) {
            return None;
        }
        let d = &self.diagonal.entries;
        let scale = d.iter().fold(1.0f64, |m, x| m.max(x.abs()));
        if (1..n).any(|j| (d[j] - d[n - j]).abs() > 1e-13 * scale) {
            return None;
        }
        let c0 = row[0].re;
        let t = row[1].re;
        let sym = |j: usize| c0 + 0.5 * (d[j] + d[(n - j) % n]);
        let half = n / 2;

        let mut even_diag: Vec<f64> = (0..=half).map(sym).collect();
        let mut even_off = vec![t; half];
        even_off[0] = SQRT_2 * t;
        if n.is_multiple_of(2) {
            even_off[half - 1] = SQRT_2 * t;
        } else {
            even_diag[half] += t;
        }

        let odd_len = n.div_ceil(2) - 1;
        let mut odd_diag: Vec<f64> = (1..=odd_len).map(sym).collect();
        let odd_off = vec![t; odd_len.saturating_sub(1)];
        if n % 2 == 1 {
            odd_diag[odd_len - 1] -= t;
        }

        Some((|| {
            let mut all = symmetric_tridiagonal_eigenvalues(&even_diag, &even_off)?;
            all.extend(symmetric_tridiagonal_eigenvalues(&odd_diag, &odd_off)?);
            all.sort_by(|a, b| b.total_cmp(a));
            Ok(all)
        })())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::eigen::dense_hermitian_eigen;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    pub(crate) fn random_hermitian_circulant(n: usize, rng: &mut ChaCha8Rng) -> HermitianCirculant {
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
        HermitianCirculant::new(row).unwrap()
    }

    #[test]
    fn harper_circulant_eigenvalues_are_half_cosines() {
        let n = 5;
        let c = HermitianCirculant::nearest_neighbor(n, 0.25).unwrap();
        let spec = circulant_eigendecomposition(&c);
        let mut expected: Vec<f64> = (0..n)
            .map(|j| 0.5 * (2.0 * PI * j as f64 / n as f64).cos())
            .collect();
        expected.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in spec.eigenvalues.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-14);
        }
        // Ties broken by ascending frequency: 1 before 4, 2 before 3.
        assert_eq!(spec.frequency_perm.unwrap(), vec![0, 1, 4, 2, 3]);
    }

    #[test]
    fn scaled_identity_circulant() {
        let c = HermitianCirculant::from_real(&[1.0, 0.0, 0.0, 0.0]).unwrap();
        let spec = circulant_eigendecomposition(&c);
        assert!(spec.eigenvalues.iter().all(|&x| (x - 1.0).abs() < 1e-15));
    }

    #[test]
    fn rejects_non_hermitian_row_and_small_n() {
        let row = vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
        ];
        assert!(matches!(HermitianCirculant::new(row), Err(Error::Symmetry(_))));
        let bad_diag = vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];
        assert!(HermitianCirculant::new(bad_diag).is_err());
        assert!(matches!(HermitianCirculant::nearest_neighbor(2, 0.25), Err(Error::Domain(_))));
    }

    #[test]
    fn exponential_vectors_are_eigenvectors() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let c = random_hermitian_circulant(12, &mut rng);
        let spec = circulant_eigendecomposition_with_vectors(&c);
        let dense = c.to_dense();
        let vecs = spec.eigenvectors.as_ref().unwrap();
        for (j, lam) in spec.eigenvalues.iter().enumerate() {
            let v = vecs.column(j);
            let cv = dense.mul_vec(&v).unwrap();
            let r: f64 = cv.iter().zip(&v).map(|(a, b)| (a - b * lam).norm_sqr()).sum::<f64>().sqrt();
            assert!(r < 1e-10);
        }
    }

    #[test]
    fn circulant_matches_dense_solver() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in [8, 32, 101] {
            let c = random_hermitian_circulant(n, &mut rng);
            let fast = circulant_eigendecomposition(&c).eigenvalues;
            let slow = dense_hermitian_eigen(&c.to_dense(), false).unwrap().eigenvalues;
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() < 1e-9, "n={n}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn reflection_split_matches_dense() {
        for n in [3, 4, 5, 8, 9, 31, 64] {
            for a in [0, 1, 2] {
                let m = crate::spectral::families::build_harper(n, a % n).unwrap();
                let split = m.reflection_split_eigenvalues().unwrap().unwrap();
                let dense = m.spectrum(false).unwrap().eigenvalues;
                for (x, y) in split.iter().zip(&dense) {
                    assert!((x - y).abs() < 1e-12, "n={n} a={a}");
                }
            }
        }
    }

    #[test]
    fn reflection_split_declines_unstructured_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let c = random_hermitian_circulant(9, &mut rng);
        let d = RealDiagonal::constant(9, 0.0);
        let m = CirculantPlusDiagonal::new(c, d).unwrap();
        assert!(m.reflection_split_eigenvalues().is_none());

        let c = HermitianCirculant::nearest_neighbor(6, 0.25).unwrap();
        let d = RealDiagonal::new(vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let m = CirculantPlusDiagonal::new(c, d).unwrap();
        assert!(m.reflection_split_eigenvalues().is_none());
    }

    #[test]
    fn apply_matches_dense_product() {
        let m = crate::spectral::families::build_harper(7, 3).unwrap();
        let v: Vec<Complex64> = (0..7).map(|k| Complex64::new(k as f64, 1.0 - k as f64)).collect();
        let a = m.apply(&v).unwrap();
        let b = m.to_dense().mul_vec(&v).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).norm() < 1e-14);
        }
    }
}
