//! Dense Hermitian eigensolver: Householder reduction to real symmetric
//! tridiagonal form, then implicit-shift QL.

use super::matrix::{ComplexMatrix, DenseMatrix, Scalar};
use crate::error::{Error, Result};

/// Relative tolerance on `|A_ij - conj(A_ji)|` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// QL sweeps allowed per eigenvalue before giving up.
pub const MAX_QL_SWEEPS: usize = 50;

/// Eigenvalues sorted descending, optionally with eigenvectors (column `i`
/// pairs with `eigenvalues[i]`) and, for circulants, the Fourier frequency
/// carrying each eigenvalue.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<ComplexMatrix>,
    pub frequency_perm: Option<Vec<usize>>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `lambda_1`, the largest eigenvalue.
    pub fn top(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// `lambda_n`, the smallest eigenvalue.
    pub fn bottom(&self) -> f64 {
        *self.eigenvalues.last().expect("empty spectrum")
    }

    /// The `k`-th largest eigenvalue, 1-based.
    pub fn lambda(&self, k: usize) -> f64 {
        self.eigenvalues[k - 1]
    }

    pub fn ascending(&self) -> Vec<f64> {
        self.eigenvalues.iter().rev().copied().collect()
    }
}

pub fn dense_hermitian_eigen<T: Scalar>(m: &DenseMatrix<T>, with_vectors: bool) -> Result<Spectrum> {
    m.ensure_hermitian(HERMITIAN_TOL)?;
    let n = m.rows();
    if n == 0 {
        return Ok(Spectrum {
            eigenvalues: Vec::new(),
            eigenvectors: with_vectors.then(|| ComplexMatrix::zeros(0, 0)),
            frequency_perm: None,
        });
    }

    let mut work = m.clone();
    let tri = tridiagonalize(&mut work, with_vectors);

    // Diagonal unitary making the subdiagonal real and nonnegative.
    let mut phases = vec![T::ONE; n];
    let mut off = vec![0.0; n];
    for i in 0..n - 1 {
        phases[i + 1] = phases[i] * tri.sub[i].phase();
        off[i] = tri.sub[i].abs();
    }

    let mut diag = tri.diag;
    let mut zt = with_vectors.then(|| DenseMatrix::<f64>::identity(n));
    tridiagonal_ql(&mut diag, &mut off, zt.as_mut())?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| diag[b].total_cmp(&diag[a]).then(a.cmp(&b)));
    let eigenvalues = order.iter().map(|&i| diag[i]).collect();

    let eigenvectors = zt.map(|zt| {
        // Column j of W = Phi Z, then V = Q W.
        let mut w = DenseMatrix::<T>::from_fn(n, n, |i, j| phases[i].scale(zt[(order[j], i)]));
        apply_reflectors(&tri.reflectors, &mut w);
        w.to_complex()
    });

    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        frequency_perm: None,
    })
}

/// Eigenvalues (descending) of the real symmetric tridiagonal matrix with
/// the given diagonal and off-diagonal.
pub fn symmetric_tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    crate::error::check_len(n - 1, off.len())?;
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    tridiagonal_ql(&mut d, &mut e, None)?;
    d.sort_by(|a, b| b.total_cmp(a));
    Ok(d)
}

struct Tridiagonal<T> {
    diag: Vec<f64>,
    /// `sub[i]` is the entry at `(i + 1, i)`.
    sub: Vec<T>,
    /// Householder vectors `(start, u)`, each acting on rows `start..n`.
    reflectors: Vec<(usize, Vec<T>)>,
}

/// Reduces Hermitian `a` in place with reflectors `P = I - 2 u u^H / u^H u`.
fn tridiagonalize<T: Scalar>(a: &mut DenseMatrix<T>, keep_reflectors: bool) -> Tridiagonal<T> {
    let n = a.rows();
    let mut sub = vec![T::ZERO; n.saturating_sub(1)];
    let mut reflectors = Vec::new();
    let mut p = vec![T::ZERO; n];

    for k in 0..n.saturating_sub(2) {
        let start = k + 1;
        let m = n - start;
        let mut u: Vec<T> = (start..n).map(|i| a[(i, k)]).collect();
        let head = u[0];
        let tail_sq: f64 = u[1..].iter().map(|x| x.abs_sqr()).sum();
        if tail_sq == 0.0 {
            sub[k] = head;
            continue;
        }
        let xnorm = (tail_sq + head.abs_sqr()).sqrt();
        let alpha = head.phase().scale(xnorm);
        u[0] += alpha;
        let beta = 1.0 / (xnorm * (xnorm + head.abs()));

        let data = a.as_mut_slice();
        // p = beta * A_sub u
        for (i, pi) in p[..m].iter_mut().enumerate() {
            let row = &data[(start + i) * n + start..(start + i + 1) * n];
            let mut acc = T::ZERO;
            for (aij, uj) in row.iter().zip(&u) {
                acc += *aij * *uj;
            }
            *pi = acc.scale(beta);
        }
        let mut upk = 0.0;
        for (ui, pi) in u.iter().zip(&p[..m]) {
            upk += (ui.conj() * *pi).re();
        }
        let half_k = 0.5 * beta * upk;
        for (pi, ui) in p[..m].iter_mut().zip(&u) {
            *pi -= ui.scale(half_k);
        }
        let w = &p[..m];
        // A_sub -= u w^H + w u^H
        for i in 0..m {
            let ui = u[i];
            let wi = w[i];
            let row = &mut data[(start + i) * n + start..(start + i + 1) * n];
            for ((aij, uj), wj) in row.iter_mut().zip(&u).zip(w) {
                *aij -= ui * wj.conj() + wi * uj.conj();
            }
        }
        sub[k] = -alpha;
        if keep_reflectors {
            reflectors.push((start, u));
        }
    }
    if n >= 2 {
        sub[n - 2] = a[(n - 1, n - 2)];
    }
    let diag = (0..n).map(|i| a[(i, i)].re()).collect();
    Tridiagonal {
        diag,
        sub,
        reflectors,
    }
}

/// `w <- P_0 P_1 ... P_last w`.
fn apply_reflectors<T: Scalar>(reflectors: &[(usize, Vec<T>)], w: &mut DenseMatrix<T>) {
    let cols = w.cols();
    let mut coef = vec![T::ZERO; cols];
    for (start, u) in reflectors.iter().rev() {
        let unorm_sq: f64 = u.iter().map(|x| x.abs_sqr()).sum();
        let beta = 2.0 / unorm_sq;
        coef.iter_mut().for_each(|c| *c = T::ZERO);
        for (i, ui) in u.iter().enumerate() {
            let uc = ui.conj();
            for (c, x) in coef.iter_mut().zip(w.row(start + i)) {
                *c += uc * *x;
            }
        }
        let data = w.as_mut_slice();
        for (i, ui) in u.iter().enumerate() {
            let row = &mut data[(start + i) * cols..(start + i + 1) * cols];
            for (x, c) in row.iter_mut().zip(&coef) {
                *x -= (*ui * *c).scale(beta);
            }
        }
    }
}

/// Implicit-shift QL on a symmetric tridiagonal matrix. `off[i]` couples
/// `i` and `i + 1`; `off` must have length `n` (last entry ignored). When
/// `zt` is given, its rows are rotated so row `i` ends as the eigenvector of
/// `diag[i]` in the original basis.
fn tridiagonal_ql(diag: &mut [f64], off: &mut [f64], mut zt: Option<&mut DenseMatrix<f64>>) -> Result<()> {
    let n = diag.len();
    if n == 0 {
        return Ok(());
    }
    off[n - 1] = 0.0;
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::Numerical(format!(
                    "QL iteration did not converge for eigenvalue {l} after {MAX_QL_SWEEPS} sweeps"
                )));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = zt.as_deref_mut() {
                    rotate_rows(z, i, s, c);
                }
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

#[inline]
fn rotate_rows(z: &mut DenseMatrix<f64>, i: usize, s: f64, c: f64) {
    let n = z.cols();
    let data = z.as_mut_slice();
    let (lo, hi) = data.split_at_mut((i + 1) * n);
    let ri = &mut lo[i * n..];
    let rj = &mut hi[..n];
    for (a, b) in ri.iter_mut().zip(rj.iter_mut()) {
        let f = *b;
        *b = s * *a + c * f;
        *a = c * *a - s * f;
    }
}

/// Largest `||A v - lambda v||` over the eigenpairs of `spec`.
pub fn max_residual<T: Scalar>(m: &DenseMatrix<T>, spec: &Spectrum) -> Option<f64> {
    let vecs = spec.eigenvectors.as_ref()?;
    let a = m.to_complex();
    let mut worst = 0.0f64;
    for (j, &lam) in spec.eigenvalues.iter().enumerate() {
        let v = vecs.column(j);
        let av = a.mul_vec(&v).ok()?;
        let r: f64 = av
            .iter()
            .zip(&v)
            .map(|(x, y)| (*x - *y * lam).norm_sqr())
            .sum::<f64>()
            .sqrt();
        worst = worst.max(r);
    }
    Some(worst)
}

/// Largest entry of `|V^H V - I|`.
pub fn orthonormality_defect(vecs: &ComplexMatrix) -> f64 {
    let g = vecs.conj_transpose().matmul(vecs).expect("square");
    let id = ComplexMatrix::identity(vecs.cols());
    g.max_abs_diff(&id)
}
