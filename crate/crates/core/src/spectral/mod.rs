//! Matrices, transforms and exact spectra.

pub mod circulant;
pub mod dft;
pub mod eigen;
pub mod families;
pub mod matrix;

pub use circulant::{
    circulant_eigendecomposition, circulant_eigendecomposition_with_vectors, fourier_mode,
    CirculantPlusDiagonal, HermitianCirculant, RealDiagonal,
};
pub use dft::{dft_forward, dft_inverse, fourier_matrix, unitary_dft};
pub use eigen::{dense_hermitian_eigen, Spectrum};
pub use families::{build_affine_transform, build_harper, build_mp3_diagonal};
pub use matrix::{ComplexMatrix, DenseMatrix, RealMatrix, Scalar};

use crate::report::{fmt_f64, Table};

/// Row-major dense entries. Real matrices give one column per entry;
/// complex matrices give `re,im` pairs.
pub fn matrix_csv(m: &ComplexMatrix) -> String {
    let real = m.as_slice().iter().all(|z| z.im == 0.0);
    let mut out = String::new();
    for i in 0..m.rows() {
        let cells: Vec<String> = m
            .row(i)
            .iter()
            .flat_map(|z| {
                if real {
                    vec![fmt_f64(z.re)]
                } else {
                    vec![fmt_f64(z.re), fmt_f64(z.im)]
                }
            })
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn spectrum_table(eigenvalues: &[f64]) -> Table {
    let mut t = Table::new(&["index", "eigenvalue"]);
    for (i, x) in eigenvalues.iter().enumerate() {
        t.push(vec![(i + 1).to_string(), fmt_f64(*x)]);
    }
    t
}
