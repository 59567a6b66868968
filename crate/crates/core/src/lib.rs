//! Extreme and bulk eigenvalues of circulant-plus-diagonal matrices.
//!
//! The Harper family `M_n(a)` (a nearest-neighbor circulant plus a cosine
//! diagonal) is the running example. Modules cover exact spectra, an
//! uncertainty-principle bound on the top eigenvalue, the harmonic-oscillator
//! limit of the edge, killed random walks, random walks on the Heisenberg and
//! affine groups, and the limiting bulk density.

pub mod absorbing;
pub mod arith;
pub mod bulk;
pub mod error;
pub mod groups;
pub mod report;
pub mod selftest;
pub mod spectral;
pub mod oscillator;
pub mod uncertainty;

pub use error::{Error, Result};
