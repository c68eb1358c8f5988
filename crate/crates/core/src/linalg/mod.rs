//! Linear-algebra kernels: dense symmetric eigensolver, compressed sparse
//! rows, and a restarted block-Lanczos solver for the low end of large
//! spectra.

pub mod dense;
pub mod lanczos;
pub mod sparse;

pub use dense::{symmetric_eigen, SymmetricEigen};
pub use lanczos::{lowest_eigenpairs_lanczos, LanczosOptions};
pub use sparse::CsrMatrix;

/// Symmetric linear operator `y = A x`.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
