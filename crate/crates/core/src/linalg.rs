//! Small dense helpers over nalgebra.

use alloc::vec::Vec;

use nalgebra::DMatrix;

use crate::C64;

/// `M M*`.
pub(crate) fn gram(m: &DMatrix<C64>) -> DMatrix<C64> {
    m * m.adjoint()
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub(crate) fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut eig: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    eig.sort_by(|a, b| a.total_cmp(b));
    eig
}

/// Spectral norm via the smaller of the two Gram matrices.
pub(crate) fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    use num_traits::Float;

    let g = if m.nrows() <= m.ncols() {
        gram(m)
    } else {
        m.adjoint() * m
    };
    hermitian_eigenvalues(&g)
        .last()
        .map(|l| l.max(0.0).sqrt())
        .unwrap_or(0.0)
}
