//! Small dense helpers shared by the single-qubit and coupled solvers.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Eigen-decomposition of a real symmetric matrix, ascending eigenvalues.
///
/// Each eigenvector is sign-fixed so that its largest-magnitude component is
/// positive (first such index on ties).
pub(crate) fn eigh_sorted(matrix: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = matrix.nrows();
    let eig = matrix.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));

    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::<f64>::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut column: DVector<f64> = eig.eigenvectors.column(src).into_owned();
        let pivot = column
            .iter()
            .copied()
            .fold(0.0_f64, |best, x| if x.abs() > best.abs() { x } else { best });
        if pivot < 0.0 {
            column.neg_mut();
        }
        vectors.set_column(dst, &column);
    }
    (values, vectors)
}

/// `V^T O V` for a real basis change `V` (columns) and complex operator `O`.
pub(crate) fn rotate(op: &DMatrix<Complex64>, basis: &DMatrix<f64>) -> DMatrix<Complex64> {
    let basis = basis.map(|x| Complex64::new(x, 0.0));
    basis.transpose() * op * basis
}

/// Kronecker product of two complex matrices.
pub(crate) fn kron(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    a.kronecker(b)
}

/// Relative Frobenius-norm deviation from Hermiticity.
pub fn hermiticity_defect(m: &DMatrix<Complex64>) -> f64 {
    let norm = m.norm();
    if norm == 0.0 {
        return 0.0;
    }
    (m - m.adjoint()).norm() / norm
}
