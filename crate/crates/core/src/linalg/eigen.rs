use nalgebra::SymmetricEigen;

use super::matrix::ComplexMatrix;

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
/// Eigenvectors are the columns of the returned matrix.
pub fn hermitian_eigen(m: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let h = m.hermitian_part();
    let eig = SymmetricEigen::new(h.into_dmatrix());
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Group sorted values into clusters separated by gaps larger than `gap`.
pub fn cluster_sorted(values: &[f64], gap: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || values[k] - values[k - 1] > gap {
            if k > start {
                out.push(start..k);
            }
            start = k;
        }
    }
    out
}
