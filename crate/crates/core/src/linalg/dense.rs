//! Dense real symmetric eigensolver, a thin wrapper over `faer` that
//! returns ascending eigenvalues and column-major eigenvectors.

use faer::{Mat, Side};

use crate::{Error, Result};

/// Eigen-decomposition of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    pub n: usize,
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Eigenvectors, column-major: vector `j` occupies `vectors[j*n..(j+1)*n]`.
    pub vectors: Option<Vec<f64>>,
}

impl SymmetricEigen {
    pub fn vector(&self, j: usize) -> Option<&[f64]> {
        self.vectors.as_ref().map(|v| &v[j * self.n..(j + 1) * self.n])
    }
}

/// Diagonalizes the symmetric matrix `a` given row-major. Only the lower
/// triangle is read by the backend.
pub fn symmetric_eigen(a: &[f64], n: usize, want_vectors: bool) -> Result<SymmetricEigen> {
    if a.len() != n * n {
        return Err(Error::DimensionMismatch {
            expected: n * n,
            found: a.len(),
        });
    }
    if n == 0 {
        return Ok(SymmetricEigen {
            n,
            values: vec![],
            vectors: want_vectors.then(Vec::new),
        });
    }
    let m = Mat::<f64>::from_fn(n, n, |i, j| a[i * n + j]);
    let failed = |_| Error::NotConverged {
        iterations: 0,
        residual: f64::NAN,
    };
    if !want_vectors {
        let mut values = m.self_adjoint_eigenvalues(Side::Lower).map_err(failed)?;
        values.sort_by(f64::total_cmp);
        return Ok(SymmetricEigen {
            n,
            values,
            vectors: None,
        });
    }
    let eig = m.self_adjoint_eigen(Side::Lower).map_err(failed)?;
    let (s, u) = (eig.S(), eig.U());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| s[i].total_cmp(&s[j]));
    let values = order.iter().map(|&i| s[i]).collect();
    let mut out = Vec::with_capacity(n * n);
    for &j in &order {
        out.extend((0..n).map(|i| u[(i, j)]));
    }
    Ok(SymmetricEigen {
        n,
        values,
        vectors: Some(out),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(a: &[f64], n: usize, lambda: f64, x: &[f64]) -> f64 {
        (0..n)
            .map(|r| {
                let ax: f64 = (0..n).map(|c| a[r * n + c] * x[c]).sum();
                (ax - lambda * x[r]).powi(2)
            })
            .sum::<f64>()
            .sqrt()
    }

    #[test]
    fn two_by_two() {
        let a = [2.0, 1.0, 1.0, 2.0];
        let eig = symmetric_eigen(&a, 2, true).unwrap();
        assert!((eig.values[0] - 1.0).abs() < 1e-14);
        assert!((eig.values[1] - 3.0).abs() < 1e-14);
        for j in 0..2 {
            assert!(residual(&a, 2, eig.values[j], eig.vector(j).unwrap()) < 1e-13);
        }
    }

    #[test]
    fn scalar_matrix() {
        let n = 5;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 3.5;
        }
        let eig = symmetric_eigen(&a, n, true).unwrap();
        assert!(eig.values.iter().all(|&x| (x - 3.5).abs() < 1e-14));
    }

    #[test]
    fn path_graph_laplacian_closed_form() {
        // Tridiagonal (2, -1) matrix: eigenvalues 2 - 2 cos(k pi / (n + 1)).
        let n = 40;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            a[i * n + i] = 2.0;
            if i + 1 < n {
                a[i * n + i + 1] = -1.0;
                a[(i + 1) * n + i] = -1.0;
            }
        }
        let eig = symmetric_eigen(&a, n, true).unwrap();
        let values_only = symmetric_eigen(&a, n, false).unwrap();
        for k in 0..n {
            let exact = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((eig.values[k] - exact).abs() < 1e-12);
            assert!((values_only.values[k] - exact).abs() < 1e-12);
            assert!(residual(&a, n, eig.values[k], eig.vector(k).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn dense_random_matrix_orthonormal_vectors() {
        let n = 30;
        let mut a = vec![0.0; n * n];
        let mut s: u64 = 12345;
        for r in 0..n {
            for c in 0..=r {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let x = ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5;
                a[r * n + c] = x;
                a[c * n + r] = x;
            }
        }
        let eig = symmetric_eigen(&a, n, true).unwrap();
        let trace: f64 = (0..n).map(|i| a[i * n + i]).sum();
        assert!((eig.values.iter().sum::<f64>() - trace).abs() < 1e-12);
        for i in 0..n {
            let vi = eig.vector(i).unwrap();
            assert!(residual(&a, n, eig.values[i], vi) < 1e-12);
            for j in 0..n {
                let dot: f64 = vi.iter().zip(eig.vector(j).unwrap()).map(|(x, y)| x * y).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-12);
            }
        }
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn rejects_wrong_length() {
        assert!(matches!(
            symmetric_eigen(&[1.0, 2.0, 3.0], 2, false),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
