//! Positive-semidefiniteness checks for Hermitian matrices.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Pivot policy for the semidefinite Cholesky factorization.
///
/// The factorization fails only when a pivot drops below
/// `-rel_tol · max_diag · N`; pivots of smaller magnitude count as zero, so
/// rank-deficient PSD matrices (atoms, rank-one Gram matrices) pass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsdPolicy {
    pub rel_tol: f64,
}

impl Default for PsdPolicy {
    fn default() -> Self {
        PsdPolicy { rel_tol: 1e-10 }
    }
}

impl PsdPolicy {
    pub fn tolerance(&self, matrix: &DMatrix<Complex64>) -> f64 {
        let n = matrix.nrows();
        let scale = (0..n).map(|i| matrix[(i, i)].re.abs()).fold(0.0, f64::max);
        self.rel_tol * scale * n as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Factorization {
    Semidefinite { min_pivot: f64 },
    Indefinite { column: usize, pivot: f64 },
}

/// Cholesky with zero-pivot handling. A pivot within `±tol` is treated as
/// zero, which is only consistent if the rest of its column vanishes too
/// (`|a_ij|² ≤ a_ii a_jj` for PSD matrices); a large residual there means
/// the matrix is indefinite.
pub(crate) fn semidefinite_cholesky(a: &DMatrix<Complex64>, tol: f64) -> Factorization {
    let n = a.nrows();
    let mut l = DMatrix::<Complex64>::zeros(n, n);
    let mut min_pivot = f64::INFINITY;
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        min_pivot = min_pivot.min(d);
        if d < -tol {
            return Factorization::Indefinite { column: j, pivot: d };
        }
        if d <= tol {
            for i in (j + 1)..n {
                let mut r = a[(i, j)];
                let mut di = a[(i, i)].re;
                for k in 0..j {
                    r -= l[(i, k)] * l[(j, k)].conj();
                    di -= l[(i, k)].norm_sqr();
                }
                if r.norm_sqr() > 4.0 * tol * (di.abs() + tol) {
                    return Factorization::Indefinite { column: j, pivot: d };
                }
            }
            continue;
        }
        let root = d.sqrt();
        l[(j, j)] = Complex64::new(root, 0.0);
        for i in (j + 1)..n {
            let mut r = a[(i, j)];
            for k in 0..j {
                r -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = r / root;
        }
    }
    Factorization::Semidefinite {
        min_pivot: if n == 0 { 0.0 } else { min_pivot },
    }
}

/// Smallest eigenvalue of a Hermitian matrix, using a real solver when the
/// imaginary parts vanish.
pub(crate) fn min_eigenvalue(a: &DMatrix<Complex64>) -> f64 {
    if a.iter().all(|z| z.im == 0.0) {
        let re = a.map(|z| z.re);
        re.symmetric_eigenvalues().min()
    } else {
        a.symmetric_eigenvalues().min()
    }
}

/// Smallest eigenvalue and a unit eigenvector for it.
pub(crate) fn min_eigenpair(a: &DMatrix<Complex64>) -> (f64, DVector<Complex64>) {
    let eig = a.clone().symmetric_eigen();
    let (idx, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))
        .expect("non-empty matrix");
    (lambda, eig.eigenvectors.column(idx).into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(rows: &[&[f64]]) -> DMatrix<Complex64> {
        let n = rows.len();
        DMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j], 0.0))
    }

    #[test]
    fn rank_one_passes() {
        let a = DMatrix::from_element(6, 6, Complex64::new(1.0, 0.0));
        let tol = PsdPolicy::default().tolerance(&a);
        assert!(matches!(
            semidefinite_cholesky(&a, tol),
            Factorization::Semidefinite { .. }
        ));
    }

    #[test]
    fn zero_pivot_with_coupling_is_indefinite() {
        let a = real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let f = semidefinite_cholesky(&a, 1e-12);
        assert!(matches!(f, Factorization::Indefinite { column: 0, .. }));
    }

    #[test]
    fn negative_pivot_detected() {
        let a = real(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(matches!(
            semidefinite_cholesky(&a, 1e-12),
            Factorization::Indefinite { column: 1, .. }
        ));
    }

    #[test]
    fn eigenpair_is_consistent() {
        let a = real(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let (lambda, v) = min_eigenpair(&a);
        assert!((lambda - 1.0).abs() < 1e-14);
        let av = &a * &v;
        assert!((av - v * Complex64::new(lambda, 0.0)).norm() < 1e-14);
        assert!((min_eigenvalue(&a) - 1.0).abs() < 1e-14);
    }
}
