//! Small dense complex linear-algebra helpers used across the solvers.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = nalgebra::Complex<f64>;

/// Hermitian part (A + A^H)/2.
pub fn hermitian_part(a: &DMatrix<C64>) -> DMatrix<C64> {
    (a + a.adjoint()).scale(0.5)
}

/// Max modulus over entries.
pub fn max_modulus(a: &DMatrix<C64>) -> f64 {
    a.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Checks ‖A − A^H‖_max ≤ tol · (1 + ‖A‖_max).
pub fn is_hermitian(a: &DMatrix<C64>, tol: f64) -> bool {
    if !a.is_square() {
        return false;
    }
    let dev = max_modulus(&(a - a.adjoint()));
    dev <= tol * (1.0 + max_modulus(a))
}

pub fn require_hermitian(a: &DMatrix<C64>, tol: f64, what: &str) -> Result<()> {
    if is_hermitian(a, tol) {
        Ok(())
    } else {
        Err(Error::NonHermitian(format!("{what} deviates from its adjoint beyond {tol:e}")))
    }
}

/// Real-symmetric embedding of order 2n: E(M) = [[Re M, −Im M], [Im M, Re M]].
///
/// E is a ring homomorphism, maps Hermitian to symmetric, and preserves
/// positive semidefiniteness in both directions.
pub fn real_embedding(a: &DMatrix<C64>) -> DMatrix<f64> {
    let n = a.nrows();
    let mut out = DMatrix::<f64>::zeros(2 * n, 2 * n);
    for j in 0..n {
        for i in 0..n {
            let v = a[(i, j)];
            out[(i, j)] = v.re;
            out[(i, j + n)] = -v.im;
            out[(i + n, j)] = v.im;
            out[(i + n, j + n)] = v.re;
        }
    }
    out
}

/// Inverse of [`real_embedding`] for (approximately) structured symmetric
/// matrices: averages the two real blocks and antisymmetrizes the imaginary
/// ones, so any symmetric input lands on the nearest embedded matrix.
pub fn complex_from_embedding(x: &DMatrix<f64>) -> Result<DMatrix<C64>> {
    let m = x.nrows();
    if !x.is_square() || m % 2 != 0 {
        return Err(Error::DimensionMismatch(format!(
            "embedded matrix must be square of even order, got {}x{}",
            x.nrows(),
            x.ncols()
        )));
    }
    let n = m / 2;
    let mut out = DMatrix::<C64>::zeros(n, n);
    for j in 0..n {
        for i in 0..n {
            let re = 0.5 * (x[(i, j)] + x[(i + n, j + n)]);
            let im = 0.5 * (x[(i + n, j)] - x[(i, j + n)]);
            out[(i, j)] = C64::new(re, im);
        }
    }
    Ok(out)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
///
/// Returns (eigenvalues, eigenvectors) with unit-norm eigenvector columns.
pub fn hermitian_eigen(a: &DMatrix<C64>) -> (DVector<f64>, DMatrix<C64>) {
    let sym = hermitian_part(a);
    let eig = nalgebra::SymmetricEigen::new(sym);
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let vectors = DMatrix::from_columns(
        &order.iter().map(|&i| eig.eigenvectors.column(i)).collect::<Vec<_>>(),
    );
    (values, vectors)
}

/// Minimum eigenvalue of a real symmetric matrix.
pub fn min_eigenvalue_sym(a: &DMatrix<f64>) -> f64 {
    let eig = nalgebra::SymmetricEigen::new((a + a.transpose()).scale(0.5));
    eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Effective gains m^H h_k for every column h_k.
pub fn effective_gains(columns: &DMatrix<C64>, m: &DVector<C64>) -> DVector<C64> {
    (columns.adjoint() * m).map(|g| g.conj())
}

/// (min_k |m^H h_k|, argmin) over the columns of `columns`.
pub fn min_abs_gain(columns: &DMatrix<C64>, m: &DVector<C64>) -> (f64, usize) {
    let gains = effective_gains(columns, m);
    let mut best = (f64::INFINITY, 0);
    for (k, g) in gains.iter().enumerate() {
        let a = g.norm();
        if a < best.0 {
            best = (a, k);
        }
    }
    best
}

/// Index of the device whose |m^H h_k| is smallest, together with the check
/// that no gain is numerically degenerate (|gain| ≤ tol·‖m‖·‖h_k‖).
pub fn checked_min_gain(columns: &DMatrix<C64>, m: &DVector<C64>, tol: f64) -> Result<(f64, usize)> {
    let m_norm = m.norm();
    if m_norm == 0.0 {
        return Err(Error::DegenerateChannel { device: 0 });
    }
    for k in 0..columns.ncols() {
        let g = columns.column(k).dotc(m).norm();
        if g <= tol * m_norm * columns.column(k).norm() {
            return Err(Error::DegenerateChannel { device: k });
        }
    }
    Ok(min_abs_gain(columns, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn embedding_round_trips_and_multiplies() {
        let a = DMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, -0.5), c(1.0, 0.5), c(3.0, 0.0)]);
        let e = real_embedding(&a);
        let back = complex_from_embedding(&e).unwrap();
        assert!(max_modulus(&(&a - &back)) < 1e-15);

        // ring homomorphism: E(A A) = E(A) E(A)
        let prod = real_embedding(&(&a * &a));
        assert_relative_eq!((&e * &e - prod).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn hermitian_eigen_reconstructs() {
        let a = DMatrix::from_row_slice(
            3,
            3,
            &[
                c(4.0, 0.0), c(1.0, 1.0), c(0.0, -2.0),
                c(1.0, -1.0), c(5.0, 0.0), c(0.5, 0.0),
                c(0.0, 2.0), c(0.5, 0.0), c(1.0, 0.0),
            ],
        );
        let (vals, vecs) = hermitian_eigen(&a);
        assert!(vals[0] >= vals[1] && vals[1] >= vals[2]);
        let diag = DMatrix::from_diagonal(&vals.map(|v| c(v, 0.0)));
        let recon = &vecs * diag * vecs.adjoint();
        assert!(max_modulus(&(&a - &recon)) < 1e-10);
    }

    #[test]
    fn min_gain_finds_orthogonal_direction() {
        let h = DMatrix::from_columns(&[
            DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]),
            DVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)]),
        ]);
        let m = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let (g, k) = min_abs_gain(&h, &m);
        assert_eq!(k, 1);
        assert_eq!(g, 0.0);
        assert!(matches!(
            checked_min_gain(&h, &m, 1e-12),
            Err(crate::error::Error::DegenerateChannel { device: 1 })
        ));
    }
}
