//! Construction of one convex SCA subproblem and its closed-form primal
//! recovery from the dual multipliers.
//!
//! Around an expansion point z, each non-convex constraint |m^H v_k|² ≥ 1 is
//! replaced by its linearization 2Re{m^H v_k v_k^H z} − |z^H v_k|² ≥ 1. The
//! Lagrange dual of the resulting convex program is a nonnegative QP in λ
//! with Q_jk = Re{c_j^* ⟨v_j, M⁻¹ v_k⟩ c_k} and r_k = 1 + |c_k|², where
//! c_k = v_k^H z and M is the quadratic objective's Hessian (identity for the
//! full-dimension problem, D = H^H H for the reduced one). The minimizer is
//! recovered as m*(λ) = M⁻¹ Σ_k λ_k c_k v_k.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_part, require_hermitian, C64};
use crate::nnqp::{solve_nnqp, NnqpOptions, NnqpSolution};

/// Dual quadratic of one SCA subproblem plus its primal reconstruction map.
#[derive(Debug, Clone)]
pub struct ScaSubproblem {
    /// Real symmetric PSD K×K dual Hessian.
    pub gram: DMatrix<f64>,
    /// Linear dual coefficients, r_k = 1 + |c_k|² ≥ 1.
    pub linear: DVector<f64>,
    /// Columns g_k = M⁻¹(c_k v_k); the primal minimizer is G·λ.
    reconstruction: DMatrix<C64>,
}

impl ScaSubproblem {
    pub fn num_constraints(&self) -> usize {
        self.linear.len()
    }

    pub fn solve(&self, options: &NnqpOptions) -> Result<NnqpSolution> {
        solve_nnqp(&self.gram, &self.linear, options)
    }

    /// Stationary point of the subproblem Lagrangian for the given
    /// multipliers: Σ_k λ_k · M⁻¹(c_k v_k).
    pub fn reconstruct(&self, multipliers: &DVector<f64>) -> Result<DVector<C64>> {
        if multipliers.len() != self.num_constraints() {
            return Err(Error::DimensionMismatch(format!(
                "{} multipliers for {} constraints",
                multipliers.len(),
                self.num_constraints()
            )));
        }
        let lambda_c = multipliers.map(|v| C64::new(v, 0.0));
        Ok(&self.reconstruction * lambda_c)
    }
}

/// Free-function form of [`ScaSubproblem::reconstruct`].
pub fn reconstruct_primal(sub: &ScaSubproblem, multipliers: &DVector<f64>) -> Result<DVector<C64>> {
    sub.reconstruct(multipliers)
}

/// Builds the dual quadratic of the SCA subproblem at `expansion` for the
/// constraint vectors in the columns of `basis`. `hessian` is the objective's
/// quadratic form; `None` means the identity. A singular Hessian is handled
/// with a 1e-10 relative Tikhonov term, which only guards round-off for the
/// Gram matrices that occur here.
pub fn build_sca_subproblem(
    expansion: &DVector<C64>,
    basis: &DMatrix<C64>,
    hessian: Option<&DMatrix<C64>>,
) -> Result<ScaSubproblem> {
    let n = basis.nrows();
    let k = basis.ncols();
    if expansion.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "expansion point has length {}, basis vectors have length {n}",
            expansion.len()
        )));
    }
    if k == 0 {
        return Err(Error::InvalidArgument("need at least one constraint vector".into()));
    }

    // c_k = v_k^H z; scaled vectors u_k = c_k v_k
    let correlations: Vec<C64> = (0..k).map(|j| basis.column(j).dotc(expansion)).collect();
    let mut scaled = DMatrix::<C64>::zeros(n, k);
    for j in 0..k {
        scaled.set_column(j, &(basis.column(j) * correlations[j]));
    }

    let reconstruction = match hessian {
        None => scaled.clone(),
        Some(d) => {
            if d.nrows() != n || d.ncols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "hessian is {}x{}, expected {n}x{n}",
                    d.nrows(),
                    d.ncols()
                )));
            }
            require_hermitian(d, 1e-10, "hessian")?;
            let mut reg = hermitian_part(d);
            let ridge = 1e-10 * (reg.trace().re / n as f64).max(f64::MIN_POSITIVE);
            for i in 0..n {
                reg[(i, i)] += C64::new(ridge, 0.0);
            }
            let chol = nalgebra::Cholesky::new(reg).ok_or_else(|| {
                Error::SolverFailure("hessian is not positive semidefinite".into())
            })?;
            chol.solve(&scaled)
        }
    };

    let gram_c = scaled.adjoint() * &reconstruction;
    let gram_raw = gram_c.map(|z| z.re);
    let gram = (&gram_raw + gram_raw.transpose()).scale(0.5);
    let linear = DVector::from_fn(k, |j, _| 1.0 + correlations[j].norm_sqr());

    Ok(ScaSubproblem { gram, linear, reconstruction })
}
