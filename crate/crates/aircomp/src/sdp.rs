//! Dense primal-dual interior-point solver for small Hermitian SDPs.
//!
//! Solves  min ⟨C, X⟩  s.t.  ⟨A_k, X⟩ ≥ b_k ∀k,  X ⪰ 0  with Hermitian data.
//! Complex problems are reduced to one real PSD cone through the standard
//! real-symmetric embedding of order 2n (E(M) = [[Re, −Im], [Im, Re]], scaled
//! by 1/2 so objective and constraint values carry over unchanged), then
//! handled by a path-following method with HKM search directions, a Mehrotra
//! predictor-corrector step, and dense factorizations throughout. Problem
//! orders here stay small (≤ a few hundred), where dense methods are simple
//! and fast enough.

use nalgebra::{DMatrix, DVector};

use crate::config::SdpOptions;
use crate::error::{Error, Result};
use crate::linalg::{complex_from_embedding, hermitian_part, real_embedding, require_hermitian, C64};

/// One inequality constraint ⟨matrix, X⟩ ≥ bound.
#[derive(Debug, Clone)]
pub struct SdpConstraint {
    pub matrix: DMatrix<C64>,
    pub bound: f64,
}

/// Dense Hermitian SDP in inequality form.
#[derive(Debug, Clone)]
pub struct SdpProblem {
    pub objective: DMatrix<C64>,
    pub constraints: Vec<SdpConstraint>,
}

impl SdpProblem {
    pub fn new(objective: DMatrix<C64>, constraints: Vec<SdpConstraint>) -> Result<Self> {
        if objective.nrows() == 0 {
            return Err(Error::InvalidArgument("SDP order must be >= 1".into()));
        }
        require_hermitian(&objective, 1e-12, "objective")?;
        let n = objective.nrows();
        for (k, c) in constraints.iter().enumerate() {
            if c.matrix.nrows() != n || c.matrix.ncols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "constraint {k} is {}x{}, expected {n}x{n}",
                    c.matrix.nrows(),
                    c.matrix.ncols()
                )));
            }
            require_hermitian(&c.matrix, 1e-12, &format!("constraint {k}"))?;
        }
        Ok(Self { objective, constraints })
    }

    pub fn order(&self) -> usize {
        self.objective.nrows()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SdpStatus {
    Optimal,
    MaxIterations,
    InfeasibleDetected,
}

/// Primal/dual pair returned by the solver.
#[derive(Debug, Clone)]
pub struct SdpSolution {
    /// Hermitian PSD primal solution.
    pub matrix: DMatrix<C64>,
    /// Nonnegative multipliers of the ≥ constraints.
    pub duals: DVector<f64>,
    pub primal_objective: f64,
    pub dual_objective: f64,
    /// Signed absolute gap, primal − dual.
    pub gap: f64,
    pub status: SdpStatus,
    pub iterations: usize,
    /// Primal objective per interior-point iteration.
    pub objective_trace: Vec<f64>,
}

impl SdpSolution {
    pub fn relative_gap(&self) -> f64 {
        self.gap.abs() / (1.0 + self.primal_objective.abs())
    }
}

/// Solves a Hermitian SDP. Non-converged runs come back with an explicit
/// status instead of an error so callers can decide what to do with them;
/// malformed input is an error.
pub fn solve_sdp(problem: &SdpProblem, options: &SdpOptions) -> Result<SdpSolution> {
    // Half-scaled real embedding keeps the objective, bounds, and duals of
    // the real problem numerically identical to the complex ones.
    let c_real = real_embedding(&hermitian_part(&problem.objective)).scale(0.5);
    let a_real: Vec<DMatrix<f64>> = problem
        .constraints
        .iter()
        .map(|c| real_embedding(&hermitian_part(&c.matrix)).scale(0.5))
        .collect();
    let bounds = DVector::from_iterator(
        problem.constraints.len(),
        problem.constraints.iter().map(|c| c.bound),
    );

    let real = solve_real_sdp(&c_real, &a_real, &bounds, options)?;
    let matrix = hermitian_part(&complex_from_embedding(&real.x)?);
    Ok(SdpSolution {
        matrix,
        duals: real.y,
        primal_objective: real.primal_objective,
        dual_objective: real.dual_objective,
        gap: real.primal_objective - real.dual_objective,
        status: real.status,
        iterations: real.iterations,
        objective_trace: real.trace,
    })
}

struct RealSolution {
    x: DMatrix<f64>,
    y: DVector<f64>,
    primal_objective: f64,
    dual_objective: f64,
    status: SdpStatus,
    iterations: usize,
    trace: Vec<f64>,
}

fn frob(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.dot(b)
}

fn sym(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()).scale(0.5)
}

fn is_pd(a: DMatrix<f64>) -> bool {
    nalgebra::Cholesky::new(a).is_some()
}

/// Largest step α ∈ (0, hi] keeping m + α·d positive definite, located by
/// bisection with a Cholesky feasibility oracle. m itself must be PD.
fn max_step_psd(m: &DMatrix<f64>, d: &DMatrix<f64>, hi: f64) -> f64 {
    if is_pd(m + d.scale(hi)) {
        return hi;
    }
    let (mut lo, mut hi) = (0.0f64, hi);
    for _ in 0..36 {
        let mid = 0.5 * (lo + hi);
        if is_pd(m + d.scale(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Ratio test for the nonnegative-orthant block.
fn max_step_nonneg(v: &DVector<f64>, d: &DVector<f64>, hi: f64) -> f64 {
    let mut alpha = hi;
    for i in 0..v.len() {
        if d[i] < 0.0 {
            alpha = alpha.min(-v[i] / d[i]);
        }
    }
    alpha
}

fn solve_real_sdp(
    c: &DMatrix<f64>,
    a_mats: &[DMatrix<f64>],
    b: &DVector<f64>,
    options: &SdpOptions,
) -> Result<RealSolution> {
    let n = c.nrows();
    let num_con = a_mats.len();
    let c_norm = c.norm();
    let b_norm = b.norm();

    // Identity-scaled strictly feasible start: X0 = t·I with t large enough
    // that every constraint holds with slack >= 1 whenever its matrix has
    // positive trace (a Slater point is always available that way for the
    // problem class solved here).
    let mut t0 = 1.0f64;
    for (k, a) in a_mats.iter().enumerate() {
        let tr = a.trace();
        if tr > 0.0 && b[k] + 1.0 > 0.0 {
            t0 = t0.max((b[k] + 1.0) / tr);
        }
    }
    let mut x = DMatrix::<f64>::identity(n, n).scale(t0);
    let mut s = DVector::from_fn(num_con, |k, _| (frob(&a_mats[k], &x) - b[k]).max(1.0));
    let mut y = DVector::from_element(num_con, 1.0);
    let mut z = DMatrix::<f64>::identity(n, n).scale(1.0 + c_norm);

    let tau = 0.98;
    let step_hi = 1.0 / tau;
    let mut trace = Vec::with_capacity(options.max_iterations);
    let mut status = SdpStatus::MaxIterations;
    let mut iterations = 0;

    for iter in 0..options.max_iterations {
        iterations = iter + 1;

        let rp = DVector::from_fn(num_con, |k, _| b[k] - frob(&a_mats[k], &x) + s[k]);
        let mut rd = c.clone();
        for (k, a) in a_mats.iter().enumerate() {
            rd -= a.scale(y[k]);
        }
        rd -= &z;

        let pobj = frob(c, &x);
        let dobj = b.dot(&y);
        trace.push(pobj);

        let mu = (frob(&x, &z) + s.dot(&y)) / (n + num_con) as f64;
        let pinf = rp.norm() / (1.0 + b_norm);
        let dinf = rd.norm() / (1.0 + c_norm);
        let gap_rel = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        if pinf <= options.tolerance && dinf <= options.tolerance && gap_rel <= options.tolerance {
            status = SdpStatus::Optimal;
            break;
        }
        if y.amax() > 1e14 * (1.0 + c_norm) {
            status = SdpStatus::InfeasibleDetected;
            break;
        }

        let z_chol = match nalgebra::Cholesky::new(z.clone()) {
            Some(ch) => ch,
            None => {
                return Err(Error::SolverFailure(
                    "dual iterate lost positive definiteness".into(),
                ))
            }
        };
        let z_inv = z_chol.inverse();

        // Schur complement M_kj = <A_k, X A_j Z^{-1}> + diag(s/y).
        let t_mats: Vec<DMatrix<f64>> = a_mats.iter().map(|a| &x * a * &z_inv).collect();
        let mut m = DMatrix::<f64>::zeros(num_con, num_con);
        for k in 0..num_con {
            for j in 0..num_con {
                m[(k, j)] = frob(&a_mats[k], &t_mats[j]);
            }
        }
        for k in 0..num_con {
            m[(k, k)] += s[k] / y[k];
        }
        let m_lu = sym(&m).lu();

        let x_rd = &x * &rd;
        let solve_direction = |rc_mat: &DMatrix<f64>, rc_lin: &DVector<f64>| -> Option<_> {
            let w = (rc_mat - &x_rd) * &z_inv;
            let rhs = DVector::from_fn(num_con, |k, _| {
                rp[k] - frob(&a_mats[k], &w) + rc_lin[k] / y[k]
            });
            let dy = m_lu.solve(&rhs)?;
            let mut dz = rd.clone();
            let mut dx = w;
            for (k, a) in a_mats.iter().enumerate() {
                dz -= a.scale(dy[k]);
                dx += t_mats[k].scale(dy[k]);
            }
            let dx = sym(&dx);
            let ds = DVector::from_fn(num_con, |k, _| (rc_lin[k] - s[k] * dy[k]) / y[k]);
            Some((dx, ds, dy, dz))
        };

        // Predictor: pure affine direction (sigma = 0).
        let rc_aff = (&x * &z).scale(-1.0);
        let rc_lin_aff = DVector::from_fn(num_con, |k, _| -s[k] * y[k]);
        let (dx_aff, ds_aff, dy_aff, dz_aff) = solve_direction(&rc_aff, &rc_lin_aff)
            .ok_or_else(|| Error::SolverFailure("singular Schur complement".into()))?;

        let ap_aff = max_step_psd(&x, &dx_aff, 1.0).min(max_step_nonneg(&s, &ds_aff, 1.0));
        let ad_aff = max_step_psd(&z, &dz_aff, 1.0).min(max_step_nonneg(&y, &dy_aff, 1.0));
        let mu_aff = (frob(&(&x + dx_aff.scale(ap_aff)), &(&z + dz_aff.scale(ad_aff)))
            + (&s + ds_aff.scale(ap_aff)).dot(&(&y + dy_aff.scale(ad_aff))))
            .max(0.0)
            / (n + num_con) as f64;
        let sigma = (mu_aff / mu).powi(3).clamp(1e-10, 1.0);

        // Corrector with second-order complementarity terms.
        let mut rc = (&x * &z).scale(-1.0) - &dx_aff * &dz_aff;
        for i in 0..n {
            rc[(i, i)] += sigma * mu;
        }
        let rc_lin = DVector::from_fn(num_con, |k, _| sigma * mu - s[k] * y[k] - ds_aff[k] * dy_aff[k]);
        let (dx, ds, dy, dz) = solve_direction(&rc, &rc_lin)
            .ok_or_else(|| Error::SolverFailure("singular Schur complement".into()))?;

        let ap = (tau * max_step_psd(&x, &dx, step_hi).min(max_step_nonneg(&s, &ds, step_hi))).min(1.0);
        let ad = (tau * max_step_psd(&z, &dz, step_hi).min(max_step_nonneg(&y, &dy, step_hi))).min(1.0);
        if ap < 1e-9 && ad < 1e-9 {
            break; // stalled; report best iterate with MaxIterations status
        }

        x = sym(&(&x + dx.scale(ap)));
        s += ds.scale(ap);
        z = sym(&(&z + dz.scale(ad)));
        y += dy.scale(ad);
    }

    let pobj = frob(c, &x);
    let dobj = b.dot(&y);
    Ok(RealSolution {
        x,
        y,
        primal_objective: pobj,
        dual_objective: dobj,
        status,
        iterations,
        trace,
    })
}
