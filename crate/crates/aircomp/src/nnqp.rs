//! Nonnegative quadratic programming: maximize −λᵀQλ + λᵀr over λ ≥ 0.
//!
//! This is the Lagrange dual of one SCA subproblem. Dimensions are tiny (one
//! variable per device), so the solver is accelerated projected gradient with
//! a monotone restart, stepped by the largest eigenvalue of Q, plus an exact
//! active-set polish that pushes the KKT residual to solve precision once the
//! support has settled.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NnqpOptions {
    /// Bound on the complementarity residual ‖min(λ, 2Qλ − r)‖∞.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for NnqpOptions {
    fn default() -> Self {
        Self { tolerance: 1e-10, max_iterations: 100_000 }
    }
}

#[derive(Debug, Clone)]
pub struct NnqpSolution {
    /// Optimal multipliers λ ≥ 0.
    pub multipliers: DVector<f64>,
    /// Dual objective −λᵀQλ + λᵀr per accepted iterate (non-decreasing).
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub kkt_residual: f64,
}

fn dual_objective(q: &DMatrix<f64>, r: &DVector<f64>, lambda: &DVector<f64>) -> f64 {
    -(q * lambda).dot(lambda) + r.dot(lambda)
}

/// ‖min(λ, 2Qλ − r)‖∞: zero exactly at a KKT point of the NNQP.
pub fn kkt_residual(q: &DMatrix<f64>, r: &DVector<f64>, lambda: &DVector<f64>) -> f64 {
    let grad = (q * lambda).scale(2.0) - r;
    lambda
        .iter()
        .zip(grad.iter())
        .map(|(&l, &g)| l.min(g).abs())
        .fold(0.0, f64::max)
}

fn project(mut v: DVector<f64>) -> DVector<f64> {
    for x in v.iter_mut() {
        if *x < 0.0 {
            *x = 0.0;
        }
    }
    v
}

/// Solves the support system 2·Q_SS·λ_S = r_S exactly and checks it against
/// the KKT conditions; returns the polished point if valid.
fn active_set_polish(
    q: &DMatrix<f64>,
    r: &DVector<f64>,
    lambda: &DVector<f64>,
    tolerance: f64,
) -> Option<DVector<f64>> {
    let k = lambda.len();
    let scale = lambda.amax().max(1e-300);
    let support: Vec<usize> = (0..k).filter(|&i| lambda[i] > 1e-10 * scale).collect();
    if support.is_empty() {
        return None;
    }
    let qs = DMatrix::from_fn(support.len(), support.len(), |i, j| q[(support[i], support[j])]);
    let rs = DVector::from_fn(support.len(), |i, _| r[support[i]]);
    let sol = qs.scale(2.0).lu().solve(&rs)?;
    if sol.iter().any(|&v| v < -1e-12 * scale) {
        return None;
    }
    let mut polished = DVector::zeros(k);
    for (idx, &i) in support.iter().enumerate() {
        polished[i] = sol[idx].max(0.0);
    }
    (kkt_residual(q, r, &polished) <= tolerance).then_some(polished)
}

/// Maximizes −λᵀQλ + λᵀr over λ ≥ 0 for PSD Q. Deterministic for fixed
/// inputs; fails on input that is not PSD beyond tolerance.
pub fn solve_nnqp(
    gram: &DMatrix<f64>,
    linear: &DVector<f64>,
    options: &NnqpOptions,
) -> Result<NnqpSolution> {
    let k = linear.len();
    if gram.nrows() != k || gram.ncols() != k {
        return Err(Error::DimensionMismatch(format!(
            "gram matrix is {}x{} for {k} multipliers",
            gram.nrows(),
            gram.ncols()
        )));
    }
    let scale = gram.amax().max(1.0);
    if (gram - gram.transpose()).amax() > 1e-10 * scale {
        return Err(Error::InvalidArgument("gram matrix is not symmetric".into()));
    }
    let q = (gram + gram.transpose()).scale(0.5);
    let eig = nalgebra::SymmetricEigen::new(q.clone());
    let lam_max = eig.eigenvalues.iter().cloned().fold(0.0, f64::max);
    let lam_min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if lam_min < -1e-10 * (1.0 + lam_max) {
        return Err(Error::InvalidArgument(format!(
            "gram matrix is not PSD: min eigenvalue {lam_min:e}"
        )));
    }

    // Degenerate quadratic: the problem is linear over the orthant.
    if lam_max <= 1e-300 {
        if linear.iter().all(|&v| v <= 0.0) {
            let lambda = DVector::zeros(k);
            let obj = 0.0;
            return Ok(NnqpSolution {
                multipliers: lambda,
                objective_trace: vec![obj],
                iterations: 0,
                kkt_residual: 0.0,
            });
        }
        return Err(Error::SolverFailure("dual objective is unbounded above".into()));
    }

    let lipschitz = 2.0 * lam_max;
    let step = 1.0 / lipschitz;

    let mut lambda = project(linear.scale(step * 0.5)); // cheap warm start
    let mut obj = dual_objective(&q, linear, &lambda);
    let mut momentum = lambda.clone();
    let mut prev = lambda.clone();
    let mut t = 1.0f64;
    let mut trace = vec![obj];
    let mut residual = kkt_residual(&q, linear, &lambda);
    let mut iterations = 0;

    while residual > options.tolerance && iterations < options.max_iterations {
        iterations += 1;
        let grad = (&q * &momentum).scale(2.0) - linear;
        let candidate = project(&momentum - grad.scale(step));
        let cand_obj = dual_objective(&q, linear, &candidate);

        if cand_obj >= obj {
            // accept and continue accelerating
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            momentum = &candidate + (&candidate - &prev).scale((t - 1.0) / t_next);
            prev = lambda;
            lambda = candidate;
            obj = cand_obj;
            t = t_next;
            trace.push(obj);
        } else {
            // monotone restart: drop momentum, next step is plain projected
            // gradient from the best point, which cannot decrease the dual
            momentum = lambda.clone();
            prev = lambda.clone();
            t = 1.0;
        }
        residual = kkt_residual(&q, linear, &lambda);

        if iterations % 16 == 0 || residual <= options.tolerance {
            if let Some(polished) = active_set_polish(&q, linear, &lambda, options.tolerance) {
                let pol_obj = dual_objective(&q, linear, &polished);
                if pol_obj >= obj {
                    lambda = polished;
                    obj = pol_obj;
                    trace.push(obj);
                    residual = kkt_residual(&q, linear, &lambda);
                    break;
                }
            }
        }
    }

    Ok(NnqpSolution { multipliers: lambda, objective_trace: trace, iterations, kkt_residual: residual })
}
