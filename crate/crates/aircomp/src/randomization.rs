//! Gaussian randomization: extraction of a feasible rank-one vector from a
//! relaxed SDP solution.
//!
//! Candidates are drawn from CN(0, X) via the eigendecomposition of X. Two
//! deterministic candidates are always added in front of the random ones:
//! the dominant eigenvector of X (exact when the relaxation is tight) and
//! the least-norm gain-equalizing vector solving v_k^H x = 1 for all k
//! (exact when the constraint vectors are orthogonal). Every candidate is
//! rescaled onto the constraint surface min_k |x^H v_k|² = 1; the one with
//! the smallest objective wins, ties broken by lowest candidate index.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::sdp::SdpSolution;
use crate::signal::rescale_to_unit_min_gain;
use crate::stream::{complex_gaussian_vector, Stream};

/// Least-norm solution of v_k^H x = 1 for every constraint vector: x = V c
/// with (V^H V) c = 1. Equalizes all gains exactly when V^H V is nonsingular.
fn gain_equalizing_candidate(vectors: &DMatrix<C64>) -> Option<DVector<C64>> {
    let k = vectors.ncols();
    let mut gram = vectors.adjoint() * vectors;
    let ridge = 1e-12 * (gram.trace().re / k as f64).max(f64::MIN_POSITIVE);
    for i in 0..k {
        gram[(i, i)] += C64::new(ridge, 0.0);
    }
    let ones = DVector::from_element(k, C64::new(1.0, 0.0));
    let coefficients = nalgebra::Cholesky::new(gram)?.solve(&ones);
    Some(vectors * coefficients)
}

/// Extracts a feasible vector from `solution.matrix`, minimizing `objective`
/// over the rescaled candidates. Candidates that are numerically orthogonal
/// to some constraint vector are skipped; if every candidate degenerates, an
/// extraction failure is reported.
pub fn gaussian_randomization(
    solution: &SdpSolution,
    constraint_vectors: &DMatrix<C64>,
    objective: impl Fn(&DVector<C64>) -> f64,
    num_candidates: usize,
    rng: &mut Stream,
) -> Result<DVector<C64>> {
    if num_candidates == 0 {
        return Err(Error::InvalidArgument("need at least one randomization candidate".into()));
    }
    let x = &solution.matrix;
    if x.nrows() != constraint_vectors.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "solution of order {} against constraint vectors of length {}",
            x.nrows(),
            constraint_vectors.nrows()
        )));
    }

    let (eigenvalues, eigenvectors) = crate::linalg::hermitian_eigen(x);
    let factor = {
        // columns u_i sqrt(max(lambda_i, 0)) so that F F^H = X_+
        let mut f = eigenvectors.clone();
        for (i, col) in (0..f.ncols()).map(|i| (i, eigenvalues[i].max(0.0).sqrt())) {
            f.set_column(i, &(eigenvectors.column(i) * C64::new(col, 0.0)));
        }
        f
    };

    let mut best: Option<(f64, DVector<C64>)> = None;
    let mut skipped = 0usize;
    let mut consider = |raw: DVector<C64>| {
        let candidate = match rescale_to_unit_min_gain(&raw, constraint_vectors) {
            Ok(v) => v,
            Err(_) => {
                skipped += 1;
                return;
            }
        };
        let value = objective(&candidate);
        if best.as_ref().map_or(true, |(b, _)| value < *b) {
            best = Some((value, candidate));
        }
    };

    consider(eigenvectors.column(0).clone_owned());
    if let Some(equalizer) = gain_equalizing_candidate(constraint_vectors) {
        consider(equalizer);
    }
    for _ in 0..num_candidates {
        consider(&factor * complex_gaussian_vector(rng, x.ncols()));
    }

    best.map(|(_, v)| v).ok_or_else(|| {
        Error::ExtractionFailure(format!(
            "all {skipped} candidates had zero gain on some constraint vector"
        ))
    })
}
