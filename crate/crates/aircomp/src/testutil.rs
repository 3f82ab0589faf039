//! Shared helpers for unit tests.

use nalgebra::{DMatrix, Vector3};

use crate::channel::ChannelSet;
use crate::linalg::C64;
use crate::stream::{derive_stream, standard_complex_gaussian};

/// Builds a ChannelSet directly from a matrix; geometry fields are
/// synthesized to satisfy the structural invariants.
pub(crate) fn channels_from_matrix(matrix: DMatrix<C64>) -> ChannelSet {
    let k = matrix.ncols();
    let ap = Vector3::zeros();
    let positions: Vec<_> = (0..k).map(|i| Vector3::new(1.0 + i as f64, 0.0, 0.0)).collect();
    let distances = positions.iter().map(|p| (p - ap).norm()).collect();
    let large_scale = vec![1.0; k];
    ChannelSet { matrix, positions, distances, large_scale, ap_position: ap }
}

/// Random unit-scale channels with i.i.d. CN(0, 1) entries.
pub(crate) fn random_channels(n: usize, k: usize, seed: u64) -> ChannelSet {
    let mut rng = derive_stream(seed, &[n as u64, k as u64]);
    let matrix = DMatrix::from_fn(n, k, |_, _| standard_complex_gaussian(&mut rng));
    channels_from_matrix(matrix)
}
