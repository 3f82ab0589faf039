//! Shared oracles for integration tests: brute-force direction grids,
//! exhaustive NNQP enumeration, and channel construction helpers.
//!
//! Everything here is independent of the solver paths it checks: the grids
//! evaluate the closed-form MSE directly, and the NNQP enumeration solves
//! every support system exactly.

// each integration binary uses a different subset of these helpers
#![allow(dead_code)]

use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::{DMatrix, DVector, Vector3};

use aircomp::channel::{sample_channel, ChannelSet};
use aircomp::config::SystemConfig;
use aircomp::stream::{derive_stream, standard_complex_gaussian};
use aircomp::C64;

/// Wraps a bare matrix into a ChannelSet with consistent synthetic geometry.
pub fn channels_from_matrix(matrix: DMatrix<C64>) -> ChannelSet {
    let k = matrix.ncols();
    let ap = Vector3::zeros();
    let positions: Vec<_> = (0..k).map(|i| Vector3::new(1.0 + i as f64, 0.0, 0.0)).collect();
    let distances = positions.iter().map(|p| (p - ap).norm()).collect();
    let large_scale = vec![1.0; k];
    ChannelSet { matrix, positions, distances, large_scale, ap_position: ap }
}

/// Unit-scale random channels with i.i.d. CN(0, 1) entries.
pub fn random_channels(n: usize, k: usize, seed: u64) -> ChannelSet {
    let mut rng = derive_stream(seed, &[n as u64, k as u64, 0xc0de]);
    let matrix = DMatrix::from_fn(n, k, |_, _| standard_complex_gaussian(&mut rng));
    channels_from_matrix(matrix)
}

/// One realization of the physical channel model at the given size.
pub fn paper_channels(cfg: &SystemConfig, seed: u64) -> ChannelSet {
    let mut rng = derive_stream(seed, &[0xfade]);
    sample_channel(&cfg.geometry, &cfg.fading, cfg.num_antennas, cfg.num_devices, &mut rng)
        .expect("channel generation")
}

fn min_gain_sq(channels: &ChannelSet, m: &DVector<C64>) -> f64 {
    (0..channels.num_devices())
        .map(|k| channels.matrix.column(k).dotc(m).norm_sqr())
        .fold(f64::INFINITY, f64::min)
}

/// Brute-force minimum of the closed-form MSE over all N = 2 beamformer
/// directions: the complex projective line is parametrized as
/// m(θ, φ) = (cos θ, sin θ·e^{jφ}), gridded coarsely and refined four times
/// around the incumbent, which pins the objective far below 0.5% error.
pub fn grid_oracle_mse_n2(channels: &ChannelSet, power: f64, noise: f64) -> f64 {
    assert_eq!(channels.num_antennas(), 2, "direction-grid oracle is for N = 2");
    let objective = |theta: f64, phi: f64| -> f64 {
        let m = DVector::from_vec(vec![
            C64::new(theta.cos(), 0.0),
            C64::from_polar(theta.sin(), phi),
        ]);
        let gain = min_gain_sq(channels, &m);
        if gain <= 1e-300 {
            return f64::INFINITY;
        }
        m.norm_squared() * noise / (power * gain)
    };

    let coarse_theta = 256usize;
    let coarse_phi = 512usize;
    let mut best = (f64::INFINITY, 0.0f64, 0.0f64);
    for i in 0..=coarse_theta {
        let theta = FRAC_PI_2 * i as f64 / coarse_theta as f64;
        for j in 0..coarse_phi {
            let phi = TAU * j as f64 / coarse_phi as f64;
            let value = objective(theta, phi);
            if value < best.0 {
                best = (value, theta, phi);
            }
        }
    }

    let mut step_theta = FRAC_PI_2 / coarse_theta as f64;
    let mut step_phi = TAU / coarse_phi as f64;
    for _ in 0..4 {
        let (center_theta, center_phi) = (best.1, best.2);
        for i in -16i32..=16 {
            for j in -16i32..=16 {
                let theta =
                    (center_theta + i as f64 * step_theta / 8.0).clamp(0.0, FRAC_PI_2);
                let phi = center_phi + j as f64 * step_phi / 8.0;
                let value = objective(theta, phi);
                if value < best.0 {
                    best = (value, theta, phi);
                }
            }
        }
        step_theta /= 8.0;
        step_phi /= 8.0;
    }
    best.0
}

/// Upper bound on the reduced K = 3 SDP by gridding rank-one feasible
/// points a(θ₁, θ₂, φ₁, φ₂) on the complex projective plane, rescaling each
/// onto the constraint surface, and refining once around the best cell.
pub fn rank_one_grid_upper_bound_k3(
    correlation: &DMatrix<C64>,
    gram: &DMatrix<C64>,
) -> f64 {
    assert_eq!(gram.nrows(), 3);
    let value_of = |a: &DVector<C64>| -> f64 {
        let gain = (0..3)
            .map(|k| correlation.column(k).dotc(a).norm_sqr())
            .fold(f64::INFINITY, f64::min);
        if gain <= 1e-300 {
            return f64::INFINITY;
        }
        (gram * a).dotc(a).re / gain
    };
    let assemble = |t1: f64, t2: f64, p1: f64, p2: f64| {
        DVector::from_vec(vec![
            C64::new(t1.cos(), 0.0),
            C64::from_polar(t1.sin() * t2.cos(), p1),
            C64::from_polar(t1.sin() * t2.sin(), p2),
        ])
    };

    let steps = 22usize;
    let mut best = (f64::INFINITY, [0.0f64; 4]);
    let scan = |center: [f64; 4], half_width: [f64; 4], best: &mut (f64, [f64; 4])| {
        for i1 in 0..=steps {
            let t1 = (center[0] + half_width[0] * (2.0 * i1 as f64 / steps as f64 - 1.0))
                .clamp(0.0, FRAC_PI_2);
            for i2 in 0..=steps {
                let t2 = (center[1] + half_width[1] * (2.0 * i2 as f64 / steps as f64 - 1.0))
                    .clamp(0.0, FRAC_PI_2);
                for j1 in 0..steps {
                    let p1 = center[2] + half_width[2] * (2.0 * j1 as f64 / steps as f64 - 1.0);
                    for j2 in 0..steps {
                        let p2 =
                            center[3] + half_width[3] * (2.0 * j2 as f64 / steps as f64 - 1.0);
                        let value = value_of(&assemble(t1, t2, p1, p2));
                        if value < best.0 {
                            *best = (value, [t1, t2, p1, p2]);
                        }
                    }
                }
            }
        }
    };

    let pi = std::f64::consts::PI;
    scan([FRAC_PI_2 / 2.0, FRAC_PI_2 / 2.0, 0.0, 0.0], [FRAC_PI_2 / 2.0, FRAC_PI_2 / 2.0, pi, pi], &mut best);
    for shrink in 1..=3 {
        let width = FRAC_PI_2 / 2.0 / (steps as f64 / 2.0).powi(shrink);
        let phase_width = pi / (steps as f64 / 2.0).powi(shrink);
        let center = best.1;
        scan(center, [width, width, phase_width, phase_width], &mut best);
    }
    best.0
}

/// Exhaustive active-set solution of max −λᵀQλ + λᵀr over λ ≥ 0: solves the
/// stationarity system on every support, keeps KKT-consistent candidates,
/// and returns the best. Exact up to the linear solves for K ≤ ~12.
pub fn nnqp_enumerate(q: &DMatrix<f64>, r: &DVector<f64>) -> DVector<f64> {
    let k = r.len();
    assert!(k <= 12);
    let objective =
        |lambda: &DVector<f64>| -> f64 { -(q * lambda).dot(lambda) + r.dot(lambda) };
    let mut best: Option<(f64, DVector<f64>)> = None;
    for mask in 0u32..(1 << k) {
        let support: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        let candidate = if support.is_empty() {
            DVector::zeros(k)
        } else {
            let qs = DMatrix::from_fn(support.len(), support.len(), |i, j| {
                q[(support[i], support[j])]
            });
            let rs = DVector::from_fn(support.len(), |i, _| r[support[i]]);
            match qs.scale(2.0).lu().solve(&rs) {
                Some(sol) if sol.iter().all(|&v| v >= -1e-12) => {
                    let mut lambda = DVector::zeros(k);
                    for (idx, &i) in support.iter().enumerate() {
                        lambda[i] = sol[idx].max(0.0);
                    }
                    lambda
                }
                _ => continue,
            }
        };
        let grad = (q * &candidate).scale(2.0) - r;
        let kkt_ok = (0..k).all(|i| {
            if support.contains(&i) {
                grad[i].abs() <= 1e-9 * (1.0 + r[i].abs())
            } else {
                grad[i] >= -1e-9 * (1.0 + r[i].abs())
            }
        });
        if !kkt_ok {
            continue;
        }
        let value = objective(&candidate);
        if best.as_ref().map_or(true, |(b, _)| value > *b) {
            best = Some((value, candidate));
        }
    }
    best.expect("at least one KKT point exists").1
}
