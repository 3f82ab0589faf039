//! Over-the-air computation (AirComp) receive beamforming.
//!
//! A multi-antenna access point recovers the sum of simultaneously
//! transmitted device symbols. For a fixed receive beamformer the optimal
//! transmit scalars and denoising factor are closed-form, which reduces the
//! whole design to the non-convex problem min ‖m‖² s.t. |m^H h_k|² ≥ 1.
//! This crate implements the full pipeline around that problem:
//!
//! * [`channel`] — device geometry, path loss, Rician fading, ULA steering.
//! * [`signal`] — closed-form transceiver expressions, analytic MSE, and
//!   Monte Carlo transmission simulation.
//! * [`sdp`], [`nnqp`], [`sca`], [`randomization`] — self-contained convex
//!   kernels: a dense Hermitian interior-point SDP solver, the nonnegative
//!   QP dual of an SCA step, and Gaussian randomization.
//! * [`algorithms`] — the four beamforming algorithms (direct SDR, direct
//!   SCA, and their span-reduced variants sdr-opt / sca-opt).
//! * [`experiments`] — seeded sweeps, aggregation, CSV/JSON emission, and
//!   empirical-vs-analytic validation.
//!
//! With the default `parallel` feature, sweeps and transmission simulation
//! fan out over a rayon pool; results are bit-identical to the sequential
//! fallback.

pub mod algorithms;
pub mod channel;
pub mod config;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod nnqp;
pub mod randomization;
pub mod sca;
pub mod sdp;
pub mod signal;
pub mod stream;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use linalg::C64;
