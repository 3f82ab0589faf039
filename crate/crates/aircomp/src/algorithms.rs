//! The four receive-beamforming algorithms.
//!
//! All of them minimize ‖m‖² subject to |m^H h_k|² ≥ 1:
//!
//! * `direct_sdr`  — lift to an N×N SDP, drop the rank-one constraint,
//!   recover m by Gaussian randomization.
//! * `direct_sca`  — iterate convex linearizations of the constraints from a
//!   feasible starting point, each subproblem solved in its dual.
//! * `sdr_opt`     — exploit that the optimum lies in the column span of the
//!   channel matrix (m = H a): solve the K×K lifted problem in a instead.
//! * `sca_opt`     — the same reduction driven by SCA, initialized from
//!   `sdr_opt`.
//!
//! Channels are normalized internally by the root-mean-square column norm,
//! which leaves the problem mathematically unchanged (m and the objective
//! rescale) but keeps the solver data well conditioned at realistic path-loss
//! magnitudes.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};

use crate::channel::ChannelSet;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::linalg::{min_abs_gain, C64};
use crate::nnqp::NnqpOptions;
use crate::randomization::gaussian_randomization;
use crate::sca::build_sca_subproblem;
use crate::sdp::{solve_sdp, SdpConstraint, SdpProblem, SdpSolution, SdpStatus};
use crate::signal::{rescale_to_unit_min_gain, BeamformingSolution, SolveDiagnostics};
use crate::stream::Stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    DirectSdr,
    DirectSca,
    SdrOpt,
    ScaOpt,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] =
        [Algorithm::DirectSdr, Algorithm::DirectSca, Algorithm::SdrOpt, Algorithm::ScaOpt];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::DirectSdr => "direct-sdr",
            Algorithm::DirectSca => "direct-sca",
            Algorithm::SdrOpt => "sdr-opt",
            Algorithm::ScaOpt => "sca-opt",
        }
    }

    /// Algorithms that consume the same SDR randomization stream share an id,
    /// so an SCA variant sees exactly the initialization its SDR counterpart
    /// would produce under the same derived stream.
    pub fn randomization_stream_id(&self) -> u64 {
        match self {
            Algorithm::DirectSdr | Algorithm::DirectSca => 0,
            Algorithm::SdrOpt | Algorithm::ScaOpt => 1,
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "direct-sdr" => Ok(Algorithm::DirectSdr),
            "direct-sca" => Ok(Algorithm::DirectSca),
            "sdr-opt" => Ok(Algorithm::SdrOpt),
            "sca-opt" => Ok(Algorithm::ScaOpt),
            other => Err(Error::InvalidArgument(format!(
                "unknown algorithm '{other}' (expected direct-sdr, direct-sca, sdr-opt, sca-opt)"
            ))),
        }
    }
}

/// Data of the span-reduced problem: f_k = H^H h_k and D = H^H H.
#[derive(Debug, Clone)]
pub struct ReducedProblem {
    /// K×K matrix whose column k is f_k (which equals D e_k).
    pub correlation_vectors: DMatrix<C64>,
    /// Hermitian PSD Gram matrix D.
    pub gram: DMatrix<C64>,
}

/// Builds f_k = H^H h_k and D = H^H H for the channel set.
pub fn reduce(channels: &ChannelSet) -> ReducedProblem {
    let gram = channels.matrix.adjoint() * &channels.matrix;
    ReducedProblem { correlation_vectors: gram.clone(), gram }
}

/// Channels scaled to unit root-mean-square column norm.
struct Normalized {
    columns: DMatrix<C64>,
    /// Original = normalized · scale.
    scale: f64,
}

fn normalize(channels: &ChannelSet) -> Normalized {
    let k = channels.num_devices();
    let mean_sq: f64 =
        (0..k).map(|j| channels.matrix.column(j).norm_squared()).sum::<f64>() / k as f64;
    let scale = mean_sq.sqrt().max(f64::MIN_POSITIVE);
    Normalized { columns: channels.matrix.scale(1.0 / scale), scale }
}

fn rank_ratio(solution: &SdpSolution) -> Option<f64> {
    if solution.matrix.nrows() < 2 {
        return None;
    }
    let (vals, _) = crate::linalg::hermitian_eigen(&solution.matrix);
    (vals[0] > 0.0).then(|| vals[1].max(0.0) / vals[0])
}

fn require_optimal(solution: &SdpSolution, what: &str) -> Result<()> {
    match solution.status {
        SdpStatus::Optimal => Ok(()),
        SdpStatus::MaxIterations => Err(Error::SolverFailure(format!(
            "{what} stopped at the iteration cap with relative gap {:.3e}",
            solution.relative_gap()
        ))),
        SdpStatus::InfeasibleDetected => {
            Err(Error::SolverFailure(format!("{what} looks infeasible")))
        }
    }
}

/// Solves the lifted N×N relaxation and extracts a feasible beamformer.
pub fn direct_sdr(
    channels: &ChannelSet,
    cfg: &SystemConfig,
    rng: &mut Stream,
) -> Result<BeamformingSolution> {
    let started = Instant::now();
    let norm = normalize(channels);
    let n = channels.num_antennas();

    let constraints = (0..channels.num_devices())
        .map(|k| {
            let h = norm.columns.column(k);
            SdpConstraint { matrix: &h * h.adjoint(), bound: 1.0 }
        })
        .collect();
    let problem = SdpProblem::new(DMatrix::identity(n, n), constraints)?;
    let relaxed = solve_sdp(&problem, &cfg.solver.sdp)?;
    require_optimal(&relaxed, "direct SDR relaxation")?;

    let extracted = gaussian_randomization(
        &relaxed,
        &norm.columns,
        |m| m.norm_squared(),
        cfg.solver.randomization_candidates,
        rng,
    )?;
    let beamformer = extracted.scale(1.0 / norm.scale);

    let unscale = 1.0 / (norm.scale * norm.scale);
    let mut diag = SolveDiagnostics::new(Algorithm::DirectSdr.name());
    diag.iterations = relaxed.iterations;
    diag.objective_trace = relaxed.objective_trace.iter().map(|v| v * unscale).collect();
    diag.sdp_gap = Some(relaxed.relative_gap());
    diag.rank_ratio = rank_ratio(&relaxed);
    diag.solve_seconds = started.elapsed().as_secs_f64();
    BeamformingSolution::assemble(beamformer, None, channels, cfg.power_limit, cfg.noise_power, diag)
}

/// One SCA descent in the given working domain. Returns the last iterate,
/// the objective trace (including the initial objective), every iterate, and
/// whether the relative-change test fired before the iteration cap.
fn sca_descent(
    initial: DVector<C64>,
    basis: &DMatrix<C64>,
    hessian: Option<&DMatrix<C64>>,
    objective: impl Fn(&DVector<C64>) -> f64,
    tolerance: f64,
    max_iterations: usize,
) -> Result<(DVector<C64>, Vec<f64>, Vec<DVector<C64>>, bool)> {
    let nnqp_options = NnqpOptions::default();
    let mut current = initial;
    let mut objective_value = objective(&current);
    let mut trace = vec![objective_value];
    let mut iterates = Vec::new();
    let mut converged = false;

    for _ in 0..max_iterations {
        let sub = build_sca_subproblem(&current, basis, hessian)?;
        let duals = sub.solve(&nnqp_options)?;
        let next = sub.reconstruct(&duals.multipliers)?;

        // The previous iterate is feasible for its own linearization, so the
        // subproblem optimum can only keep or reduce the objective, and the
        // linearized constraints under-approximate the true ones.
        let (min_gain, _) = min_abs_gain(basis, &next);
        debug_assert!(min_gain * min_gain >= 1.0 - 1e-9, "SCA iterate infeasible: {min_gain}");
        if min_gain * min_gain < 1.0 - 1e-6 {
            return Err(Error::SolverFailure(format!(
                "SCA iterate lost feasibility: min gain^2 = {}",
                min_gain * min_gain
            )));
        }

        let next_value = objective(&next);
        trace.push(next_value);
        iterates.push(next.clone());
        let change = (objective_value - next_value).abs() / objective_value.max(f64::MIN_POSITIVE);
        current = next;
        objective_value = next_value;
        if change <= tolerance {
            converged = true;
            break;
        }
    }
    Ok((current, trace, iterates, converged))
}

/// SCA on the full-dimension problem from a feasible initial beamformer
/// (typically the direct SDR output). Objective traces are recorded per
/// iteration; hitting the iteration cap is reported in the diagnostics, not
/// as an error.
pub fn direct_sca(
    channels: &ChannelSet,
    initial: &DVector<C64>,
    cfg: &SystemConfig,
) -> Result<BeamformingSolution> {
    Ok(direct_sca_traced(channels, initial, cfg)?.0)
}

/// [`direct_sca`] that also returns every SCA iterate in original units.
pub fn direct_sca_traced(
    channels: &ChannelSet,
    initial: &DVector<C64>,
    cfg: &SystemConfig,
) -> Result<(BeamformingSolution, Vec<DVector<C64>>)> {
    if initial.len() != channels.num_antennas() {
        return Err(Error::DimensionMismatch(format!(
            "initial beamformer has length {}, expected {}",
            initial.len(),
            channels.num_antennas()
        )));
    }
    let (init_gain, _) = min_abs_gain(&channels.matrix, initial);
    if init_gain * init_gain < 1.0 - 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "initial beamformer is infeasible: min gain^2 = {}",
            init_gain * init_gain
        )));
    }

    let started = Instant::now();
    let norm = normalize(channels);
    let scaled_init = initial.scale(norm.scale);

    let (last, trace, iterates, converged) = sca_descent(
        scaled_init,
        &norm.columns,
        None,
        |m| m.norm_squared(),
        cfg.solver.sca_tolerance,
        cfg.solver.sca_max_iterations,
    )?;

    let tight = rescale_to_unit_min_gain(&last, &norm.columns)?;
    let beamformer = tight.scale(1.0 / norm.scale);
    let unscale = 1.0 / (norm.scale * norm.scale);

    let mut diag = SolveDiagnostics::new(Algorithm::DirectSca.name());
    diag.iterations = iterates.len();
    diag.objective_trace = trace.iter().map(|v| v * unscale).collect();
    diag.converged = converged;
    diag.solve_seconds = started.elapsed().as_secs_f64();
    let solution = BeamformingSolution::assemble(
        beamformer,
        None,
        channels,
        cfg.power_limit,
        cfg.noise_power,
        diag,
    )?;
    let original_iterates = iterates.into_iter().map(|m| m.scale(1.0 / norm.scale)).collect();
    Ok((solution, original_iterates))
}

/// Outcome of the reduced-domain SDR stage shared by sdr_opt and sca_opt.
struct ReducedSdr {
    /// Feasibility-tight reduced weights in normalized units.
    weights: DVector<C64>,
    correlation: DMatrix<C64>,
    gram: DMatrix<C64>,
    gap: f64,
    rank_ratio: Option<f64>,
    iterations: usize,
    trace: Vec<f64>,
    warning: Option<String>,
}

fn reduced_sdr_stage(
    norm: &Normalized,
    cfg: &SystemConfig,
    rng: &mut Stream,
) -> Result<ReducedSdr> {
    let k = norm.columns.ncols();
    let n = norm.columns.nrows();
    let gram = norm.columns.adjoint() * &norm.columns;
    let correlation = gram.clone();

    // D is singular when N < K; a relative ridge keeps the SDP objective
    // well posed in that regime.
    let (sdp_objective, warning) = if n < k {
        let ridge = 1e-10 * (gram.trace().re / k as f64).max(f64::MIN_POSITIVE);
        let mut reg = gram.clone();
        for i in 0..k {
            reg[(i, i)] += C64::new(ridge, 0.0);
        }
        (reg, Some(format!("N = {n} < K = {k}: reduced Gram matrix regularized")))
    } else {
        (gram.clone(), None)
    };

    let constraints = (0..k)
        .map(|j| {
            let f = correlation.column(j);
            SdpConstraint { matrix: &f * f.adjoint(), bound: 1.0 }
        })
        .collect();
    let problem = SdpProblem::new(sdp_objective, constraints)?;
    let relaxed = solve_sdp(&problem, &cfg.solver.sdp)?;
    require_optimal(&relaxed, "reduced SDR relaxation")?;

    let gram_ref = &gram;
    let weights = gaussian_randomization(
        &relaxed,
        &correlation,
        |a| (gram_ref * a).dotc(a).re,
        cfg.solver.randomization_candidates,
        rng,
    )?;

    Ok(ReducedSdr {
        weights,
        correlation,
        gram,
        gap: relaxed.relative_gap(),
        rank_ratio: rank_ratio(&relaxed),
        iterations: relaxed.iterations,
        trace: relaxed.objective_trace.clone(),
        warning,
    })
}

fn finish_reduced(
    channels: &ChannelSet,
    norm: &Normalized,
    weights_tight: &DVector<C64>,
    cfg: &SystemConfig,
    diag: SolveDiagnostics,
) -> Result<BeamformingSolution> {
    let m_norm = &norm.columns * weights_tight;
    let beamformer = m_norm.scale(1.0 / norm.scale);
    let weights = weights_tight.scale(1.0 / (norm.scale * norm.scale));
    BeamformingSolution::assemble(
        beamformer,
        Some(weights),
        channels,
        cfg.power_limit,
        cfg.noise_power,
        diag,
    )
}

/// Solves the K×K reduced relaxation and maps the weights back to m = H a.
pub fn sdr_opt(
    channels: &ChannelSet,
    cfg: &SystemConfig,
    rng: &mut Stream,
) -> Result<BeamformingSolution> {
    let started = Instant::now();
    let norm = normalize(channels);
    let stage = reduced_sdr_stage(&norm, cfg, rng)?;

    let unscale = 1.0 / (norm.scale * norm.scale);
    let mut diag = SolveDiagnostics::new(Algorithm::SdrOpt.name());
    diag.iterations = stage.iterations;
    diag.objective_trace = stage.trace.iter().map(|v| v * unscale).collect();
    diag.sdp_gap = Some(stage.gap);
    diag.rank_ratio = stage.rank_ratio;
    diag.warnings.extend(stage.warning.clone());
    diag.solve_seconds = started.elapsed().as_secs_f64();
    finish_reduced(channels, &norm, &stage.weights, cfg, diag)
}

/// SCA on the reduced weights, initialized from the reduced SDR stage.
/// The diagnostics keep the SDR stage time in `init_seconds` and the SCA
/// iteration time in `solve_seconds` so both timing readings stay available.
pub fn sca_opt(
    channels: &ChannelSet,
    cfg: &SystemConfig,
    rng: &mut Stream,
) -> Result<BeamformingSolution> {
    let init_started = Instant::now();
    let norm = normalize(channels);
    let stage = reduced_sdr_stage(&norm, cfg, rng)?;
    let init_seconds = init_started.elapsed().as_secs_f64();

    let started = Instant::now();
    let gram = stage.gram.clone();
    let objective = move |a: &DVector<C64>| (&gram * a).dotc(a).re;
    let (last, trace, iterates, converged) = sca_descent(
        stage.weights.clone(),
        &stage.correlation,
        Some(&stage.gram),
        objective,
        cfg.solver.sca_tolerance,
        cfg.solver.sca_max_iterations,
    )?;
    let tight = rescale_to_unit_min_gain(&last, &stage.correlation)?;

    let unscale = 1.0 / (norm.scale * norm.scale);
    let mut diag = SolveDiagnostics::new(Algorithm::ScaOpt.name());
    diag.iterations = iterates.len();
    diag.objective_trace = trace.iter().map(|v| v * unscale).collect();
    diag.sdp_gap = Some(stage.gap);
    diag.rank_ratio = stage.rank_ratio;
    diag.converged = converged;
    diag.init_seconds = Some(init_seconds);
    diag.warnings.extend(stage.warning.clone());
    diag.solve_seconds = started.elapsed().as_secs_f64();
    finish_reduced(channels, &norm, &tight, cfg, diag)
}

/// Runs one algorithm end to end; SCA variants compute their own SDR
/// initialization and record its time separately.
pub fn run(
    algorithm: Algorithm,
    channels: &ChannelSet,
    cfg: &SystemConfig,
    rng: &mut Stream,
) -> Result<BeamformingSolution> {
    match algorithm {
        Algorithm::DirectSdr => direct_sdr(channels, cfg, rng),
        Algorithm::DirectSca => {
            let init_started = Instant::now();
            let init = direct_sdr(channels, cfg, rng)?;
            let init_seconds = init_started.elapsed().as_secs_f64();
            let mut solution = direct_sca(channels, &init.beamformer, cfg)?;
            solution.diagnostics.init_seconds = Some(init_seconds);
            solution.diagnostics.sdp_gap = init.diagnostics.sdp_gap;
            solution.diagnostics.rank_ratio = init.diagnostics.rank_ratio;
            Ok(solution)
        }
        Algorithm::SdrOpt => sdr_opt(channels, cfg, rng),
        Algorithm::ScaOpt => sca_opt(channels, cfg, rng),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{channels_from_matrix, random_channels};
    use crate::stream::{complex_gaussian_vector, derive_stream};
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn test_cfg(n: usize, k: usize) -> SystemConfig {
        SystemConfig {
            num_antennas: n,
            num_devices: k,
            power_limit: 1.0,
            noise_power: 1e-4,
            ..SystemConfig::default()
        }
    }

    #[test]
    fn reduce_identities() {
        let k = 4;
        let eye = channels_from_matrix(DMatrix::identity(k, k));
        let red = reduce(&eye);
        assert!((red.gram.clone() - DMatrix::<C64>::identity(k, k)).norm() < 1e-14);
        for j in 0..k {
            assert!((red.correlation_vectors.column(j).clone_owned()
                - DVector::from_fn(k, |i, _| if i == j { c(1.0, 0.0) } else { c(0.0, 0.0) }))
            .norm()
                < 1e-14);
        }

        let ch = random_channels(6, 3, 17);
        let red = reduce(&ch);
        let mut rng = derive_stream(18, &[]);
        for _ in 0..8 {
            let a = complex_gaussian_vector(&mut rng, 3);
            let m = &ch.matrix * &a;
            for k in 0..3 {
                let lhs = red.correlation_vectors.column(k).dotc(&a).conj(); // a^H f_k
                let rhs = ch.matrix.column(k).dotc(&m).conj(); // (Ha)^H h_k
                assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
            }
            let quad = (&red.gram * &a).dotc(&a).re;
            assert_relative_eq!(m.norm_squared(), quad, max_relative = 1e-12);
            // f_k equals column k of D
            for k in 0..3 {
                let diff = (red.correlation_vectors.column(k) - red.gram.column(k)).norm();
                assert!(diff <= 1e-12 * red.gram.norm());
            }
        }
    }

    #[test]
    fn direct_sdr_single_device_is_matched_filter() {
        let ch = random_channels(4, 1, 31);
        let cfg = test_cfg(4, 1);
        let mut rng = derive_stream(32, &[]);
        let sol = direct_sdr(&ch, &cfg, &mut rng).unwrap();
        let expected = cfg.noise_power / (cfg.power_limit * ch.matrix.column(0).norm_squared());
        assert_relative_eq!(sol.mse, expected, max_relative = 1e-6);
    }

    #[test]
    fn direct_sdr_orthonormal_channels() {
        let k = 3;
        let ch = channels_from_matrix(DMatrix::identity(k, k));
        let cfg = test_cfg(k, k);
        let mut rng = derive_stream(33, &[]);
        let sol = direct_sdr(&ch, &cfg, &mut rng).unwrap();
        assert_relative_eq!(
            sol.mse,
            k as f64 * cfg.noise_power / cfg.power_limit,
            max_relative = 1e-6
        );
        assert!(sol.diagnostics.sdp_gap.unwrap() <= 1e-7);
    }

    #[test]
    fn direct_sdr_scale_invariance_through_normalization() {
        // identical normalized data means identical solver path; the MSE
        // scales exactly by the inverse squared channel scale
        let ch = random_channels(5, 3, 41);
        let scaled = channels_from_matrix(ch.matrix.scale(3.7e-5));
        let cfg = test_cfg(5, 3);
        let mut rng1 = derive_stream(42, &[]);
        let mut rng2 = derive_stream(42, &[]);
        let a = direct_sdr(&ch, &cfg, &mut rng1).unwrap();
        let b = direct_sdr(&scaled, &cfg, &mut rng2).unwrap();
        let ratio = b.mse / a.mse;
        let expected = 1.0 / (3.7e-5f64 * 3.7e-5);
        assert_relative_eq!(ratio, expected, max_relative = 1e-9);
    }

    #[test]
    fn direct_sca_fixed_point_converges_immediately() {
        let ch = random_channels(4, 1, 51);
        let cfg = test_cfg(4, 1);
        let h = ch.matrix.column(0).clone_owned();
        // matched filter scaled to the constraint surface is the optimum
        let init = h.scale(1.0 / h.norm_squared());
        let (gain, _) = min_abs_gain(&ch.matrix, &init);
        assert!((gain - 1.0).abs() < 1e-12);
        let sol = direct_sca(&ch, &init, &cfg).unwrap();
        assert_eq!(sol.diagnostics.iterations, 1);
        assert!(sol.diagnostics.converged);
        let trace = &sol.diagnostics.objective_trace;
        assert_relative_eq!(trace[0], trace[trace.len() - 1], max_relative = 1e-9);
    }

    #[test]
    fn direct_sca_rejects_infeasible_init() {
        let ch = random_channels(4, 2, 52);
        let cfg = test_cfg(4, 2);
        let init = DVector::from_element(4, c(1e-6, 0.0));
        assert!(matches!(direct_sca(&ch, &init, &cfg), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn direct_sca_descends_from_sdr_init() {
        for seed in 0..6 {
            let ch = random_channels(6, 3, 60 + seed);
            let cfg = test_cfg(6, 3);
            let mut rng = derive_stream(61, &[seed]);
            let init = direct_sdr(&ch, &cfg, &mut rng).unwrap();
            let sol = direct_sca(&ch, &init.beamformer, &cfg).unwrap();
            let trace = &sol.diagnostics.objective_trace;
            for w in trace.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-9), "trace increased: {w:?}");
            }
            assert!(sol.mse <= init.mse * (1.0 + 1e-9));
        }
    }

    #[test]
    fn sdr_opt_matches_reduction_identity() {
        let ch = random_channels(8, 3, 71);
        let cfg = test_cfg(8, 3);
        let mut rng = derive_stream(72, &[]);
        let sol = sdr_opt(&ch, &cfg, &mut rng).unwrap();
        let a = sol.reduced_weights.as_ref().unwrap();
        let red = reduce(&ch);
        for k in 0..3 {
            let via_f = red.correlation_vectors.column(k).dotc(a).norm();
            let via_h = ch.matrix.column(k).dotc(&sol.beamformer).norm();
            assert!((via_f - via_h).abs() <= 1e-12 * (1.0 + via_f));
        }
    }

    #[test]
    fn sdr_opt_orthonormal_channels() {
        let k = 3;
        let ch = channels_from_matrix(DMatrix::identity(k, k));
        let cfg = test_cfg(k, k);
        let mut rng = derive_stream(73, &[]);
        let sol = sdr_opt(&ch, &cfg, &mut rng).unwrap();
        assert_relative_eq!(
            sol.mse,
            k as f64 * cfg.noise_power / cfg.power_limit,
            max_relative = 1e-6
        );
    }

    #[test]
    fn sdr_opt_handles_more_devices_than_antennas() {
        let ch = random_channels(2, 4, 74);
        let cfg = test_cfg(2, 4);
        let mut rng = derive_stream(75, &[]);
        let sol = sdr_opt(&ch, &cfg, &mut rng).unwrap();
        assert!(!sol.diagnostics.warnings.is_empty());
        assert!(sol.mse.is_finite());
    }

    #[test]
    fn sca_opt_orthonormal_and_descent() {
        let k = 3;
        let ch = channels_from_matrix(DMatrix::identity(k, k));
        let cfg = test_cfg(k, k);
        let mut rng = derive_stream(76, &[]);
        let sol = sca_opt(&ch, &cfg, &mut rng).unwrap();
        assert_relative_eq!(
            sol.mse,
            k as f64 * cfg.noise_power / cfg.power_limit,
            max_relative = 1e-6
        );

        for seed in 0..6 {
            let ch = random_channels(8, 4, 80 + seed);
            let cfg = test_cfg(8, 4);
            let mut rng_sdr = derive_stream(81, &[seed]);
            let mut rng_sca = derive_stream(81, &[seed]);
            let sdr = sdr_opt(&ch, &cfg, &mut rng_sdr).unwrap();
            let sca = sca_opt(&ch, &cfg, &mut rng_sca).unwrap();
            // same stream -> same initialization -> SCA can only improve
            assert!(sca.mse <= sdr.mse * (1.0 + 1e-9), "seed {seed}: {} > {}", sca.mse, sdr.mse);
            for w in sca.diagnostics.objective_trace.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-9));
            }
            assert!(sca.diagnostics.init_seconds.is_some());
        }
    }

    #[test]
    fn direct_sca_iterates_stay_in_channel_span() {
        let ch = random_channels(8, 3, 90);
        let cfg = test_cfg(8, 3);
        let mut rng = derive_stream(91, &[]);
        let init = direct_sdr(&ch, &cfg, &mut rng).unwrap();
        let (_, iterates) = direct_sca_traced(&ch, &init.beamformer, &cfg).unwrap();
        assert!(!iterates.is_empty());
        let qr = ch.matrix.clone().qr();
        let q = qr.q();
        for m in &iterates {
            let residual = (m - &q * (q.adjoint() * m)).norm();
            assert!(residual <= 1e-8 * m.norm(), "span residual {residual:e}");
        }
    }
}
