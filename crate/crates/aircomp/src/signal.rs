//! AirComp signal model: closed-form transmit scalars, denoising factor,
//! analytic MSE, and Monte Carlo transmission simulation.
//!
//! The estimate at the AP is ĝ = m^H y / √η for received y = Σ_k h_k w_k s_k + n.
//! For a fixed beamformer m the MSE-optimal transmit scalars invert the
//! effective gains, w_k = √η (m^H h_k)^H / |m^H h_k|², the power constraint
//! pins η = P·min_k |m^H h_k|², and the MSE collapses to
//! ‖m‖²σ² / (P·min_k |m^H h_k|²).

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::channel::ChannelSet;
use crate::error::{Error, Result};
use crate::linalg::{checked_min_gain, effective_gains, min_abs_gain, C64};
use crate::stream::{complex_gaussian_vector, derive_stream, Stream};

/// Relative threshold below which an effective gain counts as zero.
pub const DEGENERATE_GAIN_TOL: f64 = 1e-12;

const SIM_BLOCK: usize = 8192;

/// Per-device transmit scalars plus the denoising factor they assume.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmitDesign {
    /// Complex transmit scalars w_k, √watts.
    pub scalars: DVector<C64>,
    /// Denoising factor η ≥ 0.
    pub denoising: f64,
}

/// One Monte Carlo transmission draw.
#[derive(Debug, Clone)]
pub struct TransmissionSample {
    /// Unit-power symbols s_k.
    pub symbols: DVector<C64>,
    /// Receiver noise vector.
    pub noise: DVector<C64>,
    /// Target g = Σ_k s_k.
    pub target: C64,
    /// Estimate ĝ = m^H y / √η.
    pub estimate: C64,
}

/// Solver bookkeeping attached to every beamforming solution.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveDiagnostics {
    pub solver: &'static str,
    pub iterations: usize,
    /// Objective value per iteration (‖m‖² or a^H D a, original units).
    pub objective_trace: Vec<f64>,
    /// Wall-clock seconds spent in the algorithm's own solver work.
    pub solve_seconds: f64,
    /// Wall-clock seconds spent computing an SDR initialization, when the
    /// algorithm needs one.
    pub init_seconds: Option<f64>,
    /// Relative duality gap of the SDP stage, when there is one.
    pub sdp_gap: Option<f64>,
    /// λ₂/λ₁ of the relaxed SDP solution, when there is one.
    pub rank_ratio: Option<f64>,
    /// False when an iteration cap stopped the solver early.
    pub converged: bool,
    /// Non-fatal conditions worth surfacing (e.g. N < K regularization).
    pub warnings: Vec<String>,
}

impl SolveDiagnostics {
    pub fn new(solver: &'static str) -> Self {
        Self {
            solver,
            iterations: 0,
            objective_trace: Vec::new(),
            solve_seconds: 0.0,
            init_seconds: None,
            sdp_gap: None,
            rank_ratio: None,
            converged: true,
            warnings: Vec::new(),
        }
    }
}

/// A receive beamformer with its matched transmit design and analytic MSE.
#[derive(Debug, Clone)]
pub struct BeamformingSolution {
    /// Receive beamforming vector m (feasible: min_k |m^H h_k|² = 1).
    pub beamformer: DVector<C64>,
    /// Reduced weights a with m = H a, for algorithms that compute them.
    pub reduced_weights: Option<DVector<C64>>,
    pub design: TransmitDesign,
    pub mse: f64,
    pub diagnostics: SolveDiagnostics,
}

impl BeamformingSolution {
    /// Builds a solution from a feasibility-tight beamformer, filling the
    /// transmit design and MSE and checking the structural invariants.
    pub fn assemble(
        beamformer: DVector<C64>,
        reduced_weights: Option<DVector<C64>>,
        channels: &ChannelSet,
        power_limit: f64,
        noise_power: f64,
        diagnostics: SolveDiagnostics,
    ) -> Result<Self> {
        let (min_gain, _) = checked_min_gain(&channels.matrix, &beamformer, DEGENERATE_GAIN_TOL)?;
        if min_gain * min_gain < 1.0 - 1e-6 {
            return Err(Error::SolverFailure(format!(
                "assembled beamformer is infeasible: min gain^2 = {}",
                min_gain * min_gain
            )));
        }
        if let Some(a) = &reduced_weights {
            let residual = (&beamformer - &channels.matrix * a).norm();
            if residual > 1e-8 * beamformer.norm() {
                return Err(Error::SolverFailure(format!(
                    "reduced weights do not reproduce the beamformer: residual {residual:e}"
                )));
            }
        }
        let denoising = denoising_factor(&beamformer, channels, power_limit);
        let scalars = transmit_scalars(&beamformer, channels, denoising)?;
        for (k, w) in scalars.iter().enumerate() {
            if w.norm_sqr() > power_limit * (1.0 + 1e-9) {
                return Err(Error::SolverFailure(format!(
                    "transmit scalar {k} violates the power limit: |w|^2 = {}",
                    w.norm_sqr()
                )));
            }
        }
        let mse = analytic_mse(&beamformer, channels, power_limit, noise_power)?;
        Ok(Self {
            beamformer,
            reduced_weights,
            design: TransmitDesign { scalars, denoising },
            mse,
            diagnostics,
        })
    }
}

/// MSE-optimal transmit scalars for beamformer `m` and denoising factor `eta`:
/// w_k = √eta · (m^H h_k)^H / |m^H h_k|², so m^H h_k w_k = √eta for every k.
pub fn transmit_scalars(m: &DVector<C64>, channels: &ChannelSet, eta: f64) -> Result<DVector<C64>> {
    if eta < 0.0 {
        return Err(Error::InvalidArgument(format!("denoising factor must be >= 0, got {eta}")));
    }
    checked_min_gain(&channels.matrix, m, DEGENERATE_GAIN_TOL)?;
    let gains = effective_gains(&channels.matrix, m);
    let sqrt_eta = eta.sqrt();
    Ok(DVector::from_fn(channels.num_devices(), |k, _| {
        let g = gains[k];
        g.conj() * (sqrt_eta / g.norm_sqr())
    }))
}

/// Denoising factor pinned by the power constraint: η = P · min_k |m^H h_k|².
/// A zero result signals a beamformer that is orthogonal to some channel.
pub fn denoising_factor(m: &DVector<C64>, channels: &ChannelSet, power_limit: f64) -> f64 {
    let (g, _) = min_abs_gain(&channels.matrix, m);
    power_limit * g * g
}

/// Closed-form MSE ‖m‖²σ² / (P · min_k |m^H h_k|²).
pub fn analytic_mse(
    m: &DVector<C64>,
    channels: &ChannelSet,
    power_limit: f64,
    noise_power: f64,
) -> Result<f64> {
    let (min_gain, _) =
        checked_min_gain(&channels.matrix, m, DEGENERATE_GAIN_TOL).map_err(|_| Error::InfiniteMse)?;
    Ok(m.norm_squared() * noise_power / (power_limit * min_gain * min_gain))
}

/// MSE of an arbitrary transmit design:
/// Σ_k |m^H h_k w_k/√η − 1|² + σ²‖m‖²/η.
pub fn general_mse(
    m: &DVector<C64>,
    scalars: &DVector<C64>,
    eta: f64,
    channels: &ChannelSet,
    noise_power: f64,
) -> Result<f64> {
    if !(eta > 0.0) {
        return Err(Error::InvalidArgument(format!("denoising factor must be > 0, got {eta}")));
    }
    if scalars.len() != channels.num_devices() {
        return Err(Error::DimensionMismatch(format!(
            "{} transmit scalars for {} devices",
            scalars.len(),
            channels.num_devices()
        )));
    }
    let gains = effective_gains(&channels.matrix, m);
    let sqrt_eta = eta.sqrt();
    let misalignment: f64 = gains
        .iter()
        .zip(scalars.iter())
        .map(|(g, w)| (g * w / C64::new(sqrt_eta, 0.0) - C64::new(1.0, 0.0)).norm_sqr())
        .sum();
    Ok(misalignment + noise_power * m.norm_squared() / eta)
}

/// Scales `m` so that min_k |m^H h_k|² = 1 exactly. The analytic MSE is
/// invariant under this rescaling.
pub fn feasibility_rescale(m: &DVector<C64>, channels: &ChannelSet) -> Result<DVector<C64>> {
    rescale_to_unit_min_gain(m, &channels.matrix)
}

/// Column-set variant of [`feasibility_rescale`] shared with the
/// randomization stage, where the constraint vectors are not a channel set.
pub fn rescale_to_unit_min_gain(m: &DVector<C64>, columns: &DMatrix<C64>) -> Result<DVector<C64>> {
    let (min_gain, _) = checked_min_gain(columns, m, DEGENERATE_GAIN_TOL)?;
    Ok(m.scale(1.0 / min_gain))
}

/// Draws one transmission through the channel: symbols s ~ CN(0, I), noise
/// n ~ CN(0, σ²I), received y = Σ h_k w_k s_k + n, estimate m^H y/√η.
pub fn transmission_sample(
    m: &DVector<C64>,
    design: &TransmitDesign,
    channels: &ChannelSet,
    noise_power: f64,
    rng: &mut impl Rng,
) -> TransmissionSample {
    let k = channels.num_devices();
    let n = channels.num_antennas();
    let symbols = complex_gaussian_vector(rng, k);
    let noise = complex_gaussian_vector(rng, n).scale(noise_power.sqrt());
    let faded = DVector::from_fn(k, |i, _| design.scalars[i] * symbols[i]);
    let received = &channels.matrix * faded + &noise;
    let estimate = m.dotc(&received) / C64::new(design.denoising.sqrt(), 0.0);
    let target = symbols.iter().sum::<C64>();
    TransmissionSample { symbols, noise, target, estimate }
}

/// Empirical MSE of a solution over `num_samples` Monte Carlo transmissions.
///
/// Samples are drawn in fixed-size blocks, each from a stream derived from
/// (root, block index), and block sums are reduced in block order, so the
/// result is bit-identical whether blocks run sequentially or in parallel.
pub fn simulate_transmission(
    solution: &BeamformingSolution,
    channels: &ChannelSet,
    noise_power: f64,
    num_samples: usize,
    rng: &mut Stream,
) -> Result<f64> {
    simulate_transmission_with(
        solution,
        channels,
        noise_power,
        num_samples,
        rng,
        cfg!(feature = "parallel"),
    )
}

/// [`simulate_transmission`] with an explicit sequential/parallel switch;
/// exposed so benches can compare the two paths in one build.
pub fn simulate_transmission_with(
    solution: &BeamformingSolution,
    channels: &ChannelSet,
    noise_power: f64,
    num_samples: usize,
    rng: &mut Stream,
    parallel: bool,
) -> Result<f64> {
    if num_samples == 0 {
        return Err(Error::InvalidArgument("num_samples must be >= 1".into()));
    }
    if !(noise_power >= 0.0) {
        return Err(Error::InvalidArgument(format!("noise power must be >= 0, got {noise_power}")));
    }
    if !(solution.design.denoising > 0.0) {
        return Err(Error::InvalidArgument(
            "solution has zero denoising factor; nothing to invert".into(),
        ));
    }
    let root: u64 = rng.random();
    let num_blocks = num_samples.div_ceil(SIM_BLOCK);
    let block_sum = |b: usize| -> f64 {
        let mut block_rng = derive_stream(root, &[b as u64]);
        let len = SIM_BLOCK.min(num_samples - b * SIM_BLOCK);
        let mut acc = 0.0;
        for _ in 0..len {
            let s = transmission_sample(
                &solution.beamformer,
                &solution.design,
                channels,
                noise_power,
                &mut block_rng,
            );
            acc += (s.estimate - s.target).norm_sqr();
        }
        acc
    };

    let partials: Vec<f64> = if parallel {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            (0..num_blocks).into_par_iter().map(block_sum).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            (0..num_blocks).map(block_sum).collect()
        }
    } else {
        (0..num_blocks).map(block_sum).collect()
    };
    Ok(partials.iter().sum::<f64>() / num_samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::ChannelSet;
    use crate::stream::derive_stream;
    use crate::testutil::{channels_from_matrix, random_channels};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn identity_channels(k: usize) -> ChannelSet {
        channels_from_matrix(DMatrix::identity(k, k))
    }

    #[test]
    fn orthonormal_channels_give_unit_scalars() {
        let ch = identity_channels(2);
        let m = DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        let w = transmit_scalars(&m, &ch, 1.0).unwrap();
        assert_relative_eq!(w[0].re, 1.0, epsilon = 1e-14);
        assert_relative_eq!(w[1].re, 1.0, epsilon = 1e-14);
        assert!(w[0].im.abs() < 1e-15 && w[1].im.abs() < 1e-15);
    }

    #[test]
    fn scalars_align_all_effective_gains() {
        let ch = random_channels(5, 3, 7);
        let mut rng = derive_stream(8, &[]);
        let m = crate::stream::complex_gaussian_vector(&mut rng, 5);
        let eta = 0.37;
        let w = transmit_scalars(&m, &ch, eta).unwrap();
        let gains = effective_gains(&ch.matrix, &m);
        for k in 0..3 {
            let aligned = gains[k] * w[k];
            assert_relative_eq!(aligned.re, eta.sqrt(), max_relative = 1e-12);
            assert!(aligned.im.abs() < 1e-12 * eta.sqrt());
        }
    }

    #[test]
    fn scalars_match_per_device_grid_search() {
        // Independent oracle: the MSE is separable across devices, so grid
        // each w_k over magnitude x phase under |w|^2 <= P and compare.
        let ch = random_channels(4, 3, 21);
        let mut rng = derive_stream(22, &[]);
        let m = crate::stream::complex_gaussian_vector(&mut rng, 4);
        let p = 1.0;
        let eta = denoising_factor(&m, &ch, p);
        let w_closed = transmit_scalars(&m, &ch, eta).unwrap();
        let gains = effective_gains(&ch.matrix, &m);
        let sqrt_eta = eta.sqrt();

        let mags = 400;
        let phases = 720;
        let mut w_grid = DVector::from_element(3, c(0.0, 0.0));
        for k in 0..3 {
            let mut best = (f64::INFINITY, c(0.0, 0.0));
            for im in 0..=mags {
                let mag = p.sqrt() * im as f64 / mags as f64;
                for ip in 0..phases {
                    let ph = 2.0 * std::f64::consts::PI * ip as f64 / phases as f64;
                    let w = C64::from_polar(mag, ph);
                    let resid = (gains[k] * w / c(sqrt_eta, 0.0) - c(1.0, 0.0)).norm_sqr();
                    if resid < best.0 {
                        best = (resid, w);
                    }
                }
            }
            w_grid[k] = best.1;
        }

        let mse_closed = general_mse(&m, &w_closed, eta, &ch, 1e-3).unwrap();
        let mse_grid = general_mse(&m, &w_grid, eta, &ch, 1e-3).unwrap();
        // Closed form can only beat the grid, and the grid argmin must sit in
        // the same cell as the closed-form scalars.
        assert!(mse_closed <= mse_grid + 1e-12);
        for k in 0..3 {
            let cell = p.sqrt() * (1.0 / mags as f64 + 2.0 * std::f64::consts::PI / phases as f64);
            assert!(
                (w_grid[k] - w_closed[k]).norm() <= 2.0 * cell,
                "device {k}: grid {} vs closed {}",
                w_grid[k],
                w_closed[k]
            );
        }
    }

    #[test]
    fn degenerate_gain_is_reported() {
        let ch = identity_channels(2);
        let m = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            transmit_scalars(&m, &ch, 1.0),
            Err(Error::DegenerateChannel { device: 1 })
        ));
    }

    #[test]
    fn denoising_factor_trivia() {
        let ch = identity_channels(2);
        let m = DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        assert_relative_eq!(denoising_factor(&m, &ch, 1.0), 1.0, epsilon = 1e-14);
        // orthogonal direction gives zero
        let m0 = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(denoising_factor(&m0, &ch, 1.0), 0.0);
        // quadratic homogeneity
        let ch2 = random_channels(4, 3, 5);
        let mut rng = derive_stream(6, &[]);
        let m2 = crate::stream::complex_gaussian_vector(&mut rng, 4);
        let eta1 = denoising_factor(&m2, &ch2, 2.0);
        let eta4 = denoising_factor(&(m2.scale(2.0)), &ch2, 2.0);
        assert_relative_eq!(eta4, 4.0 * eta1, max_relative = 1e-12);
    }

    #[test]
    fn analytic_mse_closed_forms() {
        let k = 5;
        let ch = identity_channels(k);
        let ones = DVector::from_element(k, c(1.0, 0.0));
        let (p, s2) = (1.0, 1e-4);
        assert_relative_eq!(
            analytic_mse(&ones, &ch, p, s2).unwrap(),
            k as f64 * s2 / p,
            max_relative = 1e-12
        );

        // single device matched filter
        let ch1 = random_channels(6, 1, 9);
        let h = ch1.matrix.column(0).clone_owned();
        let m = h.scale(1.0 / h.norm_squared());
        assert_relative_eq!(
            analytic_mse(&m, &ch1, p, s2).unwrap(),
            s2 / (p * h.norm_squared()),
            max_relative = 1e-12
        );

        let m0 = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(analytic_mse(&m0, &ch, p, s2), Err(Error::InfiniteMse)));
    }

    proptest! {
        #[test]
        fn analytic_mse_is_scale_invariant(seed in 0u64..500, re in -3.0f64..3.0, im in -3.0f64..3.0) {
            prop_assume!(re.abs() + im.abs() > 1e-3);
            let ch = random_channels(4, 3, seed);
            let mut rng = derive_stream(seed, &[1]);
            let m = crate::stream::complex_gaussian_vector(&mut rng, 4);
            let scale = c(re, im);
            let a = analytic_mse(&m, &ch, 1.0, 1e-2).unwrap();
            let b = analytic_mse(&(&m * scale), &ch, 1.0, 1e-2).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * a);
        }

        #[test]
        fn closed_form_design_reduces_general_mse_to_analytic(seed in 0u64..500) {
            let ch = random_channels(5, 4, seed);
            let mut rng = derive_stream(seed, &[2]);
            let m = crate::stream::complex_gaussian_vector(&mut rng, 5);
            let p = 1.0;
            let eta = denoising_factor(&m, &ch, p);
            prop_assume!(eta > 1e-12);
            let w = transmit_scalars(&m, &ch, eta).unwrap();
            let general = general_mse(&m, &w, eta, &ch, 1e-3).unwrap();
            let analytic = analytic_mse(&m, &ch, p, 1e-3).unwrap();
            prop_assert!((general - analytic).abs() <= 1e-9 * analytic.max(1e-300));
        }
    }

    #[test]
    fn power_constraint_is_tight_at_min_gain_device() {
        let ch = random_channels(6, 4, 33);
        let mut rng = derive_stream(34, &[]);
        let m = crate::stream::complex_gaussian_vector(&mut rng, 6);
        let p = 2.5;
        let eta = denoising_factor(&m, &ch, p);
        let w = transmit_scalars(&m, &ch, eta).unwrap();
        let (min_gain, argmin) = min_abs_gain(&ch.matrix, &m);
        for (k, wk) in w.iter().enumerate() {
            assert!(wk.norm_sqr() <= p * (1.0 + 1e-9), "|w_{k}|^2 = {}", wk.norm_sqr());
        }
        assert_relative_eq!(w[argmin].norm_sqr(), p, max_relative = 1e-9);
        let _ = min_gain;
    }

    #[test]
    fn zero_scalars_leave_all_ones_residual() {
        let ch = random_channels(4, 3, 44);
        let mut rng = derive_stream(45, &[]);
        let m = crate::stream::complex_gaussian_vector(&mut rng, 4);
        let w = DVector::from_element(3, c(0.0, 0.0));
        let (eta, s2) = (0.7, 1e-3);
        let got = general_mse(&m, &w, eta, &ch, s2).unwrap();
        assert_relative_eq!(got, 3.0 + s2 * m.norm_squared() / eta, max_relative = 1e-12);
        assert!(general_mse(&m, &w, 0.0, &ch, s2).is_err());
    }

    #[test]
    fn perturbing_closed_form_scalars_never_helps() {
        let ch = random_channels(5, 3, 55);
        let mut rng = derive_stream(56, &[]);
        let m = crate::stream::complex_gaussian_vector(&mut rng, 5);
        let p = 1.0;
        let eta = denoising_factor(&m, &ch, p);
        let w = transmit_scalars(&m, &ch, eta).unwrap();
        let base = general_mse(&m, &w, eta, &ch, 1e-3).unwrap();
        for trial in 0..64 {
            let mut pert = w.clone();
            let dir = crate::stream::complex_gaussian_vector(&mut rng, 3);
            let step = 10f64.powf(-(trial % 8) as f64);
            for k in 0..3 {
                pert[k] += dir[k] * c(step, 0.0);
                // stay inside the power constraint to keep the probe fair
                let mag = pert[k].norm();
                if mag * mag > p {
                    pert[k] *= c(p.sqrt() / mag, 0.0);
                }
            }
            let probed = general_mse(&m, &pert, eta, &ch, 1e-3).unwrap();
            assert!(probed >= base - 1e-12, "probe {trial} beat the closed form");
        }
    }

    #[test]
    fn rescale_is_idempotent_and_inverse_scales() {
        let ch = random_channels(4, 3, 66);
        let mut rng = derive_stream(67, &[]);
        let m = crate::stream::complex_gaussian_vector(&mut rng, 4);
        let tight = feasibility_rescale(&m, &ch).unwrap();
        let (g, _) = min_abs_gain(&ch.matrix, &tight);
        assert!((g * g - 1.0).abs() <= 1e-12);
        let again = feasibility_rescale(&tight, &ch).unwrap();
        assert!((again - &tight).norm() < 1e-12 * tight.norm());
        let halved = feasibility_rescale(&tight.scale(2.0), &ch).unwrap();
        assert!((halved - &tight).norm() < 1e-12 * tight.norm());
        // analytic MSE is untouched by rescaling
        let before = analytic_mse(&m, &ch, 1.0, 1e-3).unwrap();
        let after = analytic_mse(&tight, &ch, 1.0, 1e-3).unwrap();
        assert_relative_eq!(before, after, max_relative = 1e-12);
    }

    fn assembled_solution(ch: &ChannelSet, p: f64, s2: f64) -> BeamformingSolution {
        let mut rng = derive_stream(77, &[]);
        let m = crate::stream::complex_gaussian_vector(&mut rng, ch.num_antennas());
        let tight = feasibility_rescale(&m, ch).unwrap();
        BeamformingSolution::assemble(tight, None, ch, p, s2, SolveDiagnostics::new("test"))
            .unwrap()
    }

    #[test]
    fn noiseless_single_device_estimates_exactly() {
        let ch = random_channels(4, 1, 88);
        let sol = assembled_solution(&ch, 1.0, 0.0);
        let mut rng = derive_stream(89, &[]);
        let mse = simulate_transmission(&sol, &ch, 0.0, 512, &mut rng).unwrap();
        assert!(mse < 1e-24, "noiseless aligned MSE {mse}");
    }

    #[test]
    fn empirical_mse_tracks_analytic() {
        let ch = random_channels(8, 4, 99);
        let (p, s2) = (1.0, 1e-2);
        let sol = assembled_solution(&ch, p, s2);
        let mut rng = derive_stream(100, &[]);
        let emp = simulate_transmission(&sol, &ch, s2, 100_000, &mut rng).unwrap();
        let gap = (emp - sol.mse).abs() / sol.mse;
        assert!(gap < 0.02, "relative gap {gap}");
    }

    #[test]
    fn doubling_noise_doubles_empirical_mse() {
        let ch = random_channels(6, 3, 111);
        let (p, s2) = (1.0, 1e-2);
        let sol = assembled_solution(&ch, p, s2);
        let mut rng1 = derive_stream(112, &[]);
        let mut rng2 = derive_stream(113, &[]);
        let m1 = simulate_transmission(&sol, &ch, s2, 100_000, &mut rng1).unwrap();
        let m2 = simulate_transmission(&sol, &ch, 2.0 * s2, 100_000, &mut rng2).unwrap();
        let ratio = m2 / m1;
        assert!((ratio - 2.0).abs() < 0.05, "ratio {ratio}");
    }

    #[test]
    fn doubling_samples_shrinks_gap_scatter_by_sqrt2() {
        let ch = random_channels(5, 3, 131);
        let sol = assembled_solution(&ch, 1.0, 1e-2);
        let scatter = |samples: usize, tag: u64| -> f64 {
            let reps = 24;
            let gaps: Vec<f64> = (0..reps)
                .map(|i| {
                    let mut rng = derive_stream(132 + tag, &[i]);
                    let emp = simulate_transmission(&sol, &ch, 1e-2, samples, &mut rng).unwrap();
                    (emp - sol.mse) / sol.mse
                })
                .collect();
            let mean = gaps.iter().sum::<f64>() / reps as f64;
            (gaps.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / (reps - 1) as f64).sqrt()
        };
        let ratio = scatter(4000, 0) / scatter(8000, 1);
        assert!(
            ratio > 1.05 && ratio < 1.95,
            "scatter ratio {ratio} far from sqrt(2) = {}",
            std::f64::consts::SQRT_2
        );
    }

    #[test]
    fn sequential_and_parallel_simulation_agree_bitwise() {
        let ch = random_channels(5, 3, 121);
        let sol = assembled_solution(&ch, 1.0, 1e-2);
        let mut r1 = derive_stream(122, &[]);
        let mut r2 = derive_stream(122, &[]);
        let seq = simulate_transmission_with(&sol, &ch, 1e-2, 20_000, &mut r1, false).unwrap();
        let par = simulate_transmission_with(&sol, &ch, 1e-2, 20_000, &mut r2, true).unwrap();
        assert_eq!(seq.to_bits(), par.to_bits());
    }
}
