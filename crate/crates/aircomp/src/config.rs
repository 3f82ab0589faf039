//! System configuration: physical parameters, solver options, validation.
//!
//! All dB-valued quantities are converted to linear units exactly once, when
//! a config is built; every internal computation works in linear units.

use nalgebra::Vector3;

use crate::error::{Error, Result};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

/// Placement of the AP array and the device disk.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig {
    /// AP (array reference element) position, meters.
    pub ap_position: Vector3<f64>,
    /// Center of the circular device region, meters.
    pub region_center: Vector3<f64>,
    /// Radius of the device region, meters.
    pub region_radius: f64,
    /// Antenna spacing in carrier wavelengths (normalized, carrier-independent).
    pub antenna_spacing: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            ap_position: Vector3::new(0.0, 0.0, 20.0),
            region_center: Vector3::new(120.0, 20.0, 0.0),
            region_radius: 20.0,
            antenna_spacing: 0.5,
        }
    }
}

impl GeometryConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.region_radius > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "region_radius_m must be > 0, got {}",
                self.region_radius
            )));
        }
        if !(self.antenna_spacing > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "antenna_spacing_wavelengths must be > 0, got {}",
                self.antenna_spacing
            )));
        }
        Ok(())
    }
}

/// Large-scale path loss plus Rician small-scale fading parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingConfig {
    /// Linear power gain at the reference distance (default −30 dB = 1e−3).
    pub ref_gain: f64,
    /// Reference distance d0, meters.
    pub ref_distance: f64,
    /// Path-loss exponent.
    pub exponent: f64,
    /// Rician factor, LOS-to-scatter power ratio. This is a *linear* ratio,
    /// not dB; `rician_factor = 3.0` means the LOS component carries 3x the
    /// scattered power. May be `f64::INFINITY` for a pure-LOS channel.
    pub rician_factor: f64,
}

impl Default for FadingConfig {
    fn default() -> Self {
        Self { ref_gain: db_to_linear(-30.0), ref_distance: 1.0, exponent: 3.0, rician_factor: 3.0 }
    }
}

impl FadingConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.ref_gain > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "reference path gain must be > 0 in linear units, got {}",
                self.ref_gain
            )));
        }
        if !(self.ref_distance > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "path_loss_ref_distance_m must be > 0, got {}",
                self.ref_distance
            )));
        }
        if !(self.exponent > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "path_loss_exponent must be > 0, got {}",
                self.exponent
            )));
        }
        if self.rician_factor < 0.0 || self.rician_factor.is_nan() {
            return Err(Error::InvalidArgument(format!(
                "rician_factor must be >= 0, got {}",
                self.rician_factor
            )));
        }
        Ok(())
    }
}

/// Options for the dense interior-point SDP solver.
#[derive(Debug, Clone, PartialEq)]
pub struct SdpOptions {
    /// Relative tolerance on duality gap and primal/dual residuals.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self { tolerance: 1e-8, max_iterations: 100 }
    }
}

/// Per-algorithm solver options.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// SCA stop threshold on relative objective change.
    pub sca_tolerance: f64,
    pub sca_max_iterations: usize,
    pub sdp: SdpOptions,
    /// Gaussian-randomization budget (the dominant eigenvector is always
    /// added on top of this many random candidates).
    pub randomization_candidates: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            sca_tolerance: 1e-5,
            sca_max_iterations: 100,
            sdp: SdpOptions::default(),
            randomization_candidates: 100,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.sca_tolerance > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "sca_tolerance must be > 0, got {}",
                self.sca_tolerance
            )));
        }
        if self.sca_max_iterations == 0 {
            return Err(Error::InvalidArgument("sca_max_iterations must be >= 1".into()));
        }
        if !(self.sdp.tolerance > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "sdp_tolerance must be > 0, got {}",
                self.sdp.tolerance
            )));
        }
        if self.sdp.max_iterations == 0 {
            return Err(Error::InvalidArgument("sdp_max_iterations must be >= 1".into()));
        }
        if self.randomization_candidates == 0 {
            return Err(Error::InvalidArgument("randomization_candidates must be >= 1".into()));
        }
        Ok(())
    }
}

/// Full physical + solver parameter set for one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub num_antennas: usize,
    pub num_devices: usize,
    /// Per-device transmit power limit P, watts.
    pub power_limit: f64,
    /// Receiver noise power sigma^2, watts.
    pub noise_power: f64,
    /// Channel realizations to average over in sweeps.
    pub realizations: usize,
    pub geometry: GeometryConfig,
    pub fading: FadingConfig,
    pub solver: SolverOptions,
}

impl Default for SystemConfig {
    fn default() -> Self {
        // P = 30 dBm, sigma^2 = -100 dBm.
        Self {
            num_antennas: 16,
            num_devices: 10,
            power_limit: dbm_to_watts(30.0),
            noise_power: dbm_to_watts(-100.0),
            realizations: 128,
            geometry: GeometryConfig::default(),
            fading: FadingConfig::default(),
            solver: SolverOptions::default(),
        }
    }
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_antennas == 0 {
            return Err(Error::InvalidArgument("num_antennas must be >= 1".into()));
        }
        if self.num_devices == 0 {
            return Err(Error::InvalidArgument("num_devices must be >= 1".into()));
        }
        if !(self.power_limit > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "power limit must be > 0 W, got {}",
                self.power_limit
            )));
        }
        if !(self.noise_power > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "noise power must be > 0 W, got {}",
                self.noise_power
            )));
        }
        if self.realizations == 0 {
            return Err(Error::InvalidArgument("realizations must be >= 1".into()));
        }
        self.geometry.validate()?;
        self.fading.validate()?;
        self.solver.validate()
    }
}
