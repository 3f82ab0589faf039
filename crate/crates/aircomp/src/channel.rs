//! Device geometry and channel matrix generation.
//!
//! Devices are dropped area-uniformly in a horizontal disk; each link combines
//! distance-dependent path loss with Rician small-scale fading. The LOS
//! component is the uniform-linear-array steering vector for the device's
//! azimuth: the array lies along the global x-axis and azimuth is measured in
//! the horizontal plane from broadside (the y direction), so a device at
//! relative offset (dx, dy) has azimuth atan2(dx, dy).

use nalgebra::{DMatrix, DVector, Vector3};
use rand::Rng;

use crate::config::{FadingConfig, GeometryConfig};
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::stream::{complex_gaussian_vector, Stream};

/// Channel matrix plus the per-device geometry it was generated from.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet {
    /// N×K complex matrix; column k is the channel vector of device k.
    pub matrix: DMatrix<C64>,
    /// Device positions, meters.
    pub positions: Vec<Vector3<f64>>,
    /// Device-to-AP distances, meters.
    pub distances: Vec<f64>,
    /// Per-device large-scale linear power gains.
    pub large_scale: Vec<f64>,
    /// AP position the distances were computed against.
    pub ap_position: Vector3<f64>,
}

impl ChannelSet {
    pub fn num_antennas(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn num_devices(&self) -> usize {
        self.matrix.ncols()
    }

    /// Checks the structural invariants: consistent lengths, nonzero columns
    /// with finite norms, and distances matching positions to 1e-9 relative.
    pub fn validate(&self) -> Result<()> {
        let k = self.num_devices();
        if self.positions.len() != k || self.distances.len() != k || self.large_scale.len() != k {
            return Err(Error::DimensionMismatch(format!(
                "channel set holds {k} devices but {} positions, {} distances, {} gains",
                self.positions.len(),
                self.distances.len(),
                self.large_scale.len()
            )));
        }
        for j in 0..k {
            let norm_sq = self.matrix.column(j).norm_squared();
            if !norm_sq.is_finite() || norm_sq <= 0.0 {
                return Err(Error::InvalidArgument(format!(
                    "channel column {j} has invalid squared norm {norm_sq}"
                )));
            }
            let d = (self.positions[j] - self.ap_position).norm();
            if (d - self.distances[j]).abs() > 1e-9 * d.max(1.0) {
                return Err(Error::InvalidArgument(format!(
                    "stored distance {} of device {j} disagrees with its position (expected {d})",
                    self.distances[j]
                )));
            }
        }
        Ok(())
    }

    /// Order-sensitive FNV-1a digest of the matrix bit patterns; used to
    /// verify that algorithms at one sweep point consumed the same channel.
    pub fn digest(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        let mut eat = |bits: u64| {
            for b in bits.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        eat(self.matrix.nrows() as u64);
        eat(self.matrix.ncols() as u64);
        for v in self.matrix.iter() {
            eat(v.re.to_bits());
            eat(v.im.to_bits());
        }
        h
    }
}

/// Samples `count` positions area-uniformly in the closed disk of radius
/// `region_radius` about `region_center`, in the z = center.z plane.
///
/// The radius is drawn by inverse CDF (R·√u) so the number of draws per
/// position is fixed, keeping streams aligned across configurations.
pub fn sample_positions(
    geometry: &GeometryConfig,
    count: usize,
    rng: &mut Stream,
) -> Result<Vec<Vector3<f64>>> {
    if count == 0 {
        return Err(Error::InvalidArgument("device count must be >= 1".into()));
    }
    geometry.validate()?;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let u: f64 = rng.random();
        let v: f64 = rng.random();
        let r = geometry.region_radius * u.sqrt();
        let theta = 2.0 * std::f64::consts::PI * v;
        out.push(
            geometry.region_center + Vector3::new(r * theta.cos(), r * theta.sin(), 0.0),
        );
    }
    Ok(out)
}

/// Distance-dependent large-scale gain t0 · (d/d0)^(−alpha).
pub fn path_loss(distance: f64, fading: &FadingConfig) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "path loss needs distance > 0, got {distance}"
        )));
    }
    Ok(fading.ref_gain * (distance / fading.ref_distance).powf(-fading.exponent))
}

/// Steering vector of an N-element uniform linear array: element n carries
/// phase 2π·spacing·n·sin(azimuth). All entries are unit modulus.
pub fn ula_response(num_antennas: usize, azimuth: f64, spacing: f64) -> Result<DVector<C64>> {
    if num_antennas == 0 {
        return Err(Error::InvalidArgument("array must have >= 1 antennas".into()));
    }
    let phase_step = 2.0 * std::f64::consts::PI * spacing * azimuth.sin();
    Ok(DVector::from_fn(num_antennas, |n, _| C64::from_polar(1.0, phase_step * n as f64)))
}

/// Azimuth of `position` seen from `ap`: array along x, measured from
/// broadside (y) in the horizontal plane.
fn azimuth_from_broadside(ap: &Vector3<f64>, position: &Vector3<f64>) -> f64 {
    let dx = position.x - ap.x;
    let dy = position.y - ap.y;
    dx.atan2(dy)
}

/// Draws a full channel realization: geometry, distances, large-scale gains,
/// and the N×K Rician-faded channel matrix.
///
/// Column k is √L_k · ( √(β/(1+β))·h_LOS + √(1/(1+β))·h_NLOS ) with h_LOS the
/// ULA steering vector at the device azimuth and h_NLOS i.i.d. CN(0, 1).
pub fn sample_channel(
    geometry: &GeometryConfig,
    fading: &FadingConfig,
    num_antennas: usize,
    num_devices: usize,
    rng: &mut Stream,
) -> Result<ChannelSet> {
    if num_antennas == 0 {
        return Err(Error::InvalidArgument("num_antennas must be >= 1".into()));
    }
    fading.validate()?;
    let positions = sample_positions(geometry, num_devices, rng)?;

    let beta = fading.rician_factor;
    // beta = inf means a pure LOS channel; the NLOS weight goes to zero.
    let (los_w, nlos_w) = if beta.is_infinite() {
        (1.0, 0.0)
    } else {
        ((beta / (1.0 + beta)).sqrt(), (1.0 / (1.0 + beta)).sqrt())
    };

    let mut distances = Vec::with_capacity(num_devices);
    let mut large_scale = Vec::with_capacity(num_devices);
    let mut matrix = DMatrix::<C64>::zeros(num_antennas, num_devices);
    for k in 0..num_devices {
        let d = (positions[k] - geometry.ap_position).norm();
        let gain = path_loss(d, fading)?;
        distances.push(d);
        large_scale.push(gain);

        let los = ula_response(num_antennas, azimuth_from_broadside(&geometry.ap_position, &positions[k]), geometry.antenna_spacing)?;
        let nlos = complex_gaussian_vector(rng, num_antennas);
        let column = (los * C64::new(los_w, 0.0) + nlos * C64::new(nlos_w, 0.0)).scale(gain.sqrt());
        matrix.set_column(k, &column);
    }

    let set = ChannelSet { matrix, positions, distances, large_scale, ap_position: geometry.ap_position };
    set.validate()?;
    Ok(set)
}
