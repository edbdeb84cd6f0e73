//! Physical constants, device parameters and the maps between pump geometry
//! and phase-space coordinates.
//!
//! Signs: a positive tilt `δθ` (away from the degeneracy angle) produces a
//! positive detuning `ω₋⁽⁰⁾`, and a positive spot position `z₀` produces a
//! positive delay `τ₀`. Swapping the effective indices flips the sign of the
//! degeneracy angle and therefore of `k_deg`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s (exact).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Default average group velocity of signal and idler at degeneracy, m/s.
pub const DEFAULT_GROUP_VELOCITY: f64 = 9.26e7;

/// Largest tilt accepted by the small-angle detuning map, rad.
pub const SMALL_ANGLE_CUTOFF: f64 = 0.05;

/// Waveguide and phase-matching constants.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceParams {
    pub length: f64,
    pub group_velocity: f64,
    /// Central pump angular frequency ω_p⁽⁰⁾.
    pub pump_center_omega: f64,
    /// Incidence angle at which signal and idler are degenerate.
    pub theta_deg: f64,
    pub indices: Option<(f64, f64)>,
}

impl DeviceParams {
    pub fn new(length: f64, group_velocity: f64, pump_wavelength: f64, theta_deg: f64) -> Result<Self> {
        let device = DeviceParams {
            length,
            group_velocity,
            pump_center_omega: wavelength_to_omega(pump_wavelength),
            theta_deg,
            indices: None,
        };
        device.validate()?;
        Ok(device)
    }

    /// Build the device from the signal/idler effective indices; the degeneracy
    /// angle follows from `sin θ_deg = (n_s − n_i)/2`.
    pub fn from_indices(
        length: f64,
        group_velocity: f64,
        pump_wavelength: f64,
        index_signal: f64,
        index_idler: f64,
    ) -> Result<Self> {
        let half_mismatch = (index_signal - index_idler) / 2.0;
        if !half_mismatch.is_finite() || half_mismatch.abs() > 1.0 {
            return Err(Error::InvalidParameter {
                name: "index_signal",
                reason: format!("|n_s - n_i|/2 = {} must not exceed 1", half_mismatch.abs()),
            });
        }
        let device = DeviceParams {
            length,
            group_velocity,
            pump_center_omega: wavelength_to_omega(pump_wavelength),
            theta_deg: half_mismatch.asin(),
            indices: Some((index_signal, index_idler)),
        };
        device.validate()?;
        Ok(device)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "length",
                reason: format!("must be positive, got {}", self.length),
            });
        }
        if !(self.group_velocity > 0.0 && self.group_velocity < SPEED_OF_LIGHT) {
            return Err(Error::InvalidParameter {
                name: "group_velocity",
                reason: format!("must lie in (0, c), got {}", self.group_velocity),
            });
        }
        if !(self.pump_center_omega > 0.0 && self.pump_center_omega.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "pump_center_omega",
                reason: format!("must be positive, got {}", self.pump_center_omega),
            });
        }
        if !self.theta_deg.is_finite() || self.theta_deg.abs() >= PI / 2.0 {
            return Err(Error::InvalidParameter {
                name: "theta_deg",
                reason: format!("must lie in (-π/2, π/2), got {}", self.theta_deg),
            });
        }
        if let Some((ns, ni)) = self.indices {
            let mismatch = (ns - ni) / 2.0 - self.theta_deg.sin();
            if mismatch.abs() > 1e-12 {
                return Err(Error::InvalidParameter {
                    name: "theta_deg",
                    reason: format!(
                        "inconsistent with indices: sin(theta_deg) differs from (n_s - n_i)/2 by {mismatch:e}"
                    ),
                });
            }
        }
        Ok(())
    }

    /// Vacuum pump wavenumber ω_p/c.
    pub fn pump_wavenumber(&self) -> f64 {
        self.pump_center_omega / SPEED_OF_LIGHT
    }

    pub fn k_deg(&self) -> f64 {
        k_deg(self)
    }
}

pub fn wavelength_to_omega(wavelength: f64) -> f64 {
    2.0 * PI * SPEED_OF_LIGHT / wavelength
}

/// Phase-matching wavenumber at degeneracy, `sin(θ_deg)·ω_p/c`.
pub fn k_deg(device: &DeviceParams) -> f64 {
    match device.indices {
        Some((ns, ni)) => (ns - ni) / 2.0 * device.pump_wavenumber(),
        None => device.theta_deg.sin() * device.pump_wavenumber(),
    }
}

/// Delay conjugate to a pump spot displacement, `z₀/v̄_g`.
pub fn position_to_delay(z0: f64, device: &DeviceParams) -> f64 {
    z0 / device.group_velocity
}

pub fn delay_to_position(tau: f64, device: &DeviceParams) -> f64 {
    tau * device.group_velocity
}

/// Small-angle detuning map `δθ·v̄_g·ω_p/c`.
pub fn angle_to_detuning(delta_theta: f64, device: &DeviceParams) -> Result<f64> {
    check_small_angle(delta_theta)?;
    Ok(delta_theta * device.group_velocity * device.pump_wavenumber())
}

/// Detuning produced by a tilt without the small-angle approximation,
/// `(sin(θ_deg+δθ) − sin θ_deg)·(ω_p/c)·v̄_g`.
pub fn angle_to_detuning_exact(delta_theta: f64, device: &DeviceParams) -> f64 {
    let dsin = (device.theta_deg + delta_theta).sin() - device.theta_deg.sin();
    dsin * device.pump_wavenumber() * device.group_velocity
}

/// Inverse of [`angle_to_detuning`].
pub fn detuning_to_angle(omega_minus: f64, device: &DeviceParams) -> Result<f64> {
    let delta_theta = omega_minus / (device.group_velocity * device.pump_wavenumber());
    check_small_angle(delta_theta)?;
    Ok(delta_theta)
}

/// Inverse of [`angle_to_detuning_exact`].
pub fn detuning_to_angle_exact(omega_minus: f64, device: &DeviceParams) -> Result<f64> {
    let target = device.theta_deg.sin() + omega_minus / (device.group_velocity * device.pump_wavenumber());
    if target.abs() >= 1.0 {
        return Err(Error::AngleOutOfRange {
            delta_theta: f64::NAN,
            limit: SMALL_ANGLE_CUTOFF,
        });
    }
    Ok(target.asin() - device.theta_deg)
}

fn check_small_angle(delta_theta: f64) -> Result<()> {
    if !delta_theta.is_finite() || delta_theta.abs() >= SMALL_ANGLE_CUTOFF {
        return Err(Error::AngleOutOfRange {
            delta_theta,
            limit: SMALL_ANGLE_CUTOFF,
        });
    }
    Ok(())
}

pub fn arcmin_to_rad(arcmin: f64) -> f64 {
    arcmin * PI / (180.0 * 60.0)
}

pub fn rad_to_arcmin(rad: f64) -> f64 {
    rad * (180.0 * 60.0) / PI
}

/// Wavelength-equivalent detuning Λ = (8πc/ω_p²)·Ω.
pub fn detuning_to_lambda(omega_minus: f64, device: &DeviceParams) -> f64 {
    lambda_per_detuning(device) * omega_minus
}

pub fn lambda_to_detuning(lambda: f64, device: &DeviceParams) -> f64 {
    lambda / lambda_per_detuning(device)
}

fn lambda_per_detuning(device: &DeviceParams) -> f64 {
    8.0 * PI * SPEED_OF_LIGHT / (device.pump_center_omega * device.pump_center_omega)
}

/// Point of the (τ, Ω) chronocyclic phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSpacePoint {
    pub tau: f64,
    pub omega_minus: f64,
}

impl PhaseSpacePoint {
    pub fn new(tau: f64, omega_minus: f64) -> Result<Self> {
        if !(tau.is_finite() && omega_minus.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "phase_space_point",
                reason: format!("non-finite coordinate ({tau}, {omega_minus})"),
            });
        }
        Ok(PhaseSpacePoint { tau, omega_minus })
    }
}
