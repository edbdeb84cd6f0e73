//! Pump spatial envelope along the waveguide and pump spectral amplitude.
//!
//! Each beam contributes a tilted Gaussian footprint
//! `w·exp(−(z−z₀)²cos²θ/w_p²)·exp(−i·(ω_p/c)·sinθ·z)` with `θ = θ_deg + δθ`.
//! The carrier phase is written with a negative exponent so that, combined
//! with the `exp(+iω₋z/v̄_g)` phase-matching kernel, a positive tilt produces a
//! positive detuning.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::device::{self, DeviceParams};
use crate::error::{Error, Result};
use crate::grid::{Axis, SampledComplexFunction};

/// One Gaussian pump beam.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamSpec {
    pub position: f64,
    /// Tilt relative to the degeneracy angle.
    pub tilt: f64,
    pub waist: f64,
    pub weight: Complex64,
}

impl BeamSpec {
    pub fn new(position: f64, tilt: f64, waist: f64, weight: Complex64) -> Result<Self> {
        let beam = BeamSpec {
            position,
            tilt,
            waist,
            weight,
        };
        beam.validate()?;
        Ok(beam)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.waist > 0.0 && self.waist.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "waist",
                reason: format!("must be positive, got {}", self.waist),
            });
        }
        if !(self.weight.norm() > 0.0 && self.weight.norm().is_finite()) {
            return Err(Error::InvalidParameter {
                name: "weight",
                reason: "must be finite and non-zero".into(),
            });
        }
        if !(self.position.is_finite() && self.tilt.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "position",
                reason: "non-finite beam geometry".into(),
            });
        }
        Ok(())
    }

    pub fn incidence_angle(&self, device: &DeviceParams) -> f64 {
        device.theta_deg + self.tilt
    }

    /// Residual longitudinal wavenumber `(ω_p/c)(sinθ − sinθ_deg)`.
    pub fn carrier(&self, device: &DeviceParams) -> f64 {
        device.pump_wavenumber() * self.incidence_angle(device).sin() - device::k_deg(device)
    }

    /// Center `ω₋⁽⁰⁾` of the phase-matching amplitude (exact trig).
    pub fn center_detuning(&self, device: &DeviceParams) -> f64 {
        self.carrier(device) * device.group_velocity
    }

    /// Delay `τ₀ = z₀/v̄_g`.
    pub fn delay(&self, device: &DeviceParams) -> f64 {
        device::position_to_delay(self.position, device)
    }

    /// 1/e amplitude half-width `Δω = 2·v̄_g·cosθ/w_p` of the phase-matching amplitude.
    pub fn spectral_width(&self, device: &DeviceParams) -> f64 {
        2.0 * device.group_velocity * self.incidence_angle(device).cos() / self.waist
    }

    /// Same beam with its whole field translated by `dz` along the guide.
    ///
    /// The carrier phase travels with the footprint, so the phase-matching
    /// amplitude picks up a pure `exp(iω₋·dz/v̄_g)` factor.
    pub fn translated(&self, dz: f64, device: &DeviceParams) -> BeamSpec {
        let phase = self.carrier(device) * dz;
        BeamSpec {
            position: self.position + dz,
            weight: self.weight * Complex64::from_polar(1.0, phase),
            ..self.clone()
        }
    }

    pub fn tilted(&self, dtheta: f64) -> BeamSpec {
        BeamSpec {
            tilt: self.tilt + dtheta,
            ..self.clone()
        }
    }
}

/// Complex field of a single beam at position `z`.
pub fn beam_field(beam: &BeamSpec, device: &DeviceParams, z: f64) -> Complex64 {
    let theta = beam.incidence_angle(device);
    let c = theta.cos();
    let dz = z - beam.position;
    let envelope = (-(dz * dz) * c * c / (beam.waist * beam.waist)).exp();
    beam.weight * envelope * Complex64::from_polar(1.0, -device.pump_wavenumber() * theta.sin() * z)
}

/// Largest longitudinal spatial frequency present in the pump envelope.
pub fn envelope_bandwidth(beams: &[BeamSpec], device: &DeviceParams) -> f64 {
    beams
        .iter()
        .map(|b| b.carrier(device).abs() + 4.0 / b.waist)
        .fold(0.0, f64::max)
}

/// Largest z step allowed for a spatial bandwidth `k_max` (8 samples per shortest period).
pub fn max_z_step(k_max: f64) -> f64 {
    2.0 * PI / (8.0 * k_max)
}

/// Odd-length grid over `[−L/2, L/2]` meeting the sampling rule for
/// `extra_k` added to the envelope bandwidth.
pub fn z_grid(beams: &[BeamSpec], device: &DeviceParams, extra_k: f64) -> Axis {
    let max_step = max_z_step(envelope_bandwidth(beams, device) + extra_k);
    let mut intervals = (device.length / max_step).ceil() as usize;
    if intervals % 2 == 1 {
        intervals += 1;
    }
    let intervals = intervals.max(2);
    let step = device.length / intervals as f64;
    Axis {
        start: -device.length / 2.0,
        step,
        len: intervals + 1,
    }
}

/// `φ(z) = [Σ beam_field(z)]·exp(+i·k_deg·z)` sampled on `z_grid`.
pub fn pump_envelope(beams: &[BeamSpec], device: &DeviceParams, z_grid: &Axis) -> Result<SampledComplexFunction> {
    check_domain(z_grid, device)?;
    let max_step = max_z_step(envelope_bandwidth(beams, device));
    if z_grid.step > max_step * (1.0 + 1e-12) {
        return Err(Error::GridTooCoarse {
            step: z_grid.step,
            max_step,
        });
    }
    let kdeg = device::k_deg(device);
    Ok(SampledComplexFunction::from_fn(*z_grid, |z| {
        let total: Complex64 = beams.iter().map(|b| beam_field(b, device, z)).sum();
        total * Complex64::from_polar(1.0, kdeg * z)
    }))
}

pub(crate) fn check_domain(axis: &Axis, device: &DeviceParams) -> Result<()> {
    let half = device.length / 2.0;
    let tol = 1e-9 * device.length;
    if (axis.start + half).abs() > tol || (axis.end() - half).abs() > tol {
        return Err(Error::DomainMismatch {
            start: axis.start,
            end: axis.end(),
            expected_start: -half,
            expected_end: half,
        });
    }
    Ok(())
}

/// Tabulated spectral phase, linearly interpolated and clamped outside its range.
#[derive(Debug, Clone, PartialEq)]
pub struct CavityPhase {
    omega: Vec<f64>,
    phase: Vec<f64>,
}

impl CavityPhase {
    pub fn new(omega: Vec<f64>, phase: Vec<f64>) -> Result<Self> {
        if omega.is_empty() || omega.len() != phase.len() {
            return Err(Error::InvalidParameter {
                name: "cavity_phase",
                reason: "need matching, non-empty columns".into(),
            });
        }
        if omega.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidParameter {
                name: "cavity_phase",
                reason: "frequency column must be strictly increasing".into(),
            });
        }
        if omega.iter().chain(&phase).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "cavity_phase",
                reason: "non-finite entry".into(),
            });
        }
        Ok(CavityPhase { omega, phase })
    }

    pub fn eval(&self, omega: f64) -> f64 {
        let n = self.omega.len();
        if omega <= self.omega[0] {
            return self.phase[0];
        }
        if omega >= self.omega[n - 1] {
            return self.phase[n - 1];
        }
        let k = self.omega.partition_point(|&w| w <= omega);
        let (w0, w1) = (self.omega[k - 1], self.omega[k]);
        let t = (omega - w0) / (w1 - w0);
        self.phase[k - 1] * (1.0 - t) + self.phase[k] * t
    }
}

/// Temporal/spectral pump model.
#[derive(Debug, Clone, PartialEq)]
pub struct PumpPulse {
    pub center_wavelength: f64,
    pub duration: f64,
    pub cavity_phase: Option<CavityPhase>,
}

impl PumpPulse {
    pub fn new(center_wavelength: f64, duration: f64) -> Result<Self> {
        if !(center_wavelength > 0.0 && center_wavelength.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "center_wavelength",
                reason: format!("must be positive, got {center_wavelength}"),
            });
        }
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "duration",
                reason: format!("must be positive, got {duration}"),
            });
        }
        Ok(PumpPulse {
            center_wavelength,
            duration,
            cavity_phase: None,
        })
    }

    pub fn center_omega(&self) -> f64 {
        device::wavelength_to_omega(self.center_wavelength)
    }
}

/// `f₊(ω₊) = exp(−(ω₊−ω_p)²τ_p²/4)·exp(i·φ_cav(ω₊))`.
pub fn pump_spectrum(pulse: &PumpPulse, omega_plus: f64) -> Complex64 {
    let d = omega_plus - pulse.center_omega();
    let magnitude = (-d * d * pulse.duration * pulse.duration / 4.0).exp();
    let phase = pulse.cavity_phase.as_ref().map_or(0.0, |p| p.eval(omega_plus));
    Complex64::from_polar(magnitude, phase)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device::{arcmin_to_rad, DEFAULT_GROUP_VELOCITY};

    fn device(theta_deg: f64) -> DeviceParams {
        DeviceParams::new(2e-3, DEFAULT_GROUP_VELOCITY, 775e-9, theta_deg).unwrap()
    }

    fn beam(z0: f64, tilt: f64) -> BeamSpec {
        BeamSpec::new(z0, tilt, 200e-6, Complex64::new(1.0, 0.0)).unwrap()
    }

    #[test]
    fn untilted_beam_peak_and_one_over_e() {
        let d = device(0.0);
        let b = beam(0.3e-3, 0.0);
        assert!((beam_field(&b, &d, 0.3e-3) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let m = beam_field(&b, &d, 0.5e-3).norm();
        assert!((m - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn beam_half_width() {
        let d = device(arcmin_to_rad(9.37));
        let b = beam(0.0, 0.0);
        let c = d.theta_deg.cos();
        let m = beam_field(&b, &d, 200e-6 / c).norm();
        assert!((m - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn beam_at_degeneracy_gives_real_envelope() {
        let d = device(arcmin_to_rad(9.37));
        let grid = z_grid(&[beam(0.0, 0.0)], &d, 0.0);
        let env = pump_envelope(&[beam(0.0, 0.0)], &d, &grid).unwrap();
        let peak = env.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        for v in &env.values {
            if v.norm() > 1e-12 * peak {
                assert!(v.re > 0.0);
                assert!(v.im.abs() <= 1e-12 * v.norm().max(1e-300) + 1e-12 * peak, "{v}");
            }
        }
    }

    #[test]
    fn symmetric_pair_envelope_is_even() {
        let d = device(arcmin_to_rad(9.37));
        let beams = [beam(0.5e-3, 0.0), beam(-0.5e-3, 0.0)];
        let grid = z_grid(&beams, &d, 0.0);
        let env = pump_envelope(&beams, &d, &grid).unwrap();
        let n = env.values.len();
        for k in 0..n {
            assert!((env.values[k] - env.values[n - 1 - k]).norm() < 1e-12);
        }
    }

    #[test]
    fn coarse_grid_rejected() {
        let d = device(0.0);
        let grid = Axis::symmetric(1e-3, 11).unwrap();
        assert!(matches!(pump_envelope(&[beam(0.0, 0.0)], &d, &grid), Err(Error::GridTooCoarse { .. })));
        let short = Axis::symmetric(0.5e-3, 2001).unwrap();
        assert!(matches!(pump_envelope(&[beam(0.0, 0.0)], &d, &short), Err(Error::DomainMismatch { .. })));
    }

    #[test]
    fn spectrum_conventions() {
        let mut p = PumpPulse::new(775e-9, 3.2e-12).unwrap();
        let w0 = p.center_omega();
        assert!((pump_spectrum(&p, w0) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let m = pump_spectrum(&p, w0 + 2.0 / 3.2e-12).norm();
        assert!((m - (-1.0f64).exp()).abs() < 1e-12);
        let t0 = 0.5e-12;
        let grid: Vec<f64> = (0..11).map(|k| w0 + (k as f64 - 5.0) * 1e12).collect();
        // phase relative to line center keeps values small
        p.cavity_phase = Some(CavityPhase::new(grid.clone(), grid.iter().map(|w| (w - w0) * t0).collect()).unwrap());
        for k in 0..9 {
            let w = w0 + (k as f64 - 4.0) * 0.9e12;
            let v = pump_spectrum(&p, w);
            assert!((v.norm() - (-(w - w0).powi(2) * 3.2e-12f64.powi(2) / 4.0).exp()).abs() < 1e-14);
            assert!((v.arg() - (w - w0) * t0).abs() < 1e-9);
        }
    }

    #[test]
    fn cavity_table_clamps_and_rejects_unsorted() {
        let t = CavityPhase::new(vec![1.0, 2.0, 4.0], vec![0.0, 1.0, 3.0]).unwrap();
        assert_eq!(t.eval(0.0), 0.0);
        assert_eq!(t.eval(3.0), 2.0);
        assert_eq!(t.eval(9.0), 3.0);
        assert!(CavityPhase::new(vec![1.0, 1.0], vec![0.0, 0.0]).is_err());
    }

    #[test]
    fn translation_is_rigid() {
        let d = device(arcmin_to_rad(9.37));
        let b = beam(0.1e-3, arcmin_to_rad(4.0));
        let moved = b.translated(0.2e-3, &d);
        for z in [-0.3e-3, 0.0, 0.17e-3, 0.4e-3] {
            let a = beam_field(&moved, &d, z) * Complex64::from_polar(1.0, d.k_deg() * z);
            let r = beam_field(&b, &d, z - 0.2e-3) * Complex64::from_polar(1.0, d.k_deg() * (z - 0.2e-3));
            assert!((a - r).norm() < 1e-12, "{a} {r}");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn envelope_is_linear_in_weights(re in -3.0f64..3.0, im in -3.0f64..3.0, z0 in -0.4e-3f64..0.4e-3) {
                prop_assume!(re.abs() + im.abs() > 1e-3);
                let d = device(arcmin_to_rad(9.37));
                let alpha = Complex64::new(re, im);
                let beams = vec![beam(z0, 1e-3), beam(-0.2e-3, -2e-3)];
                let scaled: Vec<BeamSpec> = beams.iter().map(|b| BeamSpec { weight: b.weight * alpha, ..b.clone() }).collect();
                let grid = z_grid(&beams, &d, 0.0);
                let a = pump_envelope(&beams, &d, &grid).unwrap();
                let b = pump_envelope(&scaled, &d, &grid).unwrap();
                for (x, y) in a.values.iter().zip(&b.values) {
                    prop_assert!((x * alpha - y).norm() <= 1e-12 * (1.0 + y.norm()));
                }
            }

            #[test]
            fn translation_shifts_magnitude(shift_steps in 1usize..12) {
                let d = device(arcmin_to_rad(9.37));
                let beams = vec![beam(-0.1e-3, 2e-3), beam(0.15e-3, 0.0)];
                let grid = z_grid(&beams, &d, 0.0);
                let shift = shift_steps as f64 * grid.step;
                let moved: Vec<BeamSpec> = beams.iter().map(|b| b.translated(shift, &d)).collect();
                let a: Vec<f64> = pump_envelope(&beams, &d, &grid).unwrap().values.iter().map(|v| v.norm()).collect();
                let b: Vec<f64> = pump_envelope(&moved, &d, &grid).unwrap().values.iter().map(|v| v.norm()).collect();
                let n = a.len();
                let mut best = (0usize, f64::NEG_INFINITY);
                for lag in 0..n / 2 {
                    let c: f64 = (0..n - lag).map(|k| a[k] * b[k + lag]).sum();
                    if c > best.1 { best = (lag, c); }
                }
                prop_assert!((best.0 as f64 - shift_steps as f64).abs() <= 1.0);
            }
        }
    }
}
